//! The seven-tetrahedron once-cusped example and the curve `φ₀`.

mod common;

use num_complex::Complex64;

use cone_deform::checks::{verify, VerifyOptions};
use cone_deform::fixtures;
use cone_deform::gluing::{complex_curvature, monomial_string, QuadIncidence};
use cone_deform::ShapeAssignment;

#[test]
fn incidence_matches_brute_force() {
    for text in [fixtures::TABLE1_TRI, fixtures::TABLE2_TRI] {
        let tri = cone_deform::TriFile::parse(text).unwrap();
        let t = &tri.triangulation;
        let tab = common::parse_table(text);
        let (labels, ne) = common::edge_orbits(&tab);
        let oracle = common::incidence(&tab);
        let inc = QuadIncidence::new(t);
        assert_eq!(ne, inc.edges);
        for s in 0..tab.len() {
            for (k, &(a, b)) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].iter().enumerate() {
                let e = t.edge_class_of(s, a, b);
                let l = labels[6 * s + k];
                for (q, row) in oracle.iter().enumerate() {
                    assert_eq!(inc.get(q, e), row[l]);
                }
            }
        }
        // Every quad faces exactly two tetrahedron edges.
        for q in 0..inc.quads() {
            assert_eq!((0..inc.edges).map(|e| inc.get(q, e)).sum::<i64>(), 2);
        }
    }
}

#[test]
fn verification_without_curves_skips_curve_checks() {
    let tri = fixtures::triangulation("table1").unwrap();
    let rep = verify(&tri.triangulation, &tri.convention(), None, &VerifyOptions::default()).unwrap();
    assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
    assert!(rep.items.iter().any(|i| i.skipped));
}

#[test]
fn phi0_at_i_is_a_complete_structure() {
    let tri = fixtures::triangulation("table1").unwrap();
    let conv = tri.convention();
    let inc = QuadIncidence::new(&tri.triangulation);
    let values: Vec<Complex64> = fixtures::phi0_at_i().iter().map(fixtures::to_f64).collect();
    let z = ShapeAssignment::from_preferred(&conv, &values).unwrap();
    assert!(z.is_positively_oriented());
    for c in complex_curvature(&inc, &z).unwrap() {
        assert!((c - 1.0).norm() < 1e-12);
    }
    // Monomial degree is the number of tetrahedron edges in the class.
    for (e, class) in tri.triangulation.edge_classes().iter().enumerate() {
        let m = monomial_string(&inc, &conv, e);
        let degree: usize = m
            .split_whitespace()
            .map(|f| f.split_once('^').map_or(1, |(_, k)| k.parse().unwrap()))
            .sum();
        assert_eq!(degree, class.members.len(), "{m}");
    }
}

#[test]
fn phi0_region_membership() {
    assert!(fixtures::phi0_positive(Complex64::new(0.0, 1.0)));
    assert!(fixtures::phi0_positive(Complex64::new(0.2, 0.9)));
    assert!(!fixtures::phi0_positive(Complex64::new(0.6, 0.5)));
    assert!(!fixtures::phi0_positive(Complex64::new(0.0, -1.0)));
}

#[test]
fn phi0_conjugate_family_mirrors_phi0() {
    let p = fixtures::phi0();
    let q = p.conj();
    for u in [
        Complex64::new(0.1, 0.8),
        Complex64::new(-0.3, 1.2),
        Complex64::new(0.5, 1.7),
    ] {
        let a = p.eval(u).unwrap();
        let b = q.eval(u.conj()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.conj() - y).norm() < 1e-12);
        }
    }
}

//! Invariants over random triangulations, shapes and angles.

mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cone_deform::angle::{in_tas, leading_trailing_curve, leading_trailing_edge, pairing, span_dimension, tas_basis};
use cone_deform::checks::random_shapes;
use cone_deform::exact::rank_exact;
use cone_deform::geometry::{angles_from_shapes, lobachevsky, shapes_from_angles, AnglePoint};
use cone_deform::gluing::{
    complex_curvature, gauss_bonnet_check, jacobian_g, log_curvature, neumann_matrix, rank_numeric,
};
use cone_deform::peripheral::{index_vector, intersection_number, random_closed_curve};
use cone_deform::{QuadIncidence, ShapeConvention, Triangulation};

fn random_triangulation(n: usize, seed: u64) -> Triangulation {
    Triangulation::random(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Library incidence against the union-find oracle, matching edge classes
/// through a representative tetrahedron edge.
fn incidence_matches_oracle(t: &Triangulation) -> bool {
    let tab = common::parse_table(&t.to_string());
    let (labels, ne) = common::edge_orbits(&tab);
    if ne != t.edge_classes().len() {
        return false;
    }
    let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut class_of_label = vec![usize::MAX; ne];
    for s in 0..tab.len() {
        for (k, &(a, b)) in edges.iter().enumerate() {
            let c = t.edge_class_of(s, a, b);
            let l = labels[6 * s + k];
            if class_of_label[l] == usize::MAX {
                class_of_label[l] = c;
            } else if class_of_label[l] != c {
                return false;
            }
        }
    }
    let oracle = common::incidence(&tab);
    let inc = QuadIncidence::new(t);
    (0..inc.quads()).all(|q| (0..ne).all(|l| inc.get(q, class_of_label[l]) == oracle[q][l]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn census_lemma_and_oracle_counts(n in 1usize..8, seed in any::<u64>()) {
        let t = random_triangulation(n, seed);
        let s = t.census_summary();
        prop_assert!(s.lemma_ok);
        let genus: u32 = s.genera.iter().sum();
        prop_assert_eq!(n as i64 - s.edges as i64 + s.vertices as i64, genus as i64);
        let tab = common::parse_table(&t.to_string());
        prop_assert_eq!(common::edge_orbits(&tab).1, s.edges);
        prop_assert_eq!(common::vertex_orbits(&tab).1, s.vertices);
        prop_assert!(incidence_matches_oracle(&t));
    }

    #[test]
    fn rank_and_tas_dimensions(n in 1usize..7, seed in any::<u64>()) {
        let t = random_triangulation(n, seed);
        let inc = QuadIncidence::new(&t);
        let conv = ShapeConvention::standard(&t);
        let b = neumann_matrix(&inc, &conv);
        let expected = n - t.genus_sum();
        prop_assert_eq!(rank_exact(&b), expected);
        prop_assert_eq!(common::rank_q(&b), expected);
        let s = t.census_summary();
        prop_assert_eq!(tas_basis(&inc).len(), s.vertices + 2 * n - s.edges);
        let qe: Vec<Vec<i64>> = (0..inc.edges).map(|e| leading_trailing_edge(&inc, e)).collect();
        prop_assert!(qe.iter().all(|q| in_tas(&inc, q)));
        prop_assert_eq!(span_dimension(&qe), expected);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let (_, z) = random_shapes(&t, &mut rng);
        prop_assert_eq!(rank_numeric(&jacobian_g(&inc, &conv, &z).unwrap(), 1e-8), expected);
    }

    #[test]
    fn rank_is_independent_of_convention(n in 1usize..6, seed in any::<u64>(), slots in proptest::collection::vec(0usize..3, 6)) {
        let t = random_triangulation(n, seed);
        let inc = QuadIncidence::new(&t);
        let std = ShapeConvention::standard(&t);
        let other = ShapeConvention { orientation: t.orientation(), preferred: slots[..n].to_vec() };
        prop_assert_eq!(rank_exact(&neumann_matrix(&inc, &std)), rank_exact(&neumann_matrix(&inc, &other)));
    }

    #[test]
    fn exp_of_log_curvature_is_curvature(n in 1usize..7, seed in any::<u64>()) {
        let t = random_triangulation(n, seed);
        let inc = QuadIncidence::new(&t);
        let (_, z) = random_shapes(&t, &mut ChaCha8Rng::seed_from_u64(seed));
        let g = log_curvature(&inc, &z).unwrap();
        let c = complex_curvature(&inc, &z).unwrap();
        for (a, b) in g.iter().zip(&c) {
            prop_assert!((a.exp() - b).norm() <= 1e-9 * b.norm().max(1.0));
        }
        let total: Complex64 = g.iter().sum();
        prop_assert!((total - Complex64::new(0.0, 2.0 * PI * n as f64)).norm() < 1e-9);
        prop_assert!(gauss_bonnet_check(&t, &inc, &z).unwrap().iter().all(|r| r.ok));
    }

    #[test]
    fn shape_relations(re in -3.0f64..3.0, im in 0.01f64..3.0) {
        let z = Complex64::new(re, im);
        let one = Complex64::new(1.0, 0.0);
        let z1 = one / (one - z);
        let z2 = one - one / z;
        prop_assert!((z * z1 * z2 + one).norm() < 1e-9 * (1.0 + z.norm() + z1.norm()));
        prop_assert!(z1.im > 0.0 && z2.im > 0.0);
    }

    #[test]
    fn angle_chart_round_trip(n in 1usize..6, seed in any::<u64>()) {
        let t = random_triangulation(n, seed);
        let x = AnglePoint::random(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let z = shapes_from_angles(&x, t.orientation());
        prop_assert!(z.is_positively_oriented());
        let back = angles_from_shapes(&z).unwrap();
        for (a, b) in x.x.iter().zip(&back.x) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for s in 0..n {
            let p: Complex64 = z.z[3 * s..3 * s + 3].iter().product();
            prop_assert!((p + 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn lobachevsky_identities(theta in -20.0f64..20.0) {
        let l = lobachevsky;
        prop_assert!((l(-theta) + l(theta)).abs() < 1e-13);
        prop_assert!((l(theta + PI) - l(theta)).abs() < 1e-12);
        prop_assert!((l(2.0 * theta) - 2.0 * l(theta) - 2.0 * l(theta + PI / 2.0)).abs() < 1e-11);
        let triple = l(3.0 * theta) - 3.0 * (l(theta) + l(theta + PI / 3.0) + l(theta + 2.0 * PI / 3.0));
        prop_assert!(triple.abs() < 1e-11);
    }

    #[test]
    fn curve_pairings(n in 1usize..7, seed in any::<u64>()) {
        let t = random_triangulation(n, seed);
        let inc = QuadIncidence::new(&t);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_closed_curve(&t, &mut rng, None);
        let b = random_closed_curve(&t, &mut rng, Some(a.vertex_class));
        let (ia, ib) = (index_vector(&t, &a), index_vector(&t, &b));
        let iota = intersection_number(&t, &a, &b).unwrap();
        prop_assert_eq!(pairing(&ia, &leading_trailing_curve(&inc, &ib)), 2 * iota);
        prop_assert_eq!(pairing(&ib, &leading_trailing_curve(&inc, &ia)), -2 * iota);
        prop_assert_eq!(intersection_number(&t, &a, &a).unwrap(), 0);
        for e in 0..inc.edges {
            prop_assert_eq!(pairing(&ia, &leading_trailing_edge(&inc, e)), 0);
        }
        prop_assert!(in_tas(&inc, &leading_trailing_curve(&inc, &ia)));
    }

    #[test]
    fn text_and_json_round_trip(n in 1usize..8, seed in any::<u64>()) {
        let t = random_triangulation(n, seed);
        let back: Triangulation = t.to_string().parse().unwrap();
        prop_assert_eq!(&back, &t);
        let json = serde_json::to_string(&t).unwrap();
        let back: Triangulation = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, t);
    }
}

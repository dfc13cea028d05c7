//! The invariant suite run by `verify`: exact combinatorial and linear
//! algebra statements plus sampled numeric checks.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angle::{
    in_stas, in_tas, leading_trailing_curve, leading_trailing_edge, pairing, span_dimension, span_report, stas_basis,
    tas_basis,
};
use crate::error::Result;
use crate::exact::rank_exact;
use crate::geometry::{hessian_form, shapes_from_angles, AnglePoint};
use crate::gluing::{
    complex_curvature, gauss_bonnet_check, jacobian_g, log_curvature, neumann_matrix, rank_numeric, QuadIncidence,
    ShapeAssignment, ShapeConvention,
};
use crate::io::Curves;
use crate::peripheral::{
    curve_around_edge_endpoint, index_vector, intersection_number, jacobian_h, random_closed_curve, EdgeEnd,
};
use crate::triangulation::Triangulation;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub pass: bool,
    pub skipped: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub items: Vec<CheckItem>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|c| c.pass || c.skipped)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|c| !c.pass && !c.skipped)
    }

    fn push(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.items.push(CheckItem {
            name: name.into(),
            pass,
            skipped: false,
            detail: detail.into(),
        });
    }

    fn skip(&mut self, name: &str, detail: &str) {
        self.items.push(CheckItem {
            name: name.into(),
            pass: false,
            skipped: true,
            detail: detail.into(),
        });
    }

    pub fn extend(&mut self, prefix: &str, other: VerifyReport) {
        for mut c in other.items {
            c.name = format!("{prefix}{}", c.name);
            self.items.push(c);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Number of random shape points for sampled checks.
    pub samples: usize,
    pub seed: u64,
    pub rank_tol: f64,
    /// Random curve pairs for the pairing/intersection check.
    pub curve_pairs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 20,
            seed: 0,
            rank_tol: crate::gluing::DEFAULT_RANK_TOL,
            curve_pairs: 10,
        }
    }
}

/// A random positively oriented shape assignment via the angle chart.
pub fn random_shapes<R: Rng + ?Sized>(t: &Triangulation, rng: &mut R) -> (AnglePoint, ShapeAssignment) {
    let x = AnglePoint::random(t.tet_count(), rng);
    let z = shapes_from_angles(&x, t.orientation());
    (x, z)
}

/// Largest relative deviation between `jac` and central differences of
/// `f` at the preferred values `w` with step `h`.
pub fn finite_difference_error(
    conv: &ShapeConvention,
    w: &[Complex64],
    jac: &DMatrix<Complex64>,
    h: f64,
    f: impl Fn(&ShapeAssignment) -> Result<Vec<Complex64>>,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in 0..w.len() {
        let mut wp = w.to_vec();
        let mut wm = w.to_vec();
        wp[s] += h;
        wm[s] -= h;
        let fp = f(&ShapeAssignment::from_preferred(conv, &wp)?)?;
        let fm = f(&ShapeAssignment::from_preferred(conv, &wm)?)?;
        for r in 0..jac.nrows() {
            let fd = (fp[r] - fm[r]) / (2.0 * h);
            let err = (fd - jac[(r, s)]).norm() / jac[(r, s)].norm().max(1.0);
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

/// Universal checks that hold for every valid triangulation.
pub fn verify_triangulation(t: &Triangulation, conv: &ShapeConvention, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut rep = VerifyReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = t.tet_count();
    let summary = t.census_summary();
    let genus = t.genus_sum();
    rep.push(
        "euler-count lemma",
        summary.lemma_ok,
        format!(
            "|T|={} |E|={} |V|={} genera={:?}",
            summary.tetrahedra, summary.edges, summary.vertices, summary.genera
        ),
    );
    let edge_members: usize = t.edge_classes().iter().map(|e| e.members.len()).sum();
    let corners: usize = t.vertex_classes().iter().map(|v| v.members.len()).sum();
    rep.push(
        "orbit partitions",
        edge_members == 6 * n && corners == 4 * n,
        format!("{edge_members} edge members, {corners} corners"),
    );
    let links_ok = t.vertex_classes().iter().all(|v| {
        let chi = v.link.euler_characteristic;
        chi % 2 == 0 && chi <= 2 && v.link.triangles.len() == v.members.len()
    });
    rep.push("link surfaces", links_ok, "χ even, χ ≤ 2, one triangle per corner");

    let inc = QuadIncidence::new(t);
    let rows_ok = (0..inc.quads()).all(|q| (0..inc.edges).map(|e| inc.get(q, e)).sum::<i64>() == 2);
    rep.push("incidence row sums", rows_ok, "Σ_e i(q,e) = 2");

    let rank_b = rank_exact(&neumann_matrix(&inc, conv));
    rep.push(
        "neumann rank",
        rank_b + genus == n,
        format!("rank B = {rank_b}, |T| - Σg = {}", n as i64 - genus as i64),
    );

    let tas = tas_basis(&inc);
    let expected_tas = t.vertex_classes().len() as i64 - inc.edges as i64 + 2 * n as i64;
    rep.push(
        "dim TAS",
        tas.len() as i64 == expected_tas,
        format!("{} (expected {expected_tas})", tas.len()),
    );
    let qe: Vec<Vec<i64>> = (0..inc.edges).map(|e| leading_trailing_edge(&inc, e)).collect();
    rep.push(
        "Q_e in TAS",
        qe.iter().all(|q| in_tas(&inc, q)),
        format!("{} edge vectors", qe.len()),
    );
    let span_qe = span_dimension(&qe);
    rep.push(
        "dim span Q_e",
        span_qe + genus == n,
        format!("{span_qe} (expected {})", n as i64 - genus as i64),
    );

    // Edge loops at both ends of every edge.
    let mut loops_ok = true;
    for (e, q) in qe.iter().enumerate() {
        for end in [EdgeEnd::Tail, EdgeEnd::Head] {
            let path = curve_around_edge_endpoint(t, e, end, 1);
            let ind = index_vector(t, &path);
            loops_ok &= ind == inc.column(e);
            loops_ok &= leading_trailing_curve(&inc, &ind) == *q;
        }
    }
    rep.push("edge loops", loops_ok, "ind(ρ) = i(·,e) and Q_ρ = Q_e");

    let mut pairs = 0;
    let mut pair_fail = 0;
    let mut edge_pair_fail = 0;
    let mut attempts = 0;
    while pairs < opts.curve_pairs && attempts < 50 * opts.curve_pairs.max(1) {
        attempts += 1;
        let a = random_closed_curve(t, &mut rng, None);
        let b = random_closed_curve(t, &mut rng, Some(a.vertex_class));
        let ia = index_vector(t, &a);
        let ib = index_vector(t, &b);
        let iota = intersection_number(t, &a, &b)?;
        if pairing(&ia, &leading_trailing_curve(&inc, &ib)) != 2 * iota {
            pair_fail += 1;
        }
        if qe.iter().any(|q| pairing(&ia, q) != 0) {
            edge_pair_fail += 1;
        }
        pairs += 1;
    }
    rep.push(
        "pairing = 2ι",
        pair_fail == 0,
        format!("{pair_fail} of {pairs} random pairs disagree"),
    );
    rep.push(
        "pairing with Q_e",
        edge_pair_fail == 0,
        format!("{edge_pair_fail} of {pairs} curves pair nontrivially with some Q_e"),
    );

    let mut rank_fail = 0;
    let mut sum_err: f64 = 0.0;
    let mut prod_err: f64 = 0.0;
    let mut exp_err: f64 = 0.0;
    let mut gb_fail = 0;
    let mut fd_err: f64 = 0.0;
    let mut hess_fail = 0;
    let tas_f: Vec<Vec<f64>> = tas
        .iter()
        .map(|v| v.iter().map(|x| x.to_f64().unwrap()).collect())
        .collect();
    for k in 0..opts.samples {
        let (x, z) = random_shapes(t, &mut rng);
        let w = z.preferred(conv);
        let z = ShapeAssignment::from_preferred(conv, &w)?;
        let dg = jacobian_g(&inc, conv, &z)?;
        if rank_numeric(&dg, opts.rank_tol) + genus != n {
            rank_fail += 1;
        }
        let g = log_curvature(&inc, &z)?;
        let c = complex_curvature(&inc, &z)?;
        let total: Complex64 = g.iter().sum();
        sum_err = sum_err.max((total - Complex64::new(0.0, 2.0 * PI * n as f64)).norm());
        let prod: Complex64 = c.iter().product();
        prod_err = prod_err.max((prod - 1.0).norm());
        for (a, b) in g.iter().zip(&c) {
            exp_err = exp_err.max((a.exp() - b).norm() / b.norm().max(1.0));
        }
        if gauss_bonnet_check(t, &inc, &z)?.iter().any(|r| !r.ok) {
            gb_fail += 1;
        }
        if k < 5 {
            fd_err = fd_err.max(finite_difference_error(conv, &w, &dg, 1e-6, |z| {
                log_curvature(&inc, z)
            })?);
        }
        for v in &tas_f {
            if hessian_form(&x, v) >= 0.0 {
                hess_fail += 1;
            }
        }
    }
    let ns = opts.samples;
    rep.push(
        "rank dG",
        rank_fail == 0,
        format!("{rank_fail} of {ns} points off |T| - Σg"),
    );
    rep.push("Σ G = 2πi|T|", sum_err <= 1e-9, format!("max error {sum_err:.3e}"));
    rep.push("Π c = 1", prod_err <= 1e-9, format!("max error {prod_err:.3e}"));
    rep.push("exp G = c", exp_err <= 1e-10, format!("max error {exp_err:.3e}"));
    rep.push("Gauss-Bonnet", gb_fail == 0, format!("{gb_fail} of {ns} points fail"));
    rep.push(
        "dG finite differences",
        fd_err <= 1e-6,
        format!("max relative error {fd_err:.3e}"),
    );
    rep.push(
        "Hessian negative on TAS",
        hess_fail == 0,
        format!("{hess_fail} nonpositive values"),
    );
    Ok(rep)
}

/// Checks that depend on a user-supplied longitude system.
pub fn verify_curves(
    t: &Triangulation,
    conv: &ShapeConvention,
    curves: &Curves,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    let mut rep = VerifyReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let inc = QuadIncidence::new(t);
    let n = t.tet_count();
    let genus = t.genus_sum();
    rep.push(
        "longitude count",
        curves.ind.len() == genus,
        format!("{} curves, Σg = {genus}", curves.ind.len()),
    );
    let ql: Vec<Vec<i64>> = curves.ind.iter().map(|c| leading_trailing_curve(&inc, c)).collect();
    let qe: Vec<Vec<i64>> = (0..inc.edges).map(|e| leading_trailing_edge(&inc, e)).collect();
    rep.push(
        "Q_λ in TAS",
        ql.iter().all(|q| in_tas(&inc, q)),
        format!("{} curve vectors", ql.len()),
    );
    let stas = stas_basis(&inc, &curves.ind);
    rep.push(
        "dim STAS",
        stas.ok,
        format!("{} (expected {})", stas.dimension, stas.expected),
    );
    let in_s = qe.iter().chain(&ql).all(|q| in_stas(&inc, &curves.ind, q));
    rep.push("Q_e, Q_λ in STAS", in_s, format!("{} vectors", qe.len() + ql.len()));
    let mut all: Vec<Vec<i64>> = qe.clone();
    all.extend(ql.iter().cloned());
    let span = span_report(&all, Some(&stas.basis));
    rep.push(
        "span{Q_e, Q_λ} = STAS",
        span.equal == Some(true) && span.dimension == n,
        format!("dimension {}", span.dimension),
    );
    let mut bad_pairs = Vec::new();
    for (i, a) in curves.ind.iter().enumerate() {
        for (j, q) in ql.iter().enumerate() {
            let p = pairing(a, q);
            if p != 0 {
                bad_pairs.push(format!("({},{})={p}", curves.names[i], curves.names[j]));
            }
        }
    }
    let detail = if bad_pairs.is_empty() {
        "pairing(λ_i, Q_λj) = 0 for all i, j".to_string()
    } else {
        bad_pairs.join(" ")
    };
    rep.push("longitude pairings vanish", bad_pairs.is_empty(), detail);
    let mut paths_ok = true;
    for (ind, path) in curves.ind.iter().zip(&curves.paths) {
        if let Some(p) = path {
            paths_ok &= intersection_number(t, p, p)? == 0;
            paths_ok &= index_vector(t, p) == *ind;
        }
    }
    rep.push("arc paths", paths_ok, "self-intersection 0, index vectors consistent");

    let mut rank_fail = 0;
    let mut fd_err: f64 = 0.0;
    for k in 0..opts.samples {
        let (_, z) = random_shapes(t, &mut rng);
        let w = z.preferred(conv);
        let z = ShapeAssignment::from_preferred(conv, &w)?;
        let dg = jacobian_g(&inc, conv, &z)?;
        let dh = jacobian_h(&curves.ind, conv, &z)?;
        let mut stacked = DMatrix::zeros(dg.nrows() + dh.nrows(), n);
        stacked.rows_mut(0, dg.nrows()).copy_from(&dg);
        stacked.rows_mut(dg.nrows(), dh.nrows()).copy_from(&dh);
        if rank_numeric(&stacked, opts.rank_tol) != n {
            rank_fail += 1;
        }
        if k < 5 {
            fd_err = fd_err.max(finite_difference_error(conv, &w, &dh, 1e-6, |z| {
                crate::peripheral::boundary_map(&curves.ind, z)
            })?);
        }
    }
    rep.push(
        "rank (dG; dH_L) = |T|",
        rank_fail == 0,
        format!("{rank_fail} of {} points rank deficient", opts.samples),
    );
    rep.push(
        "dH_L finite differences",
        fd_err <= 1e-6,
        format!("max relative error {fd_err:.3e}"),
    );
    Ok(rep)
}

/// Runs the universal suite, plus curve checks when curves are supplied.
pub fn verify(
    t: &Triangulation,
    conv: &ShapeConvention,
    curves: Option<&Curves>,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    let mut rep = verify_triangulation(t, conv, opts)?;
    match curves {
        Some(c) => rep.extend("", verify_curves(t, conv, c, opts)?),
        None => rep.skip("curve checks", "no curves given; longitude checks skipped"),
    }
    Ok(rep)
}

/// The universal suite on `count` random triangulations.
pub fn verify_random(count: usize, seed: u64, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = VerifyReport::default();
    for k in 0..count {
        let size = rng.random_range(1..=6);
        let t = Triangulation::random(size, &mut rng);
        let conv = ShapeConvention::standard(&t);
        let sub_opts = VerifyOptions {
            seed: rng.random(),
            ..*opts
        };
        rep.extend(
            &format!("random[{k}] (|T|={size}): "),
            verify_triangulation(&t, &conv, &sub_opts)?,
        );
    }
    Ok(rep)
}

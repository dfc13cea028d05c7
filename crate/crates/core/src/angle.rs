//! Tangential angle structures and leading–trailing deformations.
//!
//! All computations are exact. Deformation vectors are integer vectors over
//! quads (index `3 * tet + slot`); subspace bases are primitive integer
//! vectors spanning the rational solution space.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::exact::{annihilates, in_span, kernel_basis, rank_big, to_big};
use crate::gluing::QuadIncidence;

/// Rows of the TAS constraints: one per tetrahedron (sum of its three quads)
/// followed by one per edge class (incidence-weighted sum).
pub fn tas_constraints(inc: &QuadIncidence) -> Vec<Vec<BigInt>> {
    let nq = inc.quads();
    let mut rows = Vec::with_capacity(inc.tets + inc.edges);
    for s in 0..inc.tets {
        let mut r = vec![0i64; nq];
        r[3 * s..3 * s + 3].fill(1);
        rows.push(to_big(&r));
    }
    for e in 0..inc.edges {
        rows.push(to_big(&inc.column(e)));
    }
    rows
}

pub fn tas_basis(inc: &QuadIncidence) -> Vec<Vec<BigInt>> {
    kernel_basis(&tas_constraints(inc), inc.quads())
}

pub fn in_tas(inc: &QuadIncidence, w: &[i64]) -> bool {
    annihilates(&tas_constraints(inc), &to_big(w))
}

/// `Σ_q coeff(q) ((q')* - (q'')*)`.
fn leading_trailing(inc: &QuadIncidence, coeff: impl Fn(usize) -> i64) -> Vec<i64> {
    let mut out = vec![0i64; inc.quads()];
    for q in 0..inc.quads() {
        let c = coeff(q);
        if c == 0 {
            continue;
        }
        let q1 = inc.succ(q);
        let q2 = inc.succ(q1);
        out[q1] += c;
        out[q2] -= c;
    }
    out
}

/// `Q_e = Σ_{q ~ e} (q')* - (q'')*`, counted with multiplicity `i(q,e)`.
pub fn leading_trailing_edge(inc: &QuadIncidence, e: usize) -> Vec<i64> {
    leading_trailing(inc, |q| inc.get(q, e))
}

/// `Q_γ = Σ_q ind(q,γ) ((q')* - (q'')*)`.
pub fn leading_trailing_curve(inc: &QuadIncidence, ind: &[i64]) -> Vec<i64> {
    leading_trailing(inc, |q| ind[q])
}

/// `Σ_q ind_α(q) Q_β(q)`; twice the intersection number for normal curves.
pub fn pairing(ind_alpha: &[i64], q_beta: &[i64]) -> i64 {
    ind_alpha.iter().zip(q_beta).map(|(a, b)| a * b).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct StasReport {
    pub basis: Vec<Vec<BigInt>>,
    pub dimension: usize,
    /// `|T|`, the dimension for a valid longitude system.
    pub expected: usize,
    pub ok: bool,
}

/// TAS constraints plus `Σ_q ind(q,λ) w(q) = 0` for each longitude.
pub fn stas_constraints(inc: &QuadIncidence, longitudes: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let mut rows = tas_constraints(inc);
    rows.extend(longitudes.iter().map(|l| to_big(l)));
    rows
}

pub fn stas_basis(inc: &QuadIncidence, longitudes: &[Vec<i64>]) -> StasReport {
    let basis = kernel_basis(&stas_constraints(inc, longitudes), inc.quads());
    let dimension = basis.len();
    StasReport {
        basis,
        dimension,
        expected: inc.tets,
        ok: dimension == inc.tets,
    }
}

pub fn in_stas(inc: &QuadIncidence, longitudes: &[Vec<i64>], w: &[i64]) -> bool {
    annihilates(&stas_constraints(inc, longitudes), &to_big(w))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanReport {
    pub dimension: usize,
    /// Whether every vector lies in the reference space, when one is given.
    pub contained: Option<bool>,
    /// Whether the span equals the reference space.
    pub equal: Option<bool>,
    /// Dimension of the intersection with the reference space.
    pub intersection_dimension: Option<usize>,
}

pub fn span_dimension(vectors: &[Vec<i64>]) -> usize {
    let rows: Vec<Vec<BigInt>> = vectors.iter().map(|v| to_big(v)).collect();
    rank_big(&rows)
}

/// Exact span dimension of `vectors`, compared against the span of
/// `reference` if supplied.
pub fn span_report(vectors: &[Vec<i64>], reference: Option<&[Vec<BigInt>]>) -> SpanReport {
    let rows: Vec<Vec<BigInt>> = vectors.iter().map(|v| to_big(v)).collect();
    let dimension = rank_big(&rows);
    let Some(reference) = reference else {
        return SpanReport {
            dimension,
            contained: None,
            equal: None,
            intersection_dimension: None,
        };
    };
    let ref_dim = rank_big(reference);
    let contained = rows.iter().all(|v| in_span(reference, v));
    let mut union = rows.clone();
    union.extend(reference.iter().cloned());
    let union_dim = rank_big(&union);
    SpanReport {
        dimension,
        contained: Some(contained),
        equal: Some(contained && dimension == ref_dim),
        intersection_dimension: Some(dimension + ref_dim - union_dim),
    }
}

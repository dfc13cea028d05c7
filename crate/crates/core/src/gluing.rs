//! Quadrilateral types, edge incidence, and the curvature maps.
//!
//! Quads are indexed globally as `3 * tet + slot` with slot 0 = `{01|23}`,
//! 1 = `{02|13}`, 2 = `{03|12}`. Shapes are parametrised by one value per
//! tetrahedron placed at a chosen *preferred* quad; the other two quads
//! carry `z' = 1/(1-z)` and `z'' = (z-1)/z` along the cyclic order.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triangulation::{Orientation, Triangulation, TET_EDGES};

/// A quadrilateral type: a partition of a tetrahedron's vertices into pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadType {
    pub tet: usize,
    pub slot: usize,
}

impl QuadType {
    pub fn index(self) -> usize {
        3 * self.tet + self.slot
    }

    pub fn from_index(q: usize) -> QuadType {
        QuadType {
            tet: q / 3,
            slot: q % 3,
        }
    }
}

/// Slot of the quad faced by the tetrahedron edge `{a, b}`.
pub fn slot_of_edge(a: usize, b: usize) -> usize {
    match (a.min(b), a.max(b)) {
        (0, 1) | (2, 3) => 0,
        (0, 2) | (1, 3) => 1,
        (0, 3) | (1, 2) => 2,
        _ => panic!("not a tetrahedron edge: {a}{b}"),
    }
}

/// The cyclic successor `q -> q'` of a slot.
pub fn successor(slot: usize, orientation: Orientation) -> usize {
    match orientation {
        Orientation::Standard => (slot + 1) % 3,
        Orientation::Reversed => (slot + 2) % 3,
    }
}

/// Choice of preferred quad per tetrahedron, together with the cyclic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeConvention {
    pub orientation: Orientation,
    pub preferred: Vec<usize>,
}

impl ShapeConvention {
    /// Preferred quad `{01|23}` on every tetrahedron.
    pub fn standard(t: &Triangulation) -> Self {
        ShapeConvention {
            orientation: t.orientation(),
            preferred: vec![0; t.tet_count()],
        }
    }

    /// Preferred quads given by one base edge per tetrahedron.
    pub fn from_base_edges(t: &Triangulation, edges: &[(usize, usize)]) -> Result<Self> {
        if edges.len() != t.tet_count() {
            return Err(Error::Dimension {
                what: "base edges",
                expected: t.tet_count(),
                got: edges.len(),
            });
        }
        Ok(ShapeConvention {
            orientation: t.orientation(),
            preferred: edges.iter().map(|&(a, b)| slot_of_edge(a, b)).collect(),
        })
    }

    pub fn tet_count(&self) -> usize {
        self.preferred.len()
    }

    /// Prime level (0, 1 or 2) of a quad relative to its tetrahedron's
    /// preferred quad.
    pub fn level(&self, q: usize) -> usize {
        let QuadType { tet, slot } = QuadType::from_index(q);
        let p = self.preferred[tet];
        (0..3)
            .find(|&k| nth_successor(p, k, self.orientation) == slot)
            .expect("cyclic")
    }

    /// Global index of the quad at the given prime level in `tet`.
    pub fn quad_at_level(&self, tet: usize, level: usize) -> usize {
        3 * tet + nth_successor(self.preferred[tet], level, self.orientation)
    }

    /// Global index of `q'`.
    pub fn succ(&self, q: usize) -> usize {
        let QuadType { tet, slot } = QuadType::from_index(q);
        3 * tet + successor(slot, self.orientation)
    }
}

fn nth_successor(slot: usize, k: usize, orientation: Orientation) -> usize {
    (0..k).fold(slot, |s, _| successor(s, orientation))
}

/// `i(q, e)`: how many tetrahedron edges of class `e` face quad `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadIncidence {
    pub tets: usize,
    pub edges: usize,
    pub orientation: Orientation,
    /// Row-major `3|T| × |E|`.
    pub matrix: Vec<Vec<u8>>,
}

impl QuadIncidence {
    pub fn new(t: &Triangulation) -> Self {
        let n = t.tet_count();
        let ne = t.edge_classes().len();
        let mut matrix = vec![vec![0u8; ne]; 3 * n];
        for s in 0..n {
            for &(a, b) in &TET_EDGES {
                let e = t.edge_class_of(s, a, b);
                matrix[3 * s + slot_of_edge(a, b)][e] += 1;
            }
        }
        QuadIncidence {
            tets: n,
            edges: ne,
            orientation: t.orientation(),
            matrix,
        }
    }

    pub fn quads(&self) -> usize {
        3 * self.tets
    }

    #[inline]
    pub fn get(&self, q: usize, e: usize) -> i64 {
        self.matrix[q][e] as i64
    }

    /// Column `i(·, e)` over all quads.
    pub fn column(&self, e: usize) -> Vec<i64> {
        (0..self.quads()).map(|q| self.get(q, e)).collect()
    }

    pub fn succ(&self, q: usize) -> usize {
        3 * (q / 3) + successor(q % 3, self.orientation)
    }
}

/// Complex shape parameters on all quads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeAssignment {
    pub z: Vec<Complex64>,
}

impl ShapeAssignment {
    /// Expands preferred-quad values into all three quads per tetrahedron.
    pub fn from_preferred(conv: &ShapeConvention, values: &[Complex64]) -> Result<Self> {
        if values.len() != conv.tet_count() {
            return Err(Error::Dimension {
                what: "shape values",
                expected: conv.tet_count(),
                got: values.len(),
            });
        }
        let mut z = vec![Complex64::new(0.0, 0.0); 3 * values.len()];
        let one = Complex64::new(1.0, 0.0);
        for (s, &w) in values.iter().enumerate() {
            let q = conv.quad_at_level(s, 0);
            if !w.is_finite() || w == one || w == Complex64::new(0.0, 0.0) {
                return Err(Error::DegenerateShape { quad: q });
            }
            z[q] = w;
            z[conv.quad_at_level(s, 1)] = one / (one - w);
            z[conv.quad_at_level(s, 2)] = (w - one) / w;
        }
        Ok(ShapeAssignment { z })
    }

    /// Preferred-quad values.
    pub fn preferred(&self, conv: &ShapeConvention) -> Vec<Complex64> {
        (0..conv.tet_count())
            .map(|s| self.z[conv.quad_at_level(s, 0)])
            .collect()
    }

    pub fn is_positively_oriented(&self) -> bool {
        self.z.iter().all(|z| z.im > 0.0)
    }

    pub fn check_positive(&self) -> Result<()> {
        match self.z.iter().position(|z| z.im.is_nan() || z.im <= 0.0) {
            Some(quad) => Err(Error::NotPositivelyOriented { quad }),
            None => Ok(()),
        }
    }

    pub fn check_nondegenerate(&self) -> Result<()> {
        let one = Complex64::new(1.0, 0.0);
        match self
            .z
            .iter()
            .position(|&z| !z.is_finite() || z == one || z == Complex64::new(0.0, 0.0))
        {
            Some(quad) => Err(Error::DegenerateShape { quad }),
            None => Ok(()),
        }
    }
}

/// `G(z)(e) = Σ_q i(q,e) log z(q)` with the principal logarithm.
pub fn log_curvature(inc: &QuadIncidence, z: &ShapeAssignment) -> Result<Vec<Complex64>> {
    z.check_positive()?;
    let logs: Vec<Complex64> = z.z.iter().map(|w| w.ln()).collect();
    Ok((0..inc.edges)
        .map(|e| (0..inc.quads()).map(|q| logs[q] * inc.get(q, e) as f64).sum())
        .collect())
}

/// `c(z)(e) = Π_q z(q)^{i(q,e)}`.
pub fn complex_curvature(inc: &QuadIncidence, z: &ShapeAssignment) -> Result<Vec<Complex64>> {
    z.check_nondegenerate()?;
    Ok((0..inc.edges)
        .map(|e| {
            (0..inc.quads()).fold(Complex64::new(1.0, 0.0), |acc, q| {
                acc * z.z[q].powi(inc.get(q, e) as i32)
            })
        })
        .collect())
}

/// `d log z(q) / dw` where `w` is the preferred value and `q` sits at the
/// given prime level.
pub fn dlog(level: usize, w: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    match level {
        0 => one / w,
        1 => one / (one - w),
        _ => one / (w * (w - one)),
    }
}

/// Derivatives of `Σ_q coeff(q) log z(q)` with respect to the preferred
/// values, one entry per tetrahedron.
pub(crate) fn linear_log_gradient(
    conv: &ShapeConvention,
    w: &[Complex64],
    coeff: impl Fn(usize) -> i64,
) -> Vec<Complex64> {
    (0..conv.tet_count())
        .map(|s| {
            (0..3)
                .map(|k| dlog(k, w[s]) * coeff(conv.quad_at_level(s, k)) as f64)
                .sum()
        })
        .collect()
}

/// `dG` as an `|E| × |T|` matrix with respect to the preferred values.
pub fn jacobian_g(inc: &QuadIncidence, conv: &ShapeConvention, z: &ShapeAssignment) -> Result<DMatrix<Complex64>> {
    z.check_positive()?;
    let w = z.preferred(conv);
    let mut m = DMatrix::zeros(inc.edges, inc.tets);
    for e in 0..inc.edges {
        for (s, d) in linear_log_gradient(conv, &w, |q| inc.get(q, e)).into_iter().enumerate() {
            m[(e, s)] = d;
        }
    }
    Ok(m)
}

/// Integer matrix with rows `i(q,e) - i(q',e)` and `i(q',e) - i(q'',e)` for
/// the preferred quad `q` of each tetrahedron.
pub fn neumann_matrix(inc: &QuadIncidence, conv: &ShapeConvention) -> Vec<Vec<i64>> {
    let mut rows = Vec::with_capacity(2 * inc.tets);
    for s in 0..inc.tets {
        let q = conv.quad_at_level(s, 0);
        let q1 = conv.quad_at_level(s, 1);
        let q2 = conv.quad_at_level(s, 2);
        rows.push((0..inc.edges).map(|e| inc.get(q, e) - inc.get(q1, e)).collect());
        rows.push((0..inc.edges).map(|e| inc.get(q1, e) - inc.get(q2, e)).collect());
    }
    rows
}

/// Number of singular values above `tol` times the largest, or above `tol`
/// itself when the largest is below 1, so that a matrix whose entries
/// cancel to rounding noise has rank 0.
pub fn rank_numeric(m: &DMatrix<Complex64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let scale = sv.iter().cloned().fold(1.0, f64::max);
    sv.iter().filter(|&&s| s > tol * scale).count()
}

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussBonnetRecord {
    pub vertex: usize,
    pub angle_sum_defect: f64,
    pub expected: f64,
    pub ok: bool,
}

/// Per vertex class, `Σ (2π - Im G(e))` over edge ends at the vertex
/// against `2π χ(Lk(v))`.
pub fn gauss_bonnet_check(
    t: &Triangulation,
    inc: &QuadIncidence,
    z: &ShapeAssignment,
) -> Result<Vec<GaussBonnetRecord>> {
    let g = log_curvature(inc, z)?;
    let mut defect = vec![0.0; t.vertex_classes().len()];
    for (e, class) in t.edge_classes().iter().enumerate() {
        let d = 2.0 * PI - g[e].im;
        defect[class.endpoints.0] += d;
        defect[class.endpoints.1] += d;
    }
    Ok(t.vertex_classes()
        .iter()
        .map(|v| {
            let expected = 2.0 * PI * v.link.euler_characteristic as f64;
            let d = defect[v.id];
            GaussBonnetRecord {
                vertex: v.id,
                angle_sum_defect: d,
                expected,
                ok: (d - expected).abs() <= 1e-9,
            }
        })
        .collect())
}

fn quad_symbol(tet: usize, level: usize) -> String {
    format!("z{tet}{}", "'".repeat(level))
}

/// Monomial `Π z^{i(q,e)}` in preferred-value notation, factors ordered by
/// tetrahedron then prime level, e.g. `z0 z0' z1^2`.
pub fn monomial_string(inc: &QuadIncidence, conv: &ShapeConvention, e: usize) -> String {
    let mut parts = Vec::new();
    for s in 0..inc.tets {
        for k in 0..3 {
            let m = inc.get(conv.quad_at_level(s, k), e);
            match m {
                0 => {}
                1 => parts.push(quad_symbol(s, k)),
                m => parts.push(format!("{}^{m}", quad_symbol(s, k))),
            }
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

/// `Σ i(q,e) log z(q)` in the same notation, e.g. `log z1' + 2 log z3`.
pub fn log_string(inc: &QuadIncidence, conv: &ShapeConvention, e: usize) -> String {
    let mut parts = Vec::new();
    for s in 0..inc.tets {
        for k in 0..3 {
            let m = inc.get(conv.quad_at_level(s, k), e);
            match m {
                0 => {}
                1 => parts.push(format!("log {}", quad_symbol(s, k))),
                m => parts.push(format!("{m} log {}", quad_symbol(s, k))),
            }
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

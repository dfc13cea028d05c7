//! Embedded example data: two triangulations, the `table2` shape points and
//! curves, and the rational parametrisation `φ₀` of a curve of shapes on the
//! seven-tetrahedron triangulation.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gluing::{complex_curvature, log_curvature, QuadIncidence, ShapeAssignment};
use crate::io::{CurveFile, TriFile};

pub const TABLE1_TRI: &str = include_str!("../data/table1.tri");
pub const TABLE2_TRI: &str = include_str!("../data/table2.tri");
pub const TABLE2_CURVES: &str = include_str!("../data/table2_curves.json");
pub const TABLE2_CURVES_ARCPATH: &str = include_str!("../data/table2_curves_arcpath.json");
pub const TABLE2_Z0: &str = include_str!("../data/table2_z0.json");
pub const TABLE2_U0_T0: &str = include_str!("../data/table2_u0_t0.json");
pub const TABLE2_NEAR_Z0: &str = include_str!("../data/table2_near_z0.json");

pub const FIXTURE_NAMES: [&str; 3] = ["table1", "table2", "phi0"];

/// Loads an embedded triangulation by name.
pub fn triangulation(name: &str) -> Result<TriFile> {
    match name {
        "table1" => TriFile::parse(TABLE1_TRI),
        "table2" => TriFile::parse(TABLE2_TRI),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

/// Raw text of an embedded data file by name (with or without extension).
pub fn data_file(name: &str) -> Option<&'static str> {
    let stem = name.rsplit('/').next().unwrap_or(name);
    let stem = stem
        .strip_suffix(".json")
        .or_else(|| stem.strip_suffix(".tri"))
        .unwrap_or(stem);
    Some(match stem {
        "table1" => TABLE1_TRI,
        "table2" => TABLE2_TRI,
        "table2_curves" => TABLE2_CURVES,
        "table2_curves_arcpath" => TABLE2_CURVES_ARCPATH,
        "table2_z0" | "z0" => TABLE2_Z0,
        "table2_u0_t0" | "u0_t0" => TABLE2_U0_T0,
        "table2_near_z0" | "near_z0" => TABLE2_NEAR_Z0,
        _ => return None,
    })
}

pub fn table2_curves() -> CurveFile {
    CurveFile::parse(TABLE2_CURVES).expect("embedded curve file")
}

pub fn table2_curves_arcpath() -> CurveFile {
    CurveFile::parse(TABLE2_CURVES_ARCPATH).expect("embedded curve file")
}

/// Display edge label `e_k` of the `table2` fixture is canonical edge class `TABLE2_DISPLAY_EDGE[k]`.
pub const TABLE2_DISPLAY_EDGE: [usize; 4] = [3, 0, 1, 2];

/// The displayed complex-curvature monomials of the `table2` fixture, in display edge
/// order, expanded into preferred-value notation.
pub const TABLE2_DISPLAY_MONOMIALS: [&str; 4] = [
    "z1'",
    "z0'' z1' z2 z3'' z4''",
    "z0 z0' z0'' z2 z2' z2''",
    "z0 z0' z1^2 z1''^2 z2' z2'' z3^2 z3'^2 z3'' z4^2 z4'^2 z4''",
];

/// The displayed log-curvature components of the `table2` fixture, expanded.
pub const TABLE2_DISPLAY_LOGS: [&str; 4] = [
    "log z1'",
    "log z0'' + log z1' + log z2 + log z3'' + log z4''",
    "log z0 + log z0' + log z0'' + log z2 + log z2' + log z2''",
    "log z0 + log z0' + 2 log z1 + 2 log z1'' + log z2' + log z2'' + 2 log z3 + 2 log z3' + log z3'' + 2 log z4 + 2 log z4' + log z4''",
];

/// The displayed boundary-map monomials `e^{H_L}` of the `table2` fixture.
pub const TABLE2_DISPLAY_HOLONOMY: [&str; 3] = ["z0' / z2''", "z3 / z4", "z0 z2' z3' z4' / z1'"];

/// Reorders a display-ordered `table2` edge vector into canonical order.
pub fn table2_from_display_order<T: Clone>(display: &[T]) -> Vec<T> {
    let mut out = display.to_vec();
    for (k, &c) in TABLE2_DISPLAY_EDGE.iter().enumerate() {
        out[c] = display[k].clone();
    }
    out
}

/// Reorders a canonical `table2` edge vector into display order.
pub fn table2_to_display_order<T: Clone>(canonical: &[T]) -> Vec<T> {
    TABLE2_DISPLAY_EDGE.iter().map(|&c| canonical[c].clone()).collect()
}

fn e(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

fn w_prime() -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    one / (one - e(5.0 * PI / 6.0))
}

/// `z⁰`: every preferred value `e^{iπ/3}`.
pub fn table2_z0() -> Vec<Complex64> {
    vec![e(PI / 3.0); 5]
}

/// `z¹` exactly as displayed, with `1/(1 - e^{5πi/6})` in the third slot.
pub fn table2_z1_printed() -> Vec<Complex64> {
    let w = w_prime();
    vec![w, e(PI / 3.0), w, w, w]
}

/// `z¹` with third entry `e^{5πi/6}`, which reproduces the displayed `u¹`.
pub fn table2_z1_corrected() -> Vec<Complex64> {
    let w = w_prime();
    vec![w, e(PI / 3.0), e(5.0 * PI / 6.0), w, w]
}

fn imag(v: f64) -> Complex64 {
    Complex64::new(0.0, v)
}

/// `u⁰ = G(z⁰)` in display edge order.
pub fn table2_u0_display() -> Vec<Complex64> {
    vec![imag(PI / 3.0), imag(5.0 * PI / 3.0), imag(2.0 * PI), imag(6.0 * PI)]
}

/// `u¹ = G(z¹)` in display edge order.
pub fn table2_u1_display() -> Vec<Complex64> {
    vec![imag(PI / 3.0), imag(11.0 * PI / 3.0), imag(2.0 * PI), imag(4.0 * PI)]
}

/// `H_L(z⁰)`.
pub fn table2_t0() -> Vec<Complex64> {
    vec![imag(0.0), imag(0.0), imag(PI)]
}

/// A Gaussian rational `a + bi`.
pub type GaussRational = Complex<Rational64>;

fn gq(re: (i64, i64), im: (i64, i64)) -> GaussRational {
    Complex::new(Rational64::new(re.0, re.1), Rational64::new(im.0, im.1))
}

fn gi(re: i64, im: i64) -> GaussRational {
    gq((re, 1), (im, 1))
}

/// A polynomial with Gaussian-rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussPoly(pub Vec<GaussRational>);

impl GaussPoly {
    pub fn eval_exact(&self, u: GaussRational) -> GaussRational {
        self.0.iter().rev().fold(GaussRational::zero(), |acc, c| acc * u + c)
    }

    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * u + to_f64(c))
    }

    pub fn conj(&self) -> GaussPoly {
        GaussPoly(self.0.iter().map(|c| c.conj()).collect())
    }
}

pub fn to_f64(c: &GaussRational) -> Complex64 {
    Complex64::new(c.re.to_f64().unwrap(), c.im.to_f64().unwrap())
}

/// A vector of rational functions `num_j(u) / den_j(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalParam {
    pub components: Vec<(GaussPoly, GaussPoly)>,
}

impl RationalParam {
    pub fn eval_exact(&self, u: GaussRational) -> Result<Vec<GaussRational>> {
        self.components
            .iter()
            .enumerate()
            .map(|(j, (n, d))| {
                let dv = d.eval_exact(u);
                if dv.is_zero() {
                    Err(Error::Pole(format!("u = {u} (component {j})")))
                } else {
                    Ok(n.eval_exact(u) / dv)
                }
            })
            .collect()
    }

    pub fn eval(&self, u: Complex64) -> Result<Vec<Complex64>> {
        self.components
            .iter()
            .enumerate()
            .map(|(j, (n, d))| {
                let dv = d.eval(u);
                if dv.norm() < 1e-14 {
                    Err(Error::Pole(format!("u = {u} (component {j})")))
                } else {
                    Ok(n.eval(u) / dv)
                }
            })
            .collect()
    }

    /// The family with conjugated coefficients.
    pub fn conj(&self) -> RationalParam {
        RationalParam {
            components: self.components.iter().map(|(n, d)| (n.conj(), d.conj())).collect(),
        }
    }
}

/// `φ₀`, a rational curve of shapes (at edge 01) on the seven-tetrahedron
/// triangulation with `φ₀(i)` the complete structure.
pub fn phi0() -> RationalParam {
    let p = |v: Vec<GaussRational>| GaussPoly(v);
    RationalParam {
        components: vec![
            (p(vec![gi(-1, -1), gi(1, 0)]), p(vec![gi(-1, 0), gi(1, -1)])),
            (p(vec![gi(1, 1)]), p(vec![gi(2, 2), gi(-2, 0)])),
            (p(vec![gi(0, -1), gi(1, 1)]), p(vec![gi(0, 0), gi(1, 0)])),
            (
                p(vec![gi(1, -1), gi(-2, 0), gi(2, 0)]),
                p(vec![gi(0, 0), gi(-2, 0), gi(2, 0)]),
            ),
            (
                p(vec![gi(0, 1), gi(-1, -2), gi(1, 1)]),
                p(vec![gi(1, 0), gi(-1, -1), gi(1, 1)]),
            ),
            (p(vec![gi(0, 0), gi(1, 0)]), p(vec![gi(1, 0)])),
            (p(vec![gi(1, -1), gi(0, 2)]), p(vec![gi(0, 0), gi(2, 2), gi(-2, 0)])),
        ],
    }
}

/// `φ₀(i)`, the complete solution.
pub fn phi0_at_i() -> Vec<GaussRational> {
    vec![
        gi(0, 1),
        gq((1, 2), (1, 2)),
        gi(0, 1),
        gq((1, 1), (1, 2)),
        gq((3, 5), (1, 5)),
        gi(0, 1),
        gq((-1, 2), (1, 2)),
    ]
}

pub fn eval_phi0(u: Complex64) -> Result<Vec<Complex64>> {
    phi0().eval(u)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phi0Sample {
    pub u: Complex64,
    pub positive: bool,
    /// Only checked on positive samples.
    pub max_c_error: Option<f64>,
    pub max_g_error: Option<f64>,
    pub ok: bool,
}

/// Evaluates `φ₀` at each sample and, where the shapes are positively
/// oriented, checks `c = 1` and `G = 2πi` on every edge of `table1`.
pub fn verify_phi0_on_variety(samples: &[Complex64]) -> Result<Vec<Phi0Sample>> {
    let tri = triangulation("table1")?;
    let conv = tri.convention();
    let inc = QuadIncidence::new(&tri.triangulation);
    let param = phi0();
    let mut out = Vec::with_capacity(samples.len());
    for &u in samples {
        let values = param.eval(u)?;
        let z = ShapeAssignment::from_preferred(&conv, &values)?;
        if !z.is_positively_oriented() {
            out.push(Phi0Sample {
                u,
                positive: false,
                max_c_error: None,
                max_g_error: None,
                ok: true,
            });
            continue;
        }
        let c = complex_curvature(&inc, &z)?;
        let g = log_curvature(&inc, &z)?;
        let ce = c.iter().map(|x| (x - 1.0).norm()).fold(0.0, f64::max);
        let ge = g
            .iter()
            .map(|x| (x - Complex64::new(0.0, 2.0 * PI)).norm())
            .fold(0.0, f64::max);
        out.push(Phi0Sample {
            u,
            positive: true,
            max_c_error: Some(ce),
            max_g_error: Some(ge),
            ok: ce <= 1e-10 && ge <= 1e-9,
        });
    }
    Ok(out)
}

/// Whether all seven components of `φ₀(u)` lie in the upper half-plane.
pub fn phi0_positive(u: Complex64) -> bool {
    matches!(eval_phi0(u), Ok(v) if v.iter().all(|z| z.im > 0.0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionReport {
    pub grid: usize,
    pub positive_cells: usize,
    /// 4-connected components of the positive cells.
    pub components: usize,
    /// 8-connected components of the complement not touching the border.
    pub holes: usize,
    pub simply_connected: bool,
}

/// Samples `φ₀` at cell centres of an `n × n` grid on `[re0, re1] × [im0, im1]`
/// and describes the positive set by flood fill.
pub fn phi0_region(n: usize, re: (f64, f64), im: (f64, f64)) -> RegionReport {
    let center = |i: usize, j: usize| {
        Complex64::new(
            re.0 + (re.1 - re.0) * (i as f64 + 0.5) / n as f64,
            im.0 + (im.1 - im.0) * (j as f64 + 0.5) / n as f64,
        )
    };
    let mut positive = vec![vec![false; n]; n];
    for (i, row) in positive.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = phi0_positive(center(i, j));
        }
    }
    let positive_cells = positive.iter().flatten().filter(|&&b| b).count();
    let (components, _) = flood(&positive, true, false);
    let (_, holes) = flood(&positive, false, true);
    RegionReport {
        grid: n,
        positive_cells,
        components,
        holes,
        simply_connected: components == 1 && holes == 0,
    }
}

/// Connected components of the cells equal to `value`; returns the count
/// and how many of them avoid the grid border.
fn flood(grid: &[Vec<bool>], value: bool, diagonal: bool) -> (usize, usize) {
    let n = grid.len();
    let mut seen = vec![vec![false; n]; n];
    let mut count = 0;
    let mut interior = 0;
    let steps: &[(i64, i64)] = if diagonal {
        &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
    } else {
        &[(1, 0), (-1, 0), (0, 1), (0, -1)]
    };
    for i in 0..n {
        for j in 0..n {
            if grid[i][j] != value || seen[i][j] {
                continue;
            }
            count += 1;
            let mut touches = false;
            let mut queue = VecDeque::from([(i, j)]);
            seen[i][j] = true;
            while let Some((a, b)) = queue.pop_front() {
                if a == 0 || b == 0 || a == n - 1 || b == n - 1 {
                    touches = true;
                }
                for &(da, db) in steps {
                    let (x, y) = (a as i64 + da, b as i64 + db);
                    if x < 0 || y < 0 || x >= n as i64 || y >= n as i64 {
                        continue;
                    }
                    let (x, y) = (x as usize, y as usize);
                    if grid[x][y] == value && !seen[x][y] {
                        seen[x][y] = true;
                        queue.push_back((x, y));
                    }
                }
            }
            if !touches {
                interior += 1;
            }
        }
    }
    (count, interior)
}

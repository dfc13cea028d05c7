//! Independent oracles for integration tests. Nothing here calls into the
//! library under test.
#![allow(dead_code, clippy::needless_range_loop, clippy::excessive_precision)]

use std::f64::consts::PI;

use num_rational::Rational64;
use num_traits::{One, Zero};

/// `(target tet, images of 0..3)` for every (tet, face), parsed directly.
pub type Table = Vec<[(usize, [usize; 4]); 4]>;

pub fn parse_table(text: &str) -> Table {
    const FACES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        let mut row = [(0, [0; 4]); 4];
        for j in 0..4 {
            let (t, d) = cols[j + 1].split_once('(').unwrap();
            let digits: Vec<usize> = d
                .trim_end_matches(')')
                .chars()
                .map(|c| c.to_digit(10).unwrap() as usize)
                .collect();
            let mut p = [9; 4];
            for k in 0..3 {
                p[FACES[j][k]] = digits[k];
            }
            let off = 3 - j;
            p[off] = (0..4).find(|x| !digits.contains(x)).unwrap();
            row[j] = (t.trim().parse().unwrap(), p);
        }
        rows.push(row);
    }
    rows
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra] = rb;
    }
}

fn edge_id(a: usize, b: usize) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        .iter()
        .position(|&e| e == (a, b))
        .unwrap()
}

/// Union-find over all tetrahedron edges; returns the class root per
/// `(tet, edge)` as a dense label vector and the class count.
pub fn edge_orbits(t: &Table) -> (Vec<usize>, usize) {
    let n = t.len();
    let mut parent: Vec<usize> = (0..6 * n).collect();
    for (s, row) in t.iter().enumerate() {
        for (f, &(tt, p)) in row.iter().enumerate() {
            let off = 3 - f;
            for a in 0..4 {
                for b in a + 1..4 {
                    if a == off || b == off {
                        continue;
                    }
                    union(&mut parent, 6 * s + edge_id(a, b), 6 * tt + edge_id(p[a], p[b]));
                }
            }
        }
    }
    dense(&mut parent)
}

pub fn vertex_orbits(t: &Table) -> (Vec<usize>, usize) {
    let n = t.len();
    let mut parent: Vec<usize> = (0..4 * n).collect();
    for (s, row) in t.iter().enumerate() {
        for (f, &(tt, p)) in row.iter().enumerate() {
            for v in 0..4 {
                if v != 3 - f {
                    union(&mut parent, 4 * s + v, 4 * tt + p[v]);
                }
            }
        }
    }
    dense(&mut parent)
}

fn dense(parent: &mut [usize]) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; parent.len()];
    let mut out = Vec::with_capacity(parent.len());
    let mut count = 0;
    for x in 0..parent.len() {
        let r = find(parent, x);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        out.push(label[r]);
    }
    (out, count)
}

/// Brute-force incidence: `i[3*tet + slot][class]`, classes labelled by
/// [`edge_orbits`].
pub fn incidence(t: &Table) -> Vec<Vec<i64>> {
    let (labels, ne) = edge_orbits(t);
    let slot = |k: usize| [0, 1, 2, 2, 1, 0][k];
    let mut m = vec![vec![0i64; ne]; 3 * t.len()];
    for s in 0..t.len() {
        for k in 0..6 {
            m[3 * s + slot(k)][labels[6 * s + k]] += 1;
        }
    }
    m
}

/// Rank over ℚ by plain Gaussian elimination on `Rational64`.
pub fn rank_q(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<Rational64>> = m
        .iter()
        .map(|r| r.iter().map(|&x| Rational64::from_integer(x)).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c] / a[r][c];
                for j in 0..cols {
                    let v = a[r][j];
                    a[i][j] -= f * v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Dimension of the rational kernel of an integer matrix with `cols` columns.
pub fn nullity_q(m: &[Vec<i64>], cols: usize) -> usize {
    cols - rank_q(m)
}

/// 15-point Gauss–Kronrod rule with its embedded 7-point Gauss estimate.
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const XK: [f64; 8] = [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ];
    const WK: [f64; 8] = [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ];
    const WG: [f64; 4] = [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XK[i];
        let s = f(c - x) + f(c + x);
        k += WK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, (k - g).abs() * h)
}

pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (val, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return val;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, tol / 2.0, depth - 1) + adaptive(f, m, b, tol / 2.0, depth - 1)
}

/// `-∫_0^θ log|2 sin u| du` for `θ ∈ [0, π]`: the logarithmic
/// singularities at 0 and π are integrated in closed form and the smooth
/// remainder `log(sin u / (u(π-u)))` by adaptive quadrature.
pub fn lobachevsky_quadrature(theta: f64) -> f64 {
    assert!((0.0..=PI).contains(&theta));
    if theta == 0.0 {
        return 0.0;
    }
    let xlogx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    let int_log_u = xlogx(theta) - theta;
    let int_log_pi_minus_u = -xlogx(PI - theta) + (PI - theta) + xlogx(PI) - PI;
    let smooth = |u: f64| {
        let s = if u < PI / 2.0 { u.sin() } else { (PI - u).sin() };
        let den = u * (PI - u);
        if den == 0.0 {
            (1.0 / PI).ln()
        } else {
            (s / den).ln()
        }
    };
    let int_smooth = adaptive(&smooth, 0.0, theta, 1e-15, 30);
    -(theta * 2f64.ln() + int_log_u + int_log_pi_minus_u + int_smooth)
}

/// Reduces to `[0, π)` by oddness and periodicity, then uses the quadrature.
pub fn lobachevsky_oracle(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    lobachevsky_quadrature(t)
}

pub fn rational_one() -> Rational64 {
    Rational64::one()
}

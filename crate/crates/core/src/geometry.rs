//! Angle chart, Lobachevsky function and volume.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gluing::{successor, ShapeAssignment};
use crate::triangulation::Orientation;

/// Dihedral angles per quad, each in `(0, π)`, summing to `π` per tetrahedron.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnglePoint {
    pub x: Vec<f64>,
}

impl AnglePoint {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if !x.len().is_multiple_of(3) {
            return Err(Error::InvalidAngles(format!(
                "{} angles is not a multiple of 3",
                x.len()
            )));
        }
        if let Some(q) = x.iter().position(|&a| !(a > 0.0 && a < PI)) {
            return Err(Error::InvalidAngles(format!("angle at quad {q} outside (0, π)")));
        }
        for (s, tri) in x.chunks(3).enumerate() {
            if (tri.iter().sum::<f64>() - PI).abs() > 1e-12 {
                return Err(Error::InvalidAngles(format!(
                    "angles of tetrahedron {s} do not sum to π"
                )));
            }
        }
        Ok(AnglePoint { x })
    }

    /// The point with all angles `π/3`.
    pub fn equilateral(tets: usize) -> Self {
        AnglePoint {
            x: vec![PI / 3.0; 3 * tets],
        }
    }

    pub fn tet_count(&self) -> usize {
        self.x.len() / 3
    }

    /// A random point with every angle at least `π/60`.
    pub fn random<R: Rng + ?Sized>(tets: usize, rng: &mut R) -> Self {
        let mut x = Vec::with_capacity(3 * tets);
        for _ in 0..tets {
            let w: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.05..1.0));
            let total: f64 = w.iter().sum();
            x.extend(w.iter().map(|v| PI * v / total));
        }
        AnglePoint { x }
    }
}

/// `z(q) = sin x(q') / sin x(q'') · e^{i x(q)}`.
pub fn shapes_from_angles(x: &AnglePoint, orientation: Orientation) -> ShapeAssignment {
    let z = (0..x.x.len())
        .map(|q| {
            let base = 3 * (q / 3);
            let q1 = base + successor(q % 3, orientation);
            let q2 = base + successor(q1 % 3, orientation);
            Complex64::from_polar(x.x[q1].sin() / x.x[q2].sin(), x.x[q])
        })
        .collect();
    ShapeAssignment { z }
}

/// `x(q) = arg z(q)`.
pub fn angles_from_shapes(z: &ShapeAssignment) -> Result<AnglePoint> {
    z.check_positive()?;
    Ok(AnglePoint {
        x: z.z.iter().map(|w| w.arg()).collect(),
    })
}

/// `ζ(s)` for integer `s ≥ 2` by a direct sum with an Euler–Maclaurin tail.
fn zeta(s: i32) -> f64 {
    const K: i32 = 50;
    let sf = s as f64;
    let k = K as f64;
    let head: f64 = (1..=K).rev().map(|j| (j as f64).powi(-s)).sum();
    head + k.powi(1 - s) / (sf - 1.0) - 0.5 * k.powi(-s) + sf * k.powi(-s - 1) / 12.0
        - sf * (sf + 1.0) * (sf + 2.0) * k.powi(-s - 3) / 720.0
}

/// `Σ_{n≥1} ζ(2n) / (n (2n+1)) · (r/π)^{2n}` coefficients, precomputed.
fn series_coefficients() -> &'static [f64; 40] {
    use std::sync::OnceLock;
    static COEFFS: OnceLock<[f64; 40]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut c = [0.0; 40];
        for (i, slot) in c.iter_mut().enumerate() {
            let n = i as i32 + 1;
            let z = match n {
                1 => PI * PI / 6.0,
                2 => PI.powi(4) / 90.0,
                _ => zeta(2 * n),
            };
            *slot = z / (n as f64 * (2 * n + 1) as f64);
        }
        c
    })
}

/// `Λ(θ) = -∫_0^θ log|2 sin u| du`.
///
/// The argument is reduced to `|r| ≤ π/2` by π-periodicity, then
/// `Λ(r) = r - r log|2r| + Σ ζ(2n)/(n(2n+1)) r^{2n+1}/π^{2n}`,
/// whose terms shrink at least by a factor 4.
pub fn lobachevsky(theta: f64) -> f64 {
    let r = theta - PI * (theta / PI).round();
    if r == 0.0 {
        return 0.0;
    }
    let u = (r / PI) * (r / PI);
    let mut sum = 0.0;
    for &c in series_coefficients().iter().rev() {
        sum = (sum + c) * u;
    }
    r - r * (2.0 * r).abs().ln() + r * sum
}

/// `Λ(θ)` from the Fourier series `½ Σ sin(2nθ)/n²`, truncated after `10⁴`
/// terms with a two-term summation-by-parts tail. Accurate away from
/// multiples of π; used as an independent cross-check of [`lobachevsky`].
pub fn lobachevsky_fourier(theta: f64) -> f64 {
    const N: usize = 10_000;
    let t = theta.rem_euclid(PI);
    let s = t.sin();
    if s.abs() < 1e-300 {
        return 0.0;
    }
    let mut sum = 0.0;
    for n in (1..=N).rev() {
        let nf = n as f64;
        sum += (2.0 * nf * t).sin() / (nf * nf);
    }
    let b = |n: f64| 1.0 / (n * n);
    let n1 = (N + 1) as f64;
    let c = b(n1) - b(n1 + 1.0);
    let tail =
        ((2.0 * N as f64 + 1.0) * t).cos() * b(n1) / (2.0 * s) + ((2.0 * N as f64 + 2.0) * t).sin() * c / (4.0 * s * s);
    0.5 * (sum + tail)
}

/// `F(x) = Σ_q Λ(x(q))`.
pub fn volume(x: &AnglePoint) -> f64 {
    x.x.iter().map(|&a| lobachevsky(a)).sum()
}

/// Diagonal of the Hessian of [`volume`]: `-cot x(q)`.
pub fn hessian_volume(x: &AnglePoint) -> Vec<f64> {
    x.x.iter().map(|&a| -1.0 / a.tan()).collect()
}

/// `wᵀ Hess w`.
pub fn hessian_form(x: &AnglePoint, w: &[f64]) -> f64 {
    hessian_volume(x).iter().zip(w).map(|(h, v)| h * v * v).sum()
}

/// Directional derivative of [`volume`]: `-Σ_q w(q) log|2 sin x(q)|`.
pub fn volume_gradient(x: &AnglePoint, w: &[f64]) -> f64 {
    -x.x.iter()
        .zip(w)
        .map(|(&a, &v)| v * (2.0 * a.sin()).abs().ln())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        assert!((zeta(4) - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((zeta(6) - PI.powi(6) / 945.0).abs() < 1e-15);
    }

    #[test]
    fn lobachevsky_basic() {
        assert_eq!(lobachevsky(0.0), 0.0);
        assert!(lobachevsky(PI).abs() < 1e-15);
        assert!((lobachevsky(-0.4) + lobachevsky(0.4)).abs() < 1e-15);
        assert!((3.0 * lobachevsky(PI / 3.0) - 1.0149416064096536).abs() < 1e-14);
    }

    #[test]
    fn fourier_agrees_with_series() {
        for k in 1..60 {
            let t = 0.05 + (PI - 0.1) * k as f64 / 60.0;
            assert!((lobachevsky_fourier(t) - lobachevsky(t)).abs() < 1e-11, "θ = {t}");
        }
    }

    #[test]
    fn right_isoceles_shape() {
        let x = AnglePoint::new(vec![PI / 2.0, PI / 4.0, PI / 4.0]).unwrap();
        let z = shapes_from_angles(&x, Orientation::Standard);
        assert!((z.z[0] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(hessian_volume(&x)[0].abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_angles() {
        assert!(AnglePoint::new(vec![1.0, 1.0, 1.0]).is_err());
        assert!(AnglePoint::new(vec![PI, 0.0, 0.0]).is_err());
        assert!(AnglePoint::new(vec![1.0, 1.0]).is_err());
    }
}

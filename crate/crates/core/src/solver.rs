//! Gauss–Newton solving of `(G, H_L)(z) = (u, t)` on positively oriented
//! shapes and continuation along level sets of `G`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gluing::{
    jacobian_g, log_curvature, rank_numeric, QuadIncidence, ShapeAssignment, ShapeConvention, DEFAULT_RANK_TOL,
};
use crate::peripheral::{boundary_map, jacobian_h};
use crate::triangulation::Triangulation;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveTarget {
    pub u: Vec<Complex64>,
    pub t: Vec<Complex64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Convergence threshold on the sup norm of the residual.
    pub tol: f64,
    pub max_iter: usize,
    pub rank_tol: f64,
    pub min_step: f64,
    pub feasibility_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            max_iter: 100,
            rank_tol: DEFAULT_RANK_TOL,
            min_step: 2f64.powi(-40),
            feasibility_tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub residual: f64,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// Preferred-quad values.
    pub preferred: Vec<Complex64>,
    pub z: ShapeAssignment,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub positive: bool,
    pub min_margin: f64,
    pub margins: Vec<f64>,
}

/// `Im z(q) > 0` for every quad, with the imaginary parts as margins.
pub fn positivity_check(z: &[Complex64]) -> PositivityReport {
    let margins: Vec<f64> = z.iter().map(|w| w.im).collect();
    let min_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    PositivityReport {
        positive: margins.iter().all(|&m| m > 0.0),
        min_margin,
        margins,
    }
}

fn sup_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// The map `w ↦ (G, H_L)` over preferred-quad values for a fixed
/// triangulation, shape convention and longitude system.
pub struct LevelSetSystem<'a> {
    pub inc: QuadIncidence,
    pub conv: &'a ShapeConvention,
    pub curves: &'a [Vec<i64>],
}

impl<'a> LevelSetSystem<'a> {
    pub fn new(t: &Triangulation, conv: &'a ShapeConvention, curves: &'a [Vec<i64>]) -> Result<Self> {
        let genus = t.genus_sum();
        if curves.len() != genus {
            return Err(Error::Dimension {
                what: "longitudes (one per unit of link genus)",
                expected: genus,
                got: curves.len(),
            });
        }
        Ok(LevelSetSystem {
            inc: QuadIncidence::new(t),
            conv,
            curves,
        })
    }

    pub fn tets(&self) -> usize {
        self.inc.tets
    }

    pub fn shapes(&self, w: &[Complex64]) -> Result<ShapeAssignment> {
        let z = ShapeAssignment::from_preferred(self.conv, w)?;
        z.check_positive()?;
        Ok(z)
    }

    /// `(G(w), H_L(w))`.
    pub fn evaluate(&self, w: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let z = self.shapes(w)?;
        Ok((log_curvature(&self.inc, &z)?, boundary_map(self.curves, &z)?))
    }

    pub fn residual(&self, w: &[Complex64], target: &SolveTarget) -> Result<DVector<Complex64>> {
        let (g, h) = self.evaluate(w)?;
        Ok(DVector::from_iterator(
            g.len() + h.len(),
            g.iter()
                .zip(&target.u)
                .chain(h.iter().zip(&target.t))
                .map(|(a, b)| a - b),
        ))
    }

    /// Stacked `(dG; dH_L)`, `(|E| + |L|) × |T|`.
    pub fn jacobian(&self, w: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let z = self.shapes(w)?;
        let dg = jacobian_g(&self.inc, self.conv, &z)?;
        let dh = jacobian_h(self.curves, self.conv, &z)?;
        let mut m = DMatrix::zeros(dg.nrows() + dh.nrows(), self.tets());
        m.rows_mut(0, dg.nrows()).copy_from(&dg);
        m.rows_mut(dg.nrows(), dh.nrows()).copy_from(&dh);
        Ok(m)
    }

    fn check_target(&self, target: &SolveTarget, opts: &SolveOptions) -> Result<()> {
        if target.u.len() != self.inc.edges {
            return Err(Error::Dimension {
                what: "target u",
                expected: self.inc.edges,
                got: target.u.len(),
            });
        }
        if target.t.len() != self.curves.len() {
            return Err(Error::Dimension {
                what: "target t",
                expected: self.curves.len(),
                got: target.t.len(),
            });
        }
        let sum: Complex64 = target.u.iter().sum();
        let expected = Complex64::new(0.0, 2.0 * PI * self.tets() as f64);
        if (sum - expected).norm() > opts.feasibility_tol {
            return Err(Error::InfeasibleTarget { sum, tets: self.tets() });
        }
        Ok(())
    }

    /// Least-squares solution of `J δ = b` via QR; `J` has full column rank.
    fn least_squares(
        &self,
        j: &DMatrix<Complex64>,
        b: &DVector<Complex64>,
        opts: &SolveOptions,
    ) -> Result<DVector<Complex64>> {
        let rank = rank_numeric(j, opts.rank_tol);
        if rank < self.tets() {
            return Err(Error::RankDeficientJacobian {
                rank,
                expected: self.tets(),
            });
        }
        let qr = j.clone().qr();
        let rhs = qr.q().adjoint() * b;
        qr.r().solve_upper_triangular(&rhs).ok_or(Error::RankDeficientJacobian {
            rank,
            expected: self.tets(),
        })
    }

    pub fn solve(&self, target: &SolveTarget, start: &[Complex64], opts: &SolveOptions) -> Result<SolveResult> {
        self.check_target(target, opts)?;
        let mut w = start.to_vec();
        let mut r = self.residual(&w, target)?;
        let mut norm = sup_norm(&r);
        let mut trace = vec![IterationRecord {
            iteration: 0,
            residual: norm,
            step: 0.0,
        }];
        for it in 1..=opts.max_iter {
            if norm <= opts.tol {
                return Ok(self.result(w, norm, it - 1, trace));
            }
            let j = self.jacobian(&w)?;
            let delta = self.least_squares(&j, &(-&r), opts)?;
            let r2 = r.norm();
            let mut step = 1.0;
            let mut any_positive = false;
            loop {
                let cand: Vec<Complex64> = w.iter().zip(delta.iter()).map(|(a, d)| a + d * step).collect();
                if cand.iter().all(|c| c.im > 0.0) {
                    any_positive = true;
                    let rc = self.residual(&cand, target)?;
                    if rc.norm() <= (1.0 - 1e-4 * step) * r2 {
                        w = cand;
                        r = rc;
                        norm = sup_norm(&r);
                        break;
                    }
                }
                step *= 0.5;
                if step < opts.min_step {
                    return Err(if any_positive {
                        Error::LineSearchFailed { residual: norm }
                    } else {
                        Error::LeftDomain { last_valid: w }
                    });
                }
            }
            trace.push(IterationRecord {
                iteration: it,
                residual: norm,
                step,
            });
        }
        if norm <= opts.tol {
            return Ok(self.result(w, norm, opts.max_iter, trace));
        }
        Err(Error::MaxIterations {
            iterations: opts.max_iter,
            residual: norm,
        })
    }

    fn result(&self, w: Vec<Complex64>, norm: f64, iterations: usize, trace: Vec<IterationRecord>) -> SolveResult {
        let z = ShapeAssignment::from_preferred(self.conv, &w).expect("positive shapes are nondegenerate");
        SolveResult {
            preferred: w,
            z,
            residual_norm: norm,
            iterations,
            converged: true,
            trace,
        }
    }

    /// Predictor–corrector continuation holding `G = u` and stepping the
    /// holonomy target through `path`.
    pub fn trace(
        &self,
        u: &[Complex64],
        start: &[Complex64],
        path: &[Vec<Complex64>],
        opts: &SolveOptions,
    ) -> Result<Vec<SolveResult>> {
        let mut w = start.to_vec();
        let (_, mut t_prev) = self.evaluate(&w)?;
        let mut out = Vec::with_capacity(path.len());
        for (index, t_next) in path.iter().enumerate() {
            if t_next.len() != self.curves.len() {
                return Err(Error::Dimension {
                    what: "holonomy target",
                    expected: self.curves.len(),
                    got: t_next.len(),
                });
            }
            let j = self.jacobian(&w)?;
            let mut rhs = DVector::zeros(j.nrows());
            for (k, (a, b)) in t_next.iter().zip(&t_prev).enumerate() {
                rhs[self.inc.edges + k] = a - b;
            }
            let delta = self.least_squares(&j, &rhs, opts)?;
            let predicted: Vec<Complex64> = w.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            if predicted.iter().any(|c| c.im.is_nan() || c.im <= 0.0) {
                return Err(Error::LeftDomain { last_valid: w });
            }
            let target = SolveTarget {
                u: u.to_vec(),
                t: t_next.clone(),
            };
            let res = match self.solve(&target, &predicted, opts) {
                Ok(r) => r,
                Err(Error::LeftDomain { .. }) => return Err(Error::LeftDomain { last_valid: w }),
                Err(e @ Error::InfeasibleTarget { .. }) => return Err(e),
                Err(_) => return Err(Error::StepTooLarge { index }),
            };
            let (g, _) = self.evaluate(&res.preferred)?;
            if g.iter().zip(u).any(|(a, b)| (a - b).norm() > 1e-10) {
                return Err(Error::StepTooLarge { index });
            }
            w = res.preferred.clone();
            t_prev = t_next.clone();
            out.push(res);
        }
        Ok(out)
    }
}

/// Solves `(G, H_L)(z) = target` from `start` (preferred-quad values).
pub fn gauss_newton_solve(
    t: &Triangulation,
    conv: &ShapeConvention,
    curves: &[Vec<i64>],
    target: &SolveTarget,
    start: &[Complex64],
    opts: &SolveOptions,
) -> Result<SolveResult> {
    LevelSetSystem::new(t, conv, curves)?.solve(target, start, opts)
}

/// Continuation along `G⁻¹(u)` through the holonomy targets in `path`.
pub fn trace_level_set(
    t: &Triangulation,
    conv: &ShapeConvention,
    curves: &[Vec<i64>],
    u: &[Complex64],
    start: &[Complex64],
    path: &[Vec<Complex64>],
    opts: &SolveOptions,
) -> Result<Vec<SolveResult>> {
    LevelSetSystem::new(t, conv, curves)?.trace(u, start, path, opts)
}

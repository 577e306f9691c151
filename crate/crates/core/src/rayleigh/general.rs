use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::form::{DiscreteProfile, ReducedForm};
use super::mesh::ThetaMesh;
use super::p2::orient_nonnegative;
use crate::error::{HardyError, Result};
use crate::params::ProblemParams;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum InitialProfile {
    Constant,
    /// Uniform values in `[0.5, 1.5]` from a ChaCha8 stream.
    Random {
        seed: u64,
    },
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralOptions {
    /// Stop when the relative change of the quotient stays below `tol` for
    /// five consecutive iterations.
    pub tol: f64,
    pub max_iter: usize,
    pub init: InitialProfile,
}

impl Default for GeneralOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 50_000, init: InitialProfile::Constant }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralResult {
    pub value: f64,
    pub profile: DiscreteProfile,
    pub iterations: usize,
    pub converged: bool,
    /// Number of quadrature points at which a subgradient was used in the final gradient.
    pub nonsmooth_points: usize,
}

const STALL_WINDOW: usize = 5;
const ARMIJO: f64 = 1e-4;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes the reduced quotient for arbitrary `p > 1`.
///
/// Each iteration normalizes the denominator to one, preconditions the
/// gradient with the numerator Hessian frozen at the current profile
/// (Polak-Ribiere+ conjugacy on top) and takes an Armijo backtracking step
/// whose trial length is the inverse of a finite-difference curvature
/// estimate along the search direction.
pub fn minimize_general(params: &ProblemParams, mesh: Arc<ThetaMesh>, opts: &GeneralOptions) -> Result<GeneralResult> {
    let form = ReducedForm::new(params, mesh)?;
    minimize_general_with(&form, opts)
}

pub(crate) fn minimize_general_with(form: &ReducedForm, opts: &GeneralOptions) -> Result<GeneralResult> {
    let mesh = form.mesh().clone();
    let n = mesh.n_nodes();
    let mut x = match &opts.init {
        InitialProfile::Constant => vec![1.0; n],
        InitialProfile::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..n).map(|_| rng.random_range(0.5..1.5)).collect()
        }
        InitialProfile::Given(v) => {
            if v.len() != n {
                return Err(HardyError::Mesh(format!("initial profile has {} values for {n} nodes", v.len())));
            }
            v.clone()
        }
    };
    let q0 = form.quotient(&x)?;
    let s = q0.denominator.powf(-1.0 / form.p());
    x.iter_mut().for_each(|v| *v *= s);

    let grad_at = |x: &[f64]| -> (f64, Vec<f64>, usize) {
        let e = form.evaluate(x);
        let r = e.numerator / e.denominator;
        let g = e.grad_num.iter().zip(&e.grad_den).map(|(gn, gd)| (gn - r * gd) / e.denominator).collect();
        (r, g, e.nonsmooth)
    };
    let value_at = |x: &[f64]| -> f64 {
        let (nm, dn) = form.parts(x);
        if dn > 0.0 {
            nm / dn
        } else {
            f64::INFINITY
        }
    };

    let (mut r, mut g, mut nonsmooth) = grad_at(&x);
    let mut best = (r, x.clone());
    let mut prev_z: Option<(Vec<f64>, Vec<f64>, Vec<f64>)> = None; // (g, z, d)
    let mut quiet = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let precond = form.lagged_matrix(&x);
        let z = precond.solve(&g);
        let z = if z.iter().all(|v| v.is_finite()) { z } else { g.clone() };
        let mut d: Vec<f64> = z.iter().map(|v| -v).collect();
        if let Some((gp, zp, dp)) = &prev_z {
            let denom = dot(gp, zp);
            if denom > 0.0 {
                let beta = ((dot(&g, &z) - dot(&g, zp)) / denom).max(0.0);
                d.iter_mut().zip(dp).for_each(|(di, dpi)| *di += beta * dpi);
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            d = z.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        if !(slope < 0.0) {
            converged = true;
            break;
        }

        // curvature along d by a finite difference of the gradient
        let eps = 1e-7 * norm(&x).max(1e-300) / norm(&d).max(1e-300);
        let probe: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + eps * b).collect();
        let (_, g_probe, _) = grad_at(&probe);
        let curvature = (dot(&g_probe, &d) - slope) / eps;
        let mut alpha = if curvature > 0.0 { -slope / curvature } else { 1.0 };
        if !alpha.is_finite() || alpha <= 0.0 {
            alpha = 1.0;
        }

        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            let rt = value_at(&trial);
            if rt <= r + ARMIJO * alpha * slope {
                accepted = Some((trial, rt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((mut trial, _)) = accepted else {
            // no decrease possible at working precision
            converged = quiet > 0 || slope.abs() < 1e-14 * r.abs();
            break;
        };
        let q = form.quotient(&trial)?;
        let s = q.denominator.powf(-1.0 / form.p());
        trial.iter_mut().for_each(|v| *v *= s);
        let (r_new, g_new, ns) = grad_at(&trial);
        let rel = (r - r_new).abs() / r_new.abs().max(f64::MIN_POSITIVE);
        prev_z = Some((g, z, d));
        x = trial;
        r = r_new;
        g = g_new;
        nonsmooth = ns;
        if r < best.0 {
            best = (r, x.clone());
        }
        if rel < opts.tol {
            quiet += 1;
            if quiet >= STALL_WINDOW {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }

    let (value, mut values) = best;
    orient_nonnegative(&mut values);
    Ok(GeneralResult {
        value,
        profile: DiscreteProfile { mesh, values },
        iterations,
        converged,
        nonsmooth_points: nonsmooth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rayleigh::mesh::{build_mesh, MeshSpec};
    use crate::rayleigh::p2::minimize_p2;

    fn mesh() -> Arc<ThetaMesh> {
        Arc::new(build_mesh(MeshSpec::default()).unwrap())
    }

    #[test]
    fn quasi_spherical_p3_has_constant_minimizer() {
        let params = ProblemParams::new(5, 2, 3.0, 0.0, 1.0, 4.0);
        let r = minimize_general(&params, mesh(), &GeneralOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0 / 27.0).abs() < 1e-6 / 27.0);
        let mean = r.profile.values.iter().sum::<f64>() / r.profile.values.len() as f64;
        assert!(r.profile.values.iter().all(|x| (x - mean).abs() <= 1e-5 * mean));
    }

    #[test]
    fn agrees_with_eigen_solver_for_p2() {
        let m = mesh();
        for params in [ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0), ProblemParams::new(4, 2, 2.0, 1.0, 0.5, 1.7)] {
            let r = minimize_general(&params, m.clone(), &GeneralOptions::default()).unwrap();
            let (v, _) = minimize_p2(&params, m.clone()).unwrap();
            assert!((r.value - v).abs() <= 1e-6 * v, "{} vs {v}", r.value);
        }
    }

    #[test]
    fn random_start_reaches_the_same_minimum() {
        let m = mesh();
        let params = ProblemParams::bottom(4, 2, 3.0, 2.0, 1.0);
        let opts = GeneralOptions::default();
        let a = minimize_general(&params, m.clone(), &opts).unwrap();
        let random = GeneralOptions { init: InitialProfile::Random { seed: DEFAULT_SEED }, ..opts.clone() };
        let b = minimize_general(&params, m, &random).unwrap();
        assert!((a.value - b.value).abs() <= 2.0 * opts.tol * a.value.max(1.0), "{} vs {}", a.value, b.value);
        assert!(a.profile.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn gradient_vanishes_at_minimizer() {
        let m = mesh();
        let params = ProblemParams::new(4, 2, 2.5, 1.0, 0.5, 1.0);
        let r = minimize_general(&params, m.clone(), &GeneralOptions::default()).unwrap();
        let g = crate::rayleigh::form::eval_gradient(&params, &r.profile).unwrap();
        let gmax = g.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        assert!(gmax < 1e-6, "{gmax}");
    }

    #[test]
    fn iteration_cap_is_reported() {
        let params = ProblemParams::bottom(4, 2, 3.0, 2.0, 1.0);
        let opts = GeneralOptions { max_iter: 2, tol: 1e-16, ..GeneralOptions::default() };
        let r = minimize_general(&params, mesh(), &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
    }

    #[test]
    fn given_profile_must_match_mesh() {
        let opts = GeneralOptions { init: InitialProfile::Given(vec![1.0; 3]), ..GeneralOptions::default() };
        assert!(minimize_general(&ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0), mesh(), &opts).is_err());
    }
}

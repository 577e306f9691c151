use std::sync::Arc;

use super::form::{DiscreteProfile, ReducedForm};
use super::mesh::ThetaMesh;
use crate::error::{HardyError, Result};
use crate::params::ProblemParams;
use crate::tridiag::SymTridiag;

const MAX_INVERSE_ITERATIONS: usize = 50;
/// Allowed relative gap between the Rayleigh quotient of the computed
/// eigenvector and the bisected eigenvalue.
const EIGEN_AGREEMENT: f64 = 1e-6;

/// Smallest eigenvalue of the pencil `K - lambda M` by Sylvester-inertia
/// bisection on `[lo, hi]`.
pub(crate) fn smallest_eigenvalue(k: &SymTridiag, m: &SymTridiag, mut lo: f64, mut hi: f64) -> (f64, f64) {
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if k.shifted(mid, m).negative_count() >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Minimizes the `p = 2` reduced quotient over piecewise-linear profiles.
///
/// The discrete problem is the generalized symmetric tridiagonal eigenproblem
/// `K phi = lambda M phi`. The ground-state eigenvalue is isolated by inertia
/// bisection and the eigenprofile recovered by shifted inverse iteration.
/// The profile is nonnegative and normalized to unit denominator.
pub fn minimize_p2(params: &ProblemParams, mesh: Arc<ThetaMesh>) -> Result<(f64, DiscreteProfile)> {
    if (params.p - 2.0).abs() > 1e-12 {
        return Err(HardyError::WrongRegime(format!("minimize_p2 needs p = 2, got {}", params.p)));
    }
    let form = ReducedForm::new(params, mesh.clone())?;
    minimize_p2_with(&form)
}

pub(crate) fn minimize_p2_with(form: &ReducedForm) -> Result<(f64, DiscreteProfile)> {
    let mesh = form.mesh().clone();
    let (k, m) = form.assemble_quadratic();
    let n = mesh.n_nodes();
    if m.diag.iter().any(|&v| !(v > 0.0)) {
        return Err(HardyError::NonConvergence("mass matrix is singular".into()));
    }
    let ones = vec![1.0; n];
    let upper = k.dot(&ones, &ones) / m.dot(&ones, &ones);
    let (lo, hi) = smallest_eigenvalue(&k, &m, 0.0, upper * (1.0 + 1e-12));

    let shifted = k.shifted(lo, &m);
    let mut x = ones;
    let mut value = f64::NAN;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let rhs = m.mul(&x);
        let mut y = shifted.solve(&rhs);
        let scale = m.dot(&y, &y).sqrt();
        if !(scale.is_finite() && scale > 0.0) {
            return Err(HardyError::NonConvergence("inverse iteration broke down".into()));
        }
        y.iter_mut().for_each(|v| *v /= scale);
        let rq = k.dot(&y, &y);
        let change: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let flipped: f64 = x.iter().zip(&y).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        x = y;
        let settled = (rq - value).abs() <= 1e-13 * rq || change.min(flipped) < 1e-10;
        value = rq;
        if settled {
            break;
        }
    }
    if !((value - hi).abs() <= EIGEN_AGREEMENT * hi.abs()) {
        return Err(HardyError::NonConvergence(format!("inverse iteration stalled at {value} (bracket [{lo}, {hi}])")));
    }
    orient_nonnegative(&mut x);
    let q = form.quotient(&x)?;
    let norm = q.denominator.sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    Ok((q.ratio, DiscreteProfile { mesh, values: x }))
}

/// Flips the sign so the mean is positive and clamps round-off undershoot.
pub(crate) fn orient_nonnegative(x: &mut [f64]) {
    let sum: f64 = x.iter().sum();
    if sum < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for v in x.iter_mut() {
        if *v < 0.0 && v.abs() < 1e-14 * scale.max(1.0) {
            *v = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::bottom_constant_p2;
    use crate::rayleigh::form::eval_quotient;
    use crate::rayleigh::mesh::{mesh_at_level, MeshSpec};

    #[test]
    fn sharp_constant_on_fine_mesh() {
        let params = ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0);
        let mesh = Arc::new(mesh_at_level(MeshSpec::default(), 2).unwrap());
        let (v, profile) = minimize_p2(&params, mesh).unwrap();
        assert!((v - bottom_constant_p2(&params).unwrap()).abs() < 1e-3);
        assert!(profile.values.iter().all(|&x| x >= 0.0));
        let q = eval_quotient(&params, &profile).unwrap();
        assert!((q.denominator - 1.0).abs() < 1e-12);
        assert!((q.ratio - v).abs() < 1e-12 * v);
    }

    #[test]
    fn constant_profile_in_quasi_spherical_case() {
        let params = ProblemParams::new(3, 2, 2.0, 1.0, 0.5, 2.5);
        let mesh = Arc::new(mesh_at_level(MeshSpec::default(), 0).unwrap());
        let (v, profile) = minimize_p2(&params, mesh).unwrap();
        assert!((v - 0.5625).abs() < 1e-9);
        let mean = profile.values.iter().sum::<f64>() / profile.values.len() as f64;
        assert!(profile.values.iter().all(|x| (x - mean).abs() < 1e-6 * mean));
    }

    #[test]
    fn plateau_value_decreases_toward_cylindrical_constant() {
        let params = ProblemParams::bottom(3, 2, 2.0, 1.0, 0.2);
        let values: Vec<f64> = (0..4)
            .map(|l| minimize_p2(&params, Arc::new(mesh_at_level(MeshSpec::default(), l).unwrap())).unwrap().0)
            .collect();
        assert!(values.windows(2).all(|w| w[1] <= w[0]));
        assert!(values[3] >= 0.25 && values[3] <= 0.27, "{values:?}");
    }

    #[test]
    fn rejects_other_exponents() {
        let mesh = Arc::new(mesh_at_level(MeshSpec::default(), 0).unwrap());
        assert!(minimize_p2(&ProblemParams::bottom(4, 2, 3.0, 2.0, 1.0), mesh).is_err());
    }
}

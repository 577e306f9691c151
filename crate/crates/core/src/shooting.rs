//! Oscillation test for the reduced Euler–Lagrange equation.
//!
//! For a level `m`, the solution of
//! `-(w G^{(p-2)/2} phi')' + w G^{(p-2)/2} H_b^2 phi = m w sin^{gamma-b-p} phi^{p-1}`,
//! `G = phi'^2 + H_b^2 phi^2`, that is regular at `theta = pi/2` either stays
//! positive on `(0, pi/2]` (then `S >= m`: a positive solution is a
//! supersolution) or has a zero (then `S < m`). The solution is tracked through
//! the Riccati variable `u = theta phi' / phi` in `s = ln theta`, which turns a
//! zero of `phi` into blow-up `u -> +inf` when integrating toward `theta = 0`.
//!
//! Near `theta = 0` the equation becomes autonomous,
//! `(p-1) u' = -(p-1) u^2 - p Lambda_0 u - m_0 |u|^{2-p}` with `m_0 = m` when
//! `gamma = b` and `m_0 = 0` otherwise. Once the non-autonomous terms are
//! negligible, the solution blows up iff it lies above the largest
//! equilibrium, so the verdict is read off from the side of that equilibrium.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::ode::{integrate, OdeOptions, OdeOutcome};
use crate::params::{ProblemParams, REGIME_TOL};

/// Distance from `pi/2` at which the series start is used.
const START_OFFSET: f64 = 1e-3;
const BLOWUP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingVerdict {
    /// `true` when the regular solution has a zero, i.e. `S < m`.
    pub below: bool,
    /// Angle of the zero when blow-up was observed.
    pub zero_at: Option<f64>,
    /// Riccati variable at the end of integration (`+inf` after blow-up).
    pub u_end: f64,
    /// Largest equilibrium of the limit equation (`-inf` if there is none).
    pub threshold: f64,
}

/// Largest equilibrium `u*` of the limit equation at `theta -> 0`.
fn limit_threshold(p: f64, lambda_0: f64, m0: f64) -> f64 {
    if m0 == 0.0 {
        return (-p * lambda_0 / (p - 1.0)).max(0.0);
    }
    // u = -lambda with lambda^{p-1} (p Lambda_0 - (p-1) lambda) = m0;
    // the left side increases on [0, Lambda_0] up to Lambda_0^p.
    if !(lambda_0 > 0.0) || m0 > lambda_0.powf(p) {
        return f64::NEG_INFINITY;
    }
    let g = |l: f64| l.powf(p - 1.0) * (p * lambda_0 - (p - 1.0) * l) - m0;
    let (mut lo, mut hi) = (0.0, lambda_0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    -hi
}

/// Decides whether `S_{b,gamma} < m` by shooting from `theta = pi/2`.
///
/// Needs `k + a > p`: otherwise `t = 0` is a regular endpoint for the
/// energy, every solution tends to a constant there and the verdict would
/// hinge on a flux condition rather than on blow-up.
pub fn oscillation_test(params: &ProblemParams, m: f64) -> Result<ShootingVerdict> {
    params.ensure_admissible()?;
    if !(params.kf() + params.a > params.p) {
        return Err(HardyError::InvalidParams("oscillation test needs k + a > p".into()));
    }
    let gap = params.gamma - params.b;
    if gap < -REGIME_TOL {
        return Err(HardyError::WrongRegime("oscillation test needs gamma >= b".into()));
    }
    if !(m > 0.0) {
        return Err(HardyError::InvalidParams(format!("level must be positive, got {m}")));
    }
    let dc = params.derived_unchecked();
    let p = params.p;
    let h2 = dc.h_b * dc.h_b;
    let hp = dc.h_b.abs().powf(p);
    let alpha = params.num_sin_power();
    let beta = params.cos_power();
    let bottom = gap.abs() <= REGIME_TOL;
    let sigma_pow = if bottom { -p } else { gap - p };

    let rhs = |s: f64, u: f64| -> f64 {
        let th = s.exp();
        let (sn, cs) = th.sin_cos();
        let x = u * u + h2 * th * th;
        let y = (p - 1.0) * u * u + h2 * th * th;
        let tw = alpha * th * cs / sn - beta * th * sn / cs;
        let mass = m * th.powf(p) * sn.powf(sigma_pow) * x.powf(0.5 * (4.0 - p));
        u + (x * (th * th * h2 - (p - 1.0) * u * u - tw * u) - mass) / y
    };

    let theta0 = FRAC_PI_2 - START_OFFSET;
    let c1 = -(hp - m) / ((beta + 1.0) * dc.h_b.abs().powf(p - 2.0));
    let u0 = theta0 * c1 * START_OFFSET;
    let s_end = if bottom { -50.0 } else { -(50.0 / gap).clamp(50.0, 700.0) };
    let threshold = limit_threshold(p, dc.lambda_0, if bottom { m } else { 0.0 });

    let opts = OdeOptions { rtol: 1e-11, atol: 1e-13, initial_step: 1e-5, ..OdeOptions::default() };
    let out = integrate(rhs, theta0.ln(), u0, s_end, &opts, |_, u| u > BLOWUP)?;
    Ok(match out {
        OdeOutcome::Stopped { x, .. } => {
            ShootingVerdict { below: true, zero_at: Some(x.exp()), u_end: f64::INFINITY, threshold }
        }
        OdeOutcome::Finished(u) => ShootingVerdict { below: u > threshold, zero_at: None, u_end: u, threshold },
    })
}

/// Best constant by bisection on the level `m` using [`oscillation_test`],
/// returned as a bracket `(lo, hi)` with `S` in `[lo, hi]`.
pub fn shooting_constant(params: &ProblemParams, upper: f64, tol: f64) -> Result<(f64, f64)> {
    if !(upper > 0.0) {
        return Err(HardyError::InvalidParams(format!("upper bound must be positive, got {upper}")));
    }
    let mut hi = upper;
    if !oscillation_test(params, hi * (1.0 + 1e-12))?.below {
        return Err(HardyError::Inconclusive(format!("no zero at the upper level {upper}")));
    }
    let mut lo = 0.0;
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if oscillation_test(params, mid)?.below {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

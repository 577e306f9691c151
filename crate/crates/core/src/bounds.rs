//! Analytic upper bounds from trial profiles and grid-verified lower-bound
//! certificates from explicit supersolutions.
//!
//! Upper bounds integrate analytic profiles directly (the trial exponent
//! enters the quadrature weight), so they carry no interpolation error.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::params::{ProblemParams, REGIME_TOL};
use crate::quadrature::{beta_moment, theta_weight_integral, QuadratureSpec, WeightedIntegrand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    UpperBoundTrial,
    LowerBoundSupersolution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Witness {
    /// `phi = t^(-lambda)`.
    TrialExponent(f64),
    /// The concentrating family behind `s_delta`.
    Delta(f64),
    /// `alpha`, `epsilon = b / alpha` and the size of the checked `t`-grid.
    Supersolution { alpha: f64, epsilon: f64, grid_points: usize },
    /// Inconclusive search; records how many `alpha` values were tried.
    Searched { alphas_tried: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub value: f64,
    pub witness: Witness,
    pub valid: bool,
}

fn quad() -> QuadratureSpec {
    QuadratureSpec { theta_min: 1e-10, ratio: 1.25, gauss_points: 12 }
}

fn require_gamma_ge_b(params: &ProblemParams) -> Result<()> {
    params.ensure_admissible()?;
    if params.gamma < params.b - REGIME_TOL {
        return Err(HardyError::WrongRegime(format!(
            "trial bounds need gamma >= b, got gamma = {} < b = {}",
            params.gamma, params.b
        )));
    }
    Ok(())
}

/// Reduced quotient of `phi(t) = t^(-lambda)`, an upper bound for the
/// best constant whenever it is finite (`lambda < Lambda_0`).
pub fn trial_power(params: &ProblemParams, lambda: f64) -> Result<f64> {
    require_gamma_ge_b(params)?;
    let dc = params.derived_unchecked();
    if !(lambda < dc.lambda_0) {
        return Err(HardyError::InvalidParams(format!(
            "trial exponent {lambda} must be below Lambda_0 = {}",
            dc.lambda_0
        )));
    }
    let p = params.p;
    let beta = params.cos_power();
    let h2 = dc.h_b * dc.h_b;
    let numerator = if lambda == 0.0 {
        dc.h_b.abs().powf(p) * beta_moment(params.num_sin_power(), beta)?
    } else {
        let l2 = lambda * lambda;
        let f = |th: f64| {
            let (s, c) = th.sin_cos();
            (l2 * c * c + h2 * s * s).powf(0.5 * p)
        };
        theta_weight_integral(&WeightedIntegrand::new(params.num_sin_power() - p * lambda - p, beta, f), &quad())?
    };
    let denominator = beta_moment(params.den_sin_power() - p * lambda, beta)?;
    Ok(numerator / denominator)
}

/// `s_delta(b)`: the quotient of the profile family concentrating at `t = 0`
/// with rate `delta`; an upper bound for the bottom-case constant.
pub fn s_delta_bound(params: &ProblemParams, delta: f64) -> Result<f64> {
    params.ensure_admissible()?;
    if (params.gamma - params.b).abs() > REGIME_TOL {
        return Err(HardyError::WrongRegime("s_delta is defined for gamma = b".into()));
    }
    if !(delta > 0.0) {
        return Err(HardyError::InvalidParams(format!("delta must be positive, got {delta}")));
    }
    let dc = params.derived_unchecked();
    let p = params.p;
    let l2 = (dc.lambda_0 - delta).powi(2);
    let h2 = dc.h_b * dc.h_b;
    let alpha = p * delta - 1.0;
    let beta = params.cos_power();
    let f = |th: f64| {
        let (s, c) = th.sin_cos();
        (l2 * c * c + h2 * s * s).powf(0.5 * p)
    };
    let numerator = theta_weight_integral(&WeightedIntegrand::new(alpha, beta, f), &quad())?;
    Ok(numerator / beta_moment(alpha, beta)?)
}

/// Smallest `s_delta_bound` over `deltas`, with the minimizing `delta`.
pub fn min_s_delta(params: &ProblemParams, deltas: &[f64]) -> Result<Certificate> {
    let mut best: Option<(f64, f64)> = None;
    for &delta in deltas {
        let v = s_delta_bound(params, delta)?;
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, delta));
        }
    }
    let (value, delta) = best.ok_or_else(|| HardyError::InvalidParams("empty delta grid".into()))?;
    Ok(Certificate { kind: CertificateKind::UpperBoundTrial, value, witness: Witness::Delta(delta), valid: true })
}

/// Smallest `trial_power` over `lambdas`, with the minimizing exponent.
pub fn min_trial_power(params: &ProblemParams, lambdas: &[f64]) -> Result<Certificate> {
    let mut best: Option<(f64, f64)> = None;
    for &lambda in lambdas {
        let v = trial_power(params, lambda)?;
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, lambda));
        }
    }
    let (value, lambda) = best.ok_or_else(|| HardyError::InvalidParams("empty exponent grid".into()))?;
    Ok(Certificate {
        kind: CertificateKind::UpperBoundTrial,
        value,
        witness: Witness::TrialExponent(lambda),
        valid: true,
    })
}

/// Left-hand side of the supersolution inequality for
/// `Phi = t^(-Lambda_0) (1 + (alpha^2 + 2 alpha) t^2)^(1/2)`-type profiles;
/// nonnegativity on `(0, 1]` means `Phi` is a supersolution at level `Lambda_0^p`.
pub fn supersolution_bracket(params: &ProblemParams, alpha: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(HardyError::InvalidParams(format!("t must lie in (0, 1], got {t}")));
    }
    if !(alpha >= 0.0) {
        return Err(HardyError::InvalidParams(format!("alpha must be nonnegative, got {alpha}")));
    }
    let dc = params.derived()?;
    if !(dc.lambda_0 > 0.0) {
        return Err(HardyError::InvalidParams("supersolution bracket needs k + a > p".into()));
    }
    Ok(bracket_unchecked(params, dc.lambda_0, alpha, t))
}

fn bracket_unchecked(params: &ProblemParams, lambda_0: f64, alpha: f64, t: f64) -> f64 {
    let p = params.p;
    let b = params.b;
    let q = alpha * alpha + 2.0 * alpha;
    let t2 = t * t;
    let base = 1.0 + q * t2;
    let f = base.powf(0.5 * (p - 2.0));
    let c = (params.df() - params.kf() - b) * alpha - b - lambda_0 * (p - 1.0) * alpha * alpha;
    lambda_0 * (f - 1.0 - (p - 2.0) * alpha * f * t2)
        + (c * f + (p - 2.0) * q * base.powf(0.5 * (p - 4.0)) * (1.0 - t2)) * t2
}

/// 50 logarithmically spaced values in `[1e-4, 1]`.
pub fn default_alpha_grid() -> Vec<f64> {
    log_grid(1e-4, 1.0, 50)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (l, h) = (lo.ln(), hi.ln());
    (0..n).map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Uniform grid `t_i = i / n`, `i = 1..=n`.
pub fn uniform_t_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / n as f64).collect()
}

/// The default 10 000-point grid.
pub fn default_t_grid() -> Vec<f64> {
    uniform_t_grid(10_000)
}

/// Screening factor: the bracket is additionally checked on a grid this
/// many times finer than the certification grid.
const SCREEN_REFINEMENT: usize = 10;

/// Searches `alpha_grid` for a supersolution certifying `S_{b,b} >= Lambda_0^p`.
///
/// A certificate requires the bracket to be nonnegative at every point of
/// `t_grid` and on the grid refined `10x` between consecutive points
/// (grid-verified, not interval-rigorous). Failure is inconclusive.
pub fn certify_lower_bound(params: &ProblemParams, alpha_grid: &[f64], t_grid: &[f64]) -> Result<Certificate> {
    let dc = params.derived()?;
    if (params.gamma - params.b).abs() > REGIME_TOL {
        return Err(HardyError::WrongRegime("supersolution certificates are for gamma = b".into()));
    }
    if !(dc.lambda_0 > 0.0) {
        return Err(HardyError::InvalidParams("certificate needs k + a > p".into()));
    }
    if !(params.b > 0.0) {
        return Err(HardyError::InvalidParams("certificate needs b > 0 (b = 0 is the cylindrical case)".into()));
    }
    if t_grid.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(HardyError::InvalidParams("t-grid must lie in (0, 1]".into()));
    }
    let level = dc.lambda_0.powf(params.p);
    let nonneg_on = |alpha: f64| -> bool {
        let mut prev = 0.0;
        for &t in t_grid {
            if bracket_unchecked(params, dc.lambda_0, alpha, t) < 0.0 {
                return false;
            }
            let step = (t - prev) / SCREEN_REFINEMENT as f64;
            for j in 1..SCREEN_REFINEMENT {
                if bracket_unchecked(params, dc.lambda_0, alpha, prev + j as f64 * step) < 0.0 {
                    return false;
                }
            }
            prev = t;
        }
        true
    };
    let found = alpha_grid.par_iter().copied().filter(|&a| a >= 0.0).find_first(|&a| nonneg_on(a));
    Ok(match found {
        Some(alpha) => Certificate {
            kind: CertificateKind::LowerBoundSupersolution,
            value: level,
            witness: Witness::Supersolution { alpha, epsilon: params.b / alpha, grid_points: t_grid.len() },
            valid: true,
        },
        None => Certificate {
            kind: CertificateKind::LowerBoundSupersolution,
            value: level,
            witness: Witness::Searched { alphas_tried: alpha_grid.len() },
            valid: false,
        },
    })
}

//! Every constant and threshold that is known in closed form.
//!
//! These serve as fast paths in the solver and as regression oracles for the
//! numerical minimizers.

use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::params::{ProblemParams, Regime, REGIME_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FormulaId {
    QuasiSpherical,
    Cylindrical,
    BottomP2,
    BStarP2,
    LambdaB,
    BStarUpper,
}

impl FormulaId {
    /// Short reference tag for output records.
    pub fn tag(self) -> &'static str {
        match self {
            FormulaId::QuasiSpherical => "eq:quasi_spherical",
            FormulaId::Cylindrical => "eq:cylindrical",
            FormulaId::BottomP2 => "eq:sharp",
            FormulaId::BStarP2 => "eq:b_star",
            FormulaId::LambdaB => "eq:lambda_b",
            FormulaId::BStarUpper => "prop:bstar_upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormValue {
    pub value: f64,
    pub formula_id: FormulaId,
}

fn require_p2(params: &ProblemParams) -> Result<()> {
    if (params.p - 2.0).abs() > REGIME_TOL {
        return Err(HardyError::WrongRegime(format!("closed form needs p = 2, got p = {}", params.p)));
    }
    Ok(())
}

fn require_bottom_defined(params: &ProblemParams) -> Result<()> {
    if params.kf() + params.a <= params.p {
        return Err(HardyError::InvalidParams(format!(
            "k + a = {} must exceed p = {}",
            params.kf() + params.a,
            params.p
        )));
    }
    Ok(())
}

/// `H0 - sqrt(H0^2 - x^2)` without cancellation, for `0 <= x <= H0`.
fn gap_to_circle(h0: f64, x: f64) -> f64 {
    let root = (h0 * h0 - x * x).max(0.0).sqrt();
    x * x / (h0 + root)
}

/// `H_b^p` for the quasi-spherical case `gamma = p + b`.
pub fn quasi_spherical_constant(params: &ProblemParams) -> Result<f64> {
    let regime = params.classify_regime(REGIME_TOL)?;
    if regime != Regime::QuasiSpherical {
        return Err(HardyError::WrongRegime(format!(
            "quasi-spherical formula needs gamma = p + b, regime is {}",
            regime.name()
        )));
    }
    let c = params.derived_unchecked();
    Ok(c.h_b.powf(params.p))
}

/// `Lambda0^p` for the purely cylindrical case `b = gamma = 0`.
pub fn cylindrical_constant(params: &ProblemParams) -> Result<f64> {
    require_bottom_defined(params)?;
    if params.b.abs() > REGIME_TOL || params.gamma.abs() > REGIME_TOL {
        return Err(HardyError::WrongRegime("cylindrical formula needs b = gamma = 0".into()));
    }
    params.ensure_admissible()?;
    Ok(params.derived_unchecked().lambda_0.powf(params.p))
}

/// Borderline exponent for `p = 2`: the smaller root of
/// `b^2 - 4 H0 b + 4 (H0 - Lambda0)^2 = 0`.
pub fn bstar_p2(params: &ProblemParams) -> Result<f64> {
    require_p2(params)?;
    require_bottom_defined(params)?;
    if params.d <= params.k {
        return Err(HardyError::InvalidParams("need d > k".into()));
    }
    let c = params.derived_unchecked();
    Ok(2.0 * gap_to_circle(c.h_0, c.h_0 - c.lambda_0))
}

/// `lambda_b = H0 - sqrt(H0^2 - H_b^2)` for `p = 2` and `b` in `(b_*, 2 H0)`.
pub fn lambda_b_p2(params: &ProblemParams) -> Result<f64> {
    let bstar = bstar_p2(params)?;
    let c = params.derived_unchecked();
    if !(params.b > bstar && params.b < c.p_h0) {
        return Err(HardyError::InvalidParams(format!("lambda_b needs b in ({bstar}, {}), got {}", c.p_h0, params.b)));
    }
    Ok(gap_to_circle(c.h_0, c.h_b))
}

/// Bottom-case constant `S_{b,b}` for `p = 2`: `Lambda0^2` up to `b_*`, then
/// `Lambda0^2 - (sqrt(H0^2 - H_b^2) - (H0 - Lambda0))^2`.
pub fn bottom_constant_p2(params: &ProblemParams) -> Result<f64> {
    let bstar = bstar_p2(params)?;
    let c = params.derived_unchecked();
    if params.b >= c.p_h0 {
        return Err(HardyError::InvalidParams(format!("need b < 2 H0 = {}, got {}", c.p_h0, params.b)));
    }
    let l0 = c.lambda_0;
    if params.b <= bstar {
        return Ok(l0 * l0);
    }
    let lam = gap_to_circle(c.h_0, c.h_b);
    Ok(lam * (2.0 * l0 - lam))
}

/// Upper bound `b_* <= p (H0 - Lambda0) = d - k`.
pub fn bstar_upper_bound(params: &ProblemParams) -> Result<f64> {
    require_bottom_defined(params)?;
    Ok(f64::from(params.d) - f64::from(params.k))
}

/// Closed form for the constant, when one exists.
pub fn known_constant(params: &ProblemParams) -> Result<Option<ClosedFormValue>> {
    let regime = params.classify_regime(REGIME_TOL)?;
    let out = match regime {
        Regime::QuasiSpherical => {
            Some(ClosedFormValue { value: quasi_spherical_constant(params)?, formula_id: FormulaId::QuasiSpherical })
        }
        Regime::Cylindrical => {
            Some(ClosedFormValue { value: cylindrical_constant(params)?, formula_id: FormulaId::Cylindrical })
        }
        Regime::Bottom if (params.p - 2.0).abs() <= REGIME_TOL => {
            Some(ClosedFormValue { value: bottom_constant_p2(params)?, formula_id: FormulaId::BottomP2 })
        }
        _ => None,
    };
    Ok(out)
}

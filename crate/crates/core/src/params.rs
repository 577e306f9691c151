//! Problem parameters `(d, k, p, a, b, gamma)`, their admissibility and the
//! constants derived from them.
//!
//! Coordinates split as `z = (y, x)` with `y` in `R^k` and `x` in `R^(d-k)`.
//! The inequality under study compares
//! `int |y|^a |z|^-b |grad u|^p` against `int |y|^(a-p-b+gamma) |z|^-gamma |u|^p`.

use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};

/// Default absolute tolerance used when classifying regimes.
pub const REGIME_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub d: u32,
    pub k: u32,
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub gamma: f64,
}

/// The three local summability conditions, reported independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    /// `k + a > 0`
    pub cylindrical_weight: bool,
    /// `d + a - p > b`
    pub spherical_weight: bool,
    /// `k + a - p > b - gamma`
    pub denominator_weight: bool,
    /// `d > k >= 1` and `p > 1`, which every other check presumes.
    pub structural: bool,
    pub admissible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    /// `(d + a - p - b) / p`
    pub h_b: f64,
    /// `(d + a - p) / p`
    pub h_0: f64,
    /// `(k + a - p) / p`, the cylindrical Hardy exponent.
    pub lambda_0: f64,
    /// `d + a - p`, the upper end of the admissible `b` range in the bottom case.
    pub p_h0: f64,
    /// `h_b / h_0` (NaN when `h_0 == 0`).
    pub tau_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `gamma < b`: the best constant vanishes.
    Degenerate,
    /// `gamma == b`, `b != 0`.
    Bottom,
    /// `b < gamma`, `gamma != p + b`.
    GeneralAboveBottom,
    /// `gamma == p + b`.
    QuasiSpherical,
    /// `b == gamma == 0`.
    Cylindrical,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Degenerate => "degenerate",
            Regime::Bottom => "bottom",
            Regime::GeneralAboveBottom => "general",
            Regime::QuasiSpherical => "quasi_spherical",
            Regime::Cylindrical => "cylindrical",
        }
    }

    /// Both cylindrical and bottom problems have `gamma == b`.
    pub fn is_bottom_like(self) -> bool {
        matches!(self, Regime::Bottom | Regime::Cylindrical)
    }
}

impl ProblemParams {
    pub fn new(d: u32, k: u32, p: f64, a: f64, b: f64, gamma: f64) -> Self {
        Self { d, k, p, a, b, gamma }
    }

    /// Bottom-case parameters (`gamma = b`).
    pub fn bottom(d: u32, k: u32, p: f64, a: f64, b: f64) -> Self {
        Self::new(d, k, p, a, b, b)
    }

    pub fn with_b(self, b: f64) -> Self {
        Self { b, ..self }
    }

    /// Same dimensions and `a`, with `gamma = b` set to the given value.
    pub fn bottom_at(self, b: f64) -> Self {
        Self { b, gamma: b, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn kf(&self) -> f64 {
        f64::from(self.k)
    }

    pub fn df(&self) -> f64 {
        f64::from(self.d)
    }

    pub fn validate(&self) -> ValidityReport {
        let (d, k) = (self.df(), self.kf());
        let structural = self.d > self.k
            && self.k >= 1
            && self.p > 1.0
            && [self.p, self.a, self.b, self.gamma].iter().all(|v| v.is_finite());
        let cylindrical_weight = k + self.a > 0.0;
        let spherical_weight = d + self.a - self.p > self.b;
        let denominator_weight = k + self.a - self.p > self.b - self.gamma;
        ValidityReport {
            cylindrical_weight,
            spherical_weight,
            denominator_weight,
            structural,
            admissible: structural && cylindrical_weight && spherical_weight && denominator_weight,
        }
    }

    /// Fails with [`HardyError::InvalidParams`] naming every violated condition.
    pub fn ensure_admissible(&self) -> Result<()> {
        let r = self.validate();
        if r.admissible {
            return Ok(());
        }
        let mut why = Vec::new();
        if !r.structural {
            why.push("need d > k >= 1 and p > 1");
        }
        if !r.cylindrical_weight {
            why.push("k + a > 0 fails");
        }
        if !r.spherical_weight {
            why.push("d + a - p > b fails");
        }
        if !r.denominator_weight {
            why.push("k + a - p > b - gamma fails");
        }
        Err(HardyError::InvalidParams(format!("{:?}: {}", self, why.join("; "))))
    }

    pub fn derived(&self) -> Result<DerivedConstants> {
        self.ensure_admissible()?;
        Ok(self.derived_unchecked())
    }

    pub(crate) fn derived_unchecked(&self) -> DerivedConstants {
        let p = self.p;
        let p_h0 = self.df() + self.a - p;
        let h_0 = p_h0 / p;
        let h_b = (p_h0 - self.b) / p;
        DerivedConstants {
            h_b,
            h_0,
            lambda_0: (self.kf() + self.a - p) / p,
            p_h0,
            tau_b: if h_0 != 0.0 { h_b / h_0 } else { f64::NAN },
        }
    }

    pub fn classify_regime(&self, tol: f64) -> Result<Regime> {
        self.ensure_admissible()?;
        let gap = self.gamma - self.b;
        Ok(if gap < -tol {
            Regime::Degenerate
        } else if gap.abs() <= tol {
            if self.b.abs() <= tol && self.gamma.abs() <= tol {
                Regime::Cylindrical
            } else {
                Regime::Bottom
            }
        } else if (gap - self.p).abs() <= tol {
            Regime::QuasiSpherical
        } else {
            Regime::GeneralAboveBottom
        })
    }

    /// Positivity of the best constant: `gamma >= b`.
    pub fn positivity(&self) -> Result<bool> {
        Ok(self.classify_regime(REGIME_TOL)? != Regime::Degenerate)
    }

    /// Exponent of `sin(theta)` in the numerator weight of the reduced quotient.
    pub(crate) fn num_sin_power(&self) -> f64 {
        self.kf() + self.a - 1.0
    }

    /// Exponent of `sin(theta)` in the denominator weight of the reduced quotient.
    pub(crate) fn den_sin_power(&self) -> f64 {
        self.kf() + self.a - 1.0 - self.p + self.gamma - self.b
    }

    /// Exponent of `cos(theta)` shared by both weights.
    pub(crate) fn cos_power(&self) -> f64 {
        f64::from(self.d - self.k) - 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        let r = ProblemParams::new(3, 2, 2.0, 1.0, 1.0, 1.0).validate();
        assert!(r.cylindrical_weight && r.spherical_weight && r.denominator_weight && r.admissible);

        let r = ProblemParams::new(3, 2, 2.0, -2.0, 0.0, 0.0).validate();
        assert!(!r.cylindrical_weight);
        assert!(!r.admissible);

        let r = ProblemParams::new(5, 2, 3.0, 0.0, 1.0, 4.0).validate();
        assert!(r.admissible);
    }

    #[test]
    fn structural_failures_are_reported() {
        assert!(!ProblemParams::new(3, 3, 2.0, 1.0, 0.0, 0.0).validate().admissible);
        assert!(!ProblemParams::new(3, 0, 2.0, 1.0, 0.0, 0.0).validate().admissible);
        assert!(!ProblemParams::new(3, 2, 1.0, 1.0, 0.0, 0.0).validate().admissible);
        let err = ProblemParams::new(3, 3, 2.0, 1.0, 0.0, 0.0).derived().unwrap_err();
        assert!(matches!(err, HardyError::InvalidParams(_)));
    }

    #[test]
    fn boundary_values_rejected() {
        // k + a - p == b - gamma exactly
        assert!(!ProblemParams::new(4, 2, 2.0, 2.0, 2.0, 0.0).validate().admissible);
        // d + a - p == b exactly
        assert!(!ProblemParams::new(3, 2, 2.0, 1.0, 2.0, 4.0).validate().admissible);
    }

    #[test]
    fn derived_examples() {
        let c = ProblemParams::new(3, 2, 2.0, 1.0, 1.0, 1.0).derived().unwrap();
        assert_eq!(c.h_b, 0.5);
        assert_eq!(c.h_0, 1.0);
        assert_eq!(c.lambda_0, 0.5);
        assert_eq!(c.p_h0, 2.0);
        assert_eq!(c.tau_b, 0.5);

        let c = ProblemParams::new(3, 2, 2.0, 1.0, 0.0, 0.0).derived().unwrap();
        assert_eq!(c.h_b, c.h_0);

        let c = ProblemParams::new(5, 2, 3.0, 0.0, 1.0, 4.0).derived().unwrap();
        assert!((c.h_b - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn regimes() {
        let base = ProblemParams::new(5, 2, 3.0, 0.0, 1.0, 4.0);
        assert_eq!(base.classify_regime(REGIME_TOL).unwrap(), Regime::QuasiSpherical);
        let bottom = ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0);
        assert_eq!(bottom.classify_regime(REGIME_TOL).unwrap(), Regime::Bottom);
        let degenerate = ProblemParams::new(3, 2, 2.0, 1.0, 1.0, 0.5);
        assert_eq!(degenerate.classify_regime(REGIME_TOL).unwrap(), Regime::Degenerate);
        let cyl = ProblemParams::bottom(3, 2, 2.0, 1.0, 0.0);
        assert_eq!(cyl.classify_regime(REGIME_TOL).unwrap(), Regime::Cylindrical);
        let general = ProblemParams::new(3, 2, 2.0, 1.0, 1.0, 1.5);
        assert_eq!(general.classify_regime(REGIME_TOL).unwrap(), Regime::GeneralAboveBottom);
    }

    #[test]
    fn positivity_threshold() {
        let p = ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0);
        assert!(p.positivity().unwrap());
        assert!(!p.with_gamma(0.5).positivity().unwrap());
        let wide = ProblemParams::bottom(4, 2, 2.0, 2.0, 1.0);
        assert!(!wide.with_gamma(0.0).positivity().unwrap());
        assert!(p.with_gamma(3.0).positivity().unwrap());
    }
}

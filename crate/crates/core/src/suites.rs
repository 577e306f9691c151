//! Verification suites: each check reports a measured residual against a
//! tolerance. Shared by the command-line `verify` command and the tests.

use serde::Serialize;

use crate::bounds::{
    certify_lower_bound, default_alpha_grid, default_t_grid, min_trial_power, s_delta_bound, trial_power,
};
use crate::closedform::{bottom_constant_p2, bstar_p2, lambda_b_p2};
use crate::error::{HardyError, Result};
use crate::fullspace::{
    p2_pde_residual, sample_points, scaling_slope, sphere_points, useful_identity_residual, BumpSpec, DEFAULT_SHIFTS,
    FD_STEP,
};
use crate::params::ProblemParams;
use crate::quadrature::{check_useful_iii, check_useful_iii_quadrature, QuadratureSpec};
use crate::rayleigh::RefineOptions;
use crate::solver::{compute_constant, Flag, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    Identities,
    Bounds,
    Scaling,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Bounds => "bounds",
            Suite::Scaling => "scaling",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn at_most(suite: &'static str, name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { suite, name: name.into(), measured, tolerance, passed: measured <= tolerance }
    }

    fn boolean(suite: &'static str, name: impl Into<String>, ok: bool) -> Self {
        Self { suite, name: name.into(), measured: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, passed: ok }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub samples: usize,
    pub seed: u64,
    pub refine: RefineOptions,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { samples: 1_000_000, seed: 20_240_601, refine: RefineOptions::default() }
    }
}

/// `(d, k, tau)` cases for the sphere moment recursion.
pub const USEFUL_III_CASES: [(u32, u32, f64); 12] = [
    (3, 2, 0.5),
    (3, 2, 2.0),
    (3, 1, 1.5),
    (4, 2, 1.0),
    (4, 2, 3.0),
    (4, 3, -0.5),
    (5, 2, 0.25),
    (5, 3, 2.5),
    (6, 1, 3.5),
    (6, 4, -1.0),
    (7, 3, 4.0),
    (8, 5, 0.75),
];

/// The five `p = 2` bottom configurations `(d, k, a, b)` of the regression.
pub const P2_REFERENCE: [(u32, u32, f64, f64); 5] =
    [(3, 2, 1.0, 1.0), (3, 2, 1.0, 0.5), (4, 2, 1.0, 1.0), (4, 3, 0.5, 1.0), (5, 2, 1.0, 2.0)];

/// `(d, k, p, a, b, gamma)` configurations with `gamma - b` in `{-1, 0, -2}`.
pub const SCALING_CASES: [(u32, u32, f64, f64, f64, f64); 3] =
    [(4, 2, 2.0, 2.0, 1.0, 0.0), (4, 2, 2.0, 2.0, 1.0, 1.0), (4, 2, 2.0, 3.0, 2.0, 0.0)];

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    Ok(match suite {
        Suite::Identities => identities(opts)?,
        Suite::Bounds => bounds(opts)?,
        Suite::Scaling => scaling(opts)?,
        Suite::All => {
            let mut all = identities(opts)?;
            all.extend(bounds(opts)?);
            all.extend(scaling(opts)?);
            all
        }
    })
}

fn identities(opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    const S: &str = "identities";
    let mut out = Vec::new();
    let spec = QuadratureSpec::default();
    for &(d, k, tau) in &USEFUL_III_CASES {
        out.push(CheckResult::at_most(
            S,
            format!("useful_iii d={d} k={k} tau={tau}"),
            check_useful_iii(d, k, tau)?,
            1e-10,
        ));
        out.push(CheckResult::at_most(
            S,
            format!("useful_iii_quadrature d={d} k={k} tau={tau}"),
            check_useful_iii_quadrature(d, k, tau, &spec)?,
            1e-10,
        ));
    }
    for (d, k) in [(3u32, 2u32), (5, 3), (4, 1)] {
        let pts = sphere_points(d, 100, opts.seed ^ u64::from(d * 16 + k));
        out.push(CheckResult::at_most(
            S,
            format!("sphere_gradient d={d} k={k}"),
            useful_identity_residual(k, &pts)?,
            1e-6,
        ));
    }
    for (label, params, lambda) in pde_cases()? {
        let pts = sample_points(params.d, params.k, 50, opts.seed);
        out.push(CheckResult::at_most(
            S,
            format!("p2_pde {label}"),
            p2_pde_residual(&params, lambda, &pts, FD_STEP)?,
            1e-5,
        ));
    }
    Ok(out)
}

/// `(label, params, lambda)` for the PDE identity, including the explicit
/// minimizer exponent `lambda_b` and the threshold pair `(Lambda_0, b_*)`.
pub fn pde_cases() -> Result<Vec<(String, ProblemParams, f64)>> {
    let base = ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0);
    let half = base.bottom_at(0.5);
    let bs = bstar_p2(&base)?;
    let at_bstar = base.bottom_at(bs);
    let lambda_0 = base.derived()?.lambda_0;
    Ok(vec![
        ("lambda_b b=1".into(), base, lambda_b_p2(&base)?),
        ("lambda_b b=0.5".into(), half, lambda_b_p2(&half)?),
        ("lambda=0 b=1".into(), base, 0.0),
        (format!("lambda=Lambda_0 b=b_*={bs:.7}"), at_bstar, lambda_0),
    ])
}

fn bounds(opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    const S: &str = "bounds";
    let mut out = Vec::new();
    for &(d, k, a, b) in &P2_REFERENCE {
        let params = ProblemParams::bottom(d, k, 2.0, a, b);
        let exact = bottom_constant_p2(&params)?;
        let tag = format!("d={d} k={k} a={a} b={b}");
        let trial = trial_power(&params, lambda_b_p2(&params)?)?;
        out.push(CheckResult::at_most(
            S,
            format!("trial_power(lambda_b) = S, {tag}"),
            (trial - exact).abs() / exact,
            1e-7,
        ));
        let worst = [0.02, 0.05, 0.1, 0.2, 0.4]
            .iter()
            .map(|&delta| s_delta_bound(&params, delta).map(|v| exact - v))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(CheckResult::at_most(S, format!("s_delta >= S, {tag}"), worst.max(0.0), 1e-9));

        let est = compute_constant(&params, &SolveOptions { refine: opts.refine.clone(), verify: true })?;
        let rel = (est.extrapolated - exact).abs() / exact;
        out.push(CheckResult::at_most(S, format!("numerical = S, {tag}"), rel, 1e-3));
        out.push(CheckResult::boolean(
            S,
            format!("upper bounds respected, {tag}"),
            est.bound_checks.iter().all(|c| c.satisfied),
        ));
    }

    let plateau_cfg = ProblemParams::bottom(3, 2, 2.0, 1.0, 0.0);
    let l2 = plateau_cfg.derived()?.lambda_0.powi(2);
    for b in [0.0, 0.1, 0.2] {
        let params = plateau_cfg.bottom_at(b);
        let est = compute_constant(&params, &SolveOptions { refine: opts.refine.clone(), verify: true })?;
        let v = est.extrapolated;
        out.push(CheckResult::at_most(
            S,
            format!("plateau window b={b} (value {v:.6})"),
            if v >= l2 { v - l2 } else { f64::INFINITY },
            0.02,
        ));
        out.push(CheckResult::boolean(S, format!("plateau flag b={b}"), est.has_flag(Flag::PossiblyPlateau)));
        out.push(CheckResult::boolean(
            S,
            format!("upper bounds respected b={b}"),
            est.bound_checks.iter().all(|c| c.satisfied),
        ));
    }

    let alphas = default_alpha_grid();
    let ts = default_t_grid();
    let certified = ProblemParams::bottom(4, 2, 2.0, 1.0, 0.025);
    let cert = certify_lower_bound(&certified, &alphas, &ts)?;
    out.push(CheckResult::boolean(S, "supersolution certificate d=4 k=2 a=1 b=0.025", cert.valid));
    let l0 = certified.derived()?.lambda_0;
    let lambdas: Vec<f64> = [0.02, 0.05, 0.1, 0.2, 0.3, 0.5].iter().map(|d| l0 - d).collect();
    let trial = min_trial_power(&certified, &lambdas)?;
    out.push(CheckResult::boolean(S, "sandwich: certificate <= trial bounds", cert.value <= trial.value));
    let refused = ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0);
    let none = certify_lower_bound(&refused, &alphas, &ts)?;
    out.push(CheckResult::boolean(S, "no certificate above b_* (d=3 k=2 a=1 b=1)", !none.valid));
    Ok(out)
}

fn scaling(opts: &SuiteOptions) -> Result<Vec<CheckResult>> {
    const S: &str = "scaling";
    let mut out = Vec::new();
    for &(d, k, p, a, b, gamma) in &SCALING_CASES {
        let params = ProblemParams::new(d, k, p, a, b, gamma);
        let fit = scaling_slope(&params, &BumpSpec::standard(d), &DEFAULT_SHIFTS, opts.samples, opts.seed)?;
        if !fit.slope.is_finite() {
            return Err(HardyError::MonteCarlo("non-finite slope".into()));
        }
        out.push(CheckResult::at_most(
            S,
            format!("slope a={a} b={b} gamma={gamma} (fitted {:.4} +- {:.4})", fit.slope, fit.stderr),
            (fit.slope - (gamma - b)).abs(),
            0.1,
        ));
    }
    Ok(out)
}

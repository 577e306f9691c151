//! User-facing answers: best constants, the threshold `b_*`, and parameter
//! sweeps, each tagged with where the number came from.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{log_grid, s_delta_bound, trial_power};
use crate::closedform::{bstar_p2, bstar_upper_bound, known_constant, FormulaId};
use crate::error::{HardyError, Result};
use crate::params::{ProblemParams, Regime, REGIME_TOL};
use crate::rayleigh::{refine_and_extrapolate, RefineOptions, Refinement};
use crate::shooting::oscillation_test;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    ClosedForm(FormulaId),
    /// `gamma < b`: the constant vanishes.
    Degenerate,
    Numerical,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::ClosedForm(FormulaId::QuasiSpherical) => "closed_form_quasi_spherical",
            Provenance::ClosedForm(FormulaId::Cylindrical) => "closed_form_cylindrical",
            Provenance::ClosedForm(FormulaId::BottomP2) => "closed_form_sharp_p2",
            Provenance::ClosedForm(_) => "closed_form",
            Provenance::Degenerate => "theorem1_degenerate",
            Provenance::Numerical => "numerical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Flag {
    PossiblyPlateau,
    NotConverged,
}

impl Flag {
    pub fn name(self) -> &'static str {
        match self {
            Flag::PossiblyPlateau => "possibly-plateau",
            Flag::NotConverged => "not-converged",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BoundSource {
    /// `Lambda_0^p`, valid in the bottom case.
    Cylindrical,
    /// `H_b^p`, valid for `gamma <= p + b` by monotonicity in `gamma`.
    QuasiSpherical,
    SDelta {
        delta: f64,
    },
    TrialPower {
        lambda: f64,
    },
}

impl BoundSource {
    pub fn label(&self) -> String {
        match self {
            BoundSource::Cylindrical => "cylindrical".into(),
            BoundSource::QuasiSpherical => "quasi_spherical".into(),
            BoundSource::SDelta { delta } => format!("s_delta({delta:.6})"),
            BoundSource::TrialPower { lambda } => format!("trial_power({lambda:.6})"),
        }
    }
}

/// An upper bound on the constant together with whether the estimate
/// respects it: `value <= bound + tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub source: BoundSource,
    pub bound: f64,
    pub tolerance: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub params: ProblemParams,
    pub regime: Regime,
    pub value: f64,
    pub provenance: Provenance,
    /// Per-level values of the numerical minimization (empty when none ran).
    pub levels: Vec<f64>,
    pub extrapolated: f64,
    pub error_indicator: f64,
    pub flags: BTreeSet<Flag>,
    pub bound_checks: Vec<BoundCheck>,
    /// Formula tags used to produce or check the value.
    pub paper_refs: Vec<&'static str>,
}

impl ConstantEstimate {
    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn flag_names(&self) -> Vec<&'static str> {
        self.flags.iter().map(|f| f.name()).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveOptions {
    pub refine: RefineOptions,
    /// Recompute closed-form cases numerically as a cross-check.
    pub verify: bool,
}

/// Fraction of the mass of a concentrating profile that may fall below the
/// finest mesh angle for its upper bound to count as resolvable.
const RESOLVED_MASS: f64 = 1e-6;
/// Analytic bounds are compared with this absolute slack.
const ANALYTIC_SLACK: f64 = 1e-6;

/// Smallest concentration rate `delta` that the mesh down to `theta_min`
/// resolves: `theta_min^(p delta) <= 1e-6`.
pub fn resolvable_delta(p: f64, theta_min: f64) -> f64 {
    RESOLVED_MASS.ln() / (p * theta_min.ln())
}

/// Grid of rates used for `s_delta` and power-trial bounds.
pub fn delta_grid(params: &ProblemParams, theta_min: f64) -> Vec<f64> {
    let lo = resolvable_delta(params.p, theta_min);
    let lambda_0 = params.derived_unchecked().lambda_0;
    let hi = (2.0 * lambda_0).max(4.0 * lo);
    log_grid(lo, hi, 12)
}

fn upper_bounds(params: &ProblemParams, regime: Regime, theta_min: f64) -> Result<Vec<(BoundSource, f64)>> {
    let dc = params.derived_unchecked();
    let p = params.p;
    let mut out = Vec::new();
    let deltas = delta_grid(params, theta_min);
    if regime.is_bottom_like() {
        out.push((BoundSource::Cylindrical, dc.lambda_0.powf(p)));
        for &delta in &deltas {
            out.push((BoundSource::SDelta { delta }, s_delta_bound(params, delta)?));
        }
    } else {
        if params.gamma <= params.b + p + REGIME_TOL {
            out.push((BoundSource::QuasiSpherical, dc.h_b.powf(p)));
        }
        let mut lambdas = vec![0.0];
        lambdas.extend(deltas.iter().map(|d| dc.lambda_0 - d).filter(|&l| l != 0.0));
        for lambda in lambdas {
            out.push((BoundSource::TrialPower { lambda }, trial_power(params, lambda)?));
        }
    }
    Ok(out)
}

fn closed_form_estimate(
    params: &ProblemParams,
    regime: Regime,
    value: f64,
    provenance: Provenance,
    refs: Vec<&'static str>,
) -> ConstantEstimate {
    ConstantEstimate {
        params: *params,
        regime,
        value,
        provenance,
        levels: Vec::new(),
        extrapolated: value,
        error_indicator: 0.0,
        flags: BTreeSet::new(),
        bound_checks: Vec::new(),
        paper_refs: refs,
    }
}

/// Best constant `S_{b,gamma}`.
///
/// Closed forms are used where they exist (`gamma < b`, quasi-spherical,
/// cylindrical, `p = 2` bottom); with `opts.verify` the numerical estimate is
/// attached as a cross-check (`levels`, `extrapolated`, `error_indicator`).
/// Everything else is computed on nested meshes, checked against analytic
/// upper bounds and, in the bottom case, flagged when it may sit on the
/// plateau `Lambda_0^p`.
pub fn compute_constant(params: &ProblemParams, opts: &SolveOptions) -> Result<ConstantEstimate> {
    let regime = params.classify_regime(REGIME_TOL)?;
    if regime == Regime::Degenerate {
        return Ok(closed_form_estimate(params, regime, 0.0, Provenance::Degenerate, vec!["thm:positivity"]));
    }
    let closed = known_constant(params)?;
    if let Some(cf) = closed {
        let est = closed_form_estimate(
            params,
            regime,
            cf.value,
            Provenance::ClosedForm(cf.formula_id),
            vec![cf.formula_id.tag()],
        );
        if !opts.verify {
            return Ok(est);
        }
        let num = numerical_estimate(params, regime, opts)?;
        return Ok(ConstantEstimate {
            levels: num.levels,
            extrapolated: num.extrapolated,
            error_indicator: num.error_indicator,
            flags: num.flags,
            bound_checks: num.bound_checks,
            ..est
        });
    }
    numerical_estimate(params, regime, opts)
}

fn numerical_estimate(params: &ProblemParams, regime: Regime, opts: &SolveOptions) -> Result<ConstantEstimate> {
    let refinement = refine_and_extrapolate(params, &opts.refine)?;
    numerical_from_refinement(params, regime, &refinement)
}

fn numerical_from_refinement(
    params: &ProblemParams,
    regime: Regime,
    refinement: &Refinement,
) -> Result<ConstantEstimate> {
    let dc = params.derived_unchecked();
    let value = refinement.extrapolated;
    let theta_min = refinement.levels.last().map(|l| l.theta_min).unwrap_or(1e-8);
    let bounds = upper_bounds(params, regime, theta_min)?;

    // An estimate above a proven upper bound is wrong by at least the excess.
    let min_bound = bounds.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let error_indicator = refinement.error_indicator.max(value - min_bound);

    let bound_checks = bounds
        .into_iter()
        .map(|(source, bound)| {
            let tolerance = match source {
                BoundSource::Cylindrical => error_indicator,
                _ => ANALYTIC_SLACK,
            };
            BoundCheck { satisfied: value <= bound + tolerance, source, bound, tolerance }
        })
        .collect();

    let mut flags = BTreeSet::new();
    if !refinement.converged {
        flags.insert(Flag::NotConverged);
    }
    let mut refs = vec!["eq:reduced_1d"];
    if regime.is_bottom_like() {
        refs.push("lem:upper_cylindrical");
        let plateau = dc.lambda_0.powf(params.p);
        let near = (value - plateau).abs() <= 10.0 * error_indicator;
        let not_below = oscillation_test(params, plateau).map(|v| !v.below).unwrap_or(false);
        if near || not_below {
            flags.insert(Flag::PossiblyPlateau);
        }
    }
    Ok(ConstantEstimate {
        params: *params,
        regime,
        value,
        provenance: Provenance::Numerical,
        levels: refinement.levels.iter().map(|l| l.value).collect(),
        extrapolated: refinement.extrapolated,
        error_indicator,
        flags,
        bound_checks,
        paper_refs: refs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BStarMethod {
    /// `S(b) < Lambda_0^p` decided by the oscillation test of the
    /// Euler–Lagrange equation at level `Lambda_0^p`.
    Oscillation,
    /// `S_num(b) < Lambda_0^p - margin` on the refined minimizer, with
    /// `margin = max(10 * error_indicator, opts.margin)`.
    RayleighMargin,
}

impl BStarMethod {
    pub fn name(self) -> &'static str {
        match self {
            BStarMethod::Oscillation => "oscillation",
            BStarMethod::RayleighMargin => "rayleigh_margin",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BStarOptions {
    pub method: BStarMethod,
    /// Bisection stops when the bracket is narrower than this.
    pub tol: f64,
    /// Minimum margin for [`BStarMethod::RayleighMargin`].
    pub margin: f64,
    pub refine: RefineOptions,
}

impl Default for BStarOptions {
    fn default() -> Self {
        Self { method: BStarMethod::Oscillation, tol: 1e-4, margin: 0.0, refine: RefineOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BStarEstimate {
    pub params: ProblemParams,
    pub bracket: (f64, f64),
    /// Largest margin used by the predicate (0 for the oscillation test).
    pub margin: f64,
    pub iterations: usize,
    pub closed_form_ref: Option<f64>,
    pub method: BStarMethod,
}

/// Distance kept from the admissibility limit `b < p H_0`.
pub const EPS_CAP: f64 = 0.01;

/// Brackets the threshold `b_*` below which the bottom constant equals
/// `Lambda_0^p`. `gamma` is ignored (set to `b` on every probe).
pub fn compute_bstar(params: &ProblemParams, opts: &BStarOptions) -> Result<BStarEstimate> {
    if params.d <= params.k || params.k == 0 || !(params.p > 1.0) {
        return Err(HardyError::InvalidParams(format!("need d > k >= 1 and p > 1, got {params:?}")));
    }
    if !(params.kf() + params.a > params.p) {
        return Err(HardyError::InvalidParams(format!(
            "b_* needs k + a > p (bottom case undefined): k + a = {}, p = {}",
            params.kf() + params.a,
            params.p
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(HardyError::InvalidParams(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let dc = params.bottom_at(0.0).derived()?;
    let plateau = dc.lambda_0.powf(params.p);
    let cap = dc.p_h0 - EPS_CAP;

    let predicate = |b: f64| -> Result<(bool, f64)> {
        let probe = params.bottom_at(b);
        match opts.method {
            BStarMethod::Oscillation => Ok((oscillation_test(&probe, plateau)?.below, 0.0)),
            BStarMethod::RayleighMargin => {
                let r = refine_and_extrapolate(&probe, &opts.refine)?;
                let margin = (10.0 * r.error_indicator).max(opts.margin);
                Ok((r.extrapolated < plateau - margin, margin))
            }
        }
    };

    let mut margin: f64 = 0.0;
    let mut iterations = 0;
    let (below_lo, m) = predicate(0.0)?;
    margin = margin.max(m);
    iterations += 1;
    if below_lo {
        return Err(HardyError::Inconclusive("predicate already holds at b = 0".into()));
    }
    let mut hi = bstar_upper_bound(params)?.min(cap);
    let (mut below_hi, m) = predicate(hi)?;
    margin = margin.max(m);
    iterations += 1;
    if !below_hi && hi < cap {
        hi = cap;
        let (bh, m) = predicate(hi)?;
        below_hi = bh;
        margin = margin.max(m);
        iterations += 1;
    }
    if !below_hi {
        return Err(HardyError::Inconclusive(format!(
            "no drop below Lambda_0^p = {plateau} detected up to b = {hi} (margin {margin})"
        )));
    }
    let mut lo = 0.0;
    while hi - lo >= opts.tol {
        let mid = 0.5 * (lo + hi);
        let (below, m) = predicate(mid)?;
        margin = margin.max(m);
        iterations += 1;
        if below {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let closed_form_ref = if (params.p - 2.0).abs() <= REGIME_TOL { Some(bstar_p2(params)?) } else { None };
    Ok(BStarEstimate {
        params: params.bottom_at(0.0),
        bracket: (lo, hi),
        margin,
        iterations,
        closed_form_ref,
        method: opts.method,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScanAxis {
    /// Vary `gamma` at fixed `b`.
    Gamma,
    /// Vary `b` at fixed `gamma`.
    B,
    /// Vary `b` with `gamma = b`.
    Bottom,
}

impl ScanAxis {
    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::Gamma => "gamma",
            ScanAxis::B => "b",
            ScanAxis::Bottom => "bottom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub axis: ScanAxis,
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

impl Sweep {
    pub fn points(&self) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(HardyError::InvalidParams("sweep has no points".into()));
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(HardyError::InvalidParams("sweep range must be finite".into()));
        }
        if self.count == 1 {
            return Ok(vec![self.from]);
        }
        if self.from == self.to {
            return Err(HardyError::InvalidParams("empty sweep range".into()));
        }
        let n = (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.from + (self.to - self.from) * i as f64 / n).collect())
    }

    fn apply(&self, template: &ProblemParams, x: f64) -> ProblemParams {
        match self.axis {
            ScanAxis::Gamma => template.with_gamma(x),
            ScanAxis::B => template.with_b(x),
            ScanAxis::Bottom => template.bottom_at(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub index: usize,
    pub x: f64,
    pub params: ProblemParams,
    pub estimate: Option<ConstantEstimate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub sweep: Sweep,
    pub rows: Vec<ScanRow>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Evaluates [`compute_constant`] along a sweep (rows in parallel, merged
/// by index) and appends monotonicity diagnostics.
pub fn scan(template: &ProblemParams, sweep: &Sweep, opts: &SolveOptions) -> Result<ScanResult> {
    let xs = sweep.points()?;
    let rows: Vec<ScanRow> = xs
        .par_iter()
        .enumerate()
        .map(|(index, &x)| {
            let params = sweep.apply(template, x);
            match compute_constant(&params, opts) {
                Ok(est) => ScanRow { index, x, params, estimate: Some(est), error: None },
                Err(e) => ScanRow { index, x, params, estimate: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    let diagnostics = match sweep.axis {
        ScanAxis::Gamma => gamma_diagnostics(&rows),
        ScanAxis::Bottom => bottom_diagnostics(&rows),
        ScanAxis::B => Vec::new(),
    };
    Ok(ScanResult { sweep: *sweep, rows, diagnostics })
}

fn valid_points(rows: &[ScanRow]) -> Vec<(f64, &ConstantEstimate)> {
    rows.iter().filter_map(|r| r.estimate.as_ref().map(|e| (r.x, e))).collect()
}

/// Absolute slack used when comparing closed-form neighbours.
const ROUNDOFF: f64 = 1e-12;

fn gamma_diagnostics(rows: &[ScanRow]) -> Vec<Diagnostic> {
    let pts = valid_points(rows);
    let ei = |e: &ConstantEstimate| e.error_indicator.max(ROUNDOFF);
    let mut worst_drop = 0.0_f64;
    let mut monotone = true;
    for w in pts.windows(2) {
        let (lo, hi) = (w[0].1, w[1].1);
        let drop = lo.value - hi.value;
        worst_drop = worst_drop.max(drop);
        if drop > 2.0 * ei(lo).max(ei(hi)) {
            monotone = false;
        }
    }
    let mut strict = true;
    let mut weakest = f64::INFINITY;
    for w in pts.windows(3) {
        let rise = w[2].1.value - w[0].1.value;
        let tol = 2.0 * w.iter().map(|(_, e)| ei(e)).fold(0.0, f64::max);
        weakest = weakest.min(rise - tol);
        if rise <= tol {
            strict = false;
        }
    }
    vec![
        Diagnostic {
            name: "gamma_non_decreasing".into(),
            passed: monotone,
            detail: format!("largest drop {worst_drop:.3e} (ties allowed within 2 error indicators)"),
        },
        Diagnostic {
            name: "gamma_strict_increase_3pt".into(),
            passed: strict,
            detail: format!("smallest 3-point rise beyond tolerance {weakest:.3e}"),
        },
    ]
}

fn bottom_diagnostics(rows: &[ScanRow]) -> Vec<Diagnostic> {
    let pts = valid_points(rows);
    let ei = |e: &ConstantEstimate| e.error_indicator.max(ROUNDOFF);
    let mut monotone = true;
    let mut worst_rise = 0.0_f64;
    for w in pts.windows(2) {
        let rise = w[1].1.value - w[0].1.value;
        worst_rise = worst_rise.max(rise);
        if rise > 2.0 * ei(w[0].1).max(ei(w[1].1)) {
            monotone = false;
        }
    }
    // S(b2) - S(b2)/H_{b2} (b1 - b2) - tol <= S(b1) <= S(b2) + tol for b2 <= b1
    let mut sandwich = true;
    let mut failures = 0usize;
    let mut pairs = 0usize;
    for (i, &(b2, e2)) in pts.iter().enumerate() {
        for &(b1, e1) in &pts[i + 1..] {
            let (b2, e2, b1, e1) = if b2 <= b1 { (b2, e2, b1, e1) } else { (b1, e1, b2, e2) };
            let tol = 2.0 * ei(e1).max(ei(e2));
            let h_b2 = e2.params.derived_unchecked().h_b;
            let lower = e2.value - e2.value / h_b2 * (b1 - b2) - tol;
            let upper = e2.value + tol;
            pairs += 1;
            if !(lower <= e1.value && e1.value <= upper) {
                sandwich = false;
                failures += 1;
            }
        }
    }
    vec![
        Diagnostic {
            name: "bottom_non_increasing".into(),
            passed: monotone,
            detail: format!("largest rise {worst_rise:.3e}"),
        },
        Diagnostic {
            name: "lipschitz_sandwich".into(),
            passed: sandwich,
            detail: format!("{failures} of {pairs} pairs violate the sandwich"),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SolveOptions {
        SolveOptions { refine: RefineOptions::with_levels(3), verify: false }
    }

    #[test]
    fn provenance_by_regime() {
        let deg = compute_constant(&ProblemParams::new(3, 2, 2.0, 1.0, 1.0, 0.5), &quick()).unwrap();
        assert_eq!((deg.value, deg.provenance), (0.0, Provenance::Degenerate));
        let qs = compute_constant(&ProblemParams::new(3, 2, 2.0, 1.0, 0.5, 2.5), &quick()).unwrap();
        assert_eq!(qs.provenance.name(), "closed_form_quasi_spherical");
        assert!((qs.value - 0.5625).abs() < 1e-14);
        let p2 = compute_constant(&ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0), &quick()).unwrap();
        assert_eq!(p2.provenance.name(), "closed_form_sharp_p2");
        let num = compute_constant(&ProblemParams::bottom(4, 2, 3.0, 2.0, 1.0), &quick()).unwrap();
        assert_eq!(num.provenance, Provenance::Numerical);
        assert!(num.bound_checks.iter().all(|c| c.satisfied));
        assert!(num.value > 0.0 && num.error_indicator >= 0.0);
    }

    #[test]
    fn verify_mode_attaches_numerical_cross_check() {
        let params = ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0);
        let est = compute_constant(&params, &SolveOptions { verify: true, ..quick() }).unwrap();
        assert_eq!(est.levels.len(), 3);
        assert!((est.extrapolated - est.value).abs() < 1e-3);
        assert!(!est.bound_checks.is_empty());
    }

    #[test]
    fn plateau_flag_near_cylindrical_value() {
        let est =
            compute_constant(&ProblemParams::bottom(3, 2, 2.0, 1.0, 0.1), &SolveOptions { verify: true, ..quick() })
                .unwrap();
        assert!(est.has_flag(Flag::PossiblyPlateau));
        assert_eq!(est.flag_names(), vec!["possibly-plateau"]);
    }

    #[test]
    fn bstar_brackets_closed_form() {
        let est = compute_bstar(&ProblemParams::bottom(3, 2, 2.0, 1.0, 0.0), &BStarOptions::default()).unwrap();
        let exact = est.closed_form_ref.unwrap();
        assert!(est.bracket.0 <= exact && exact <= est.bracket.1, "{est:?}");
        assert!(est.bracket.1 - est.bracket.0 < 1e-4);
    }

    #[test]
    fn bstar_needs_singular_endpoint() {
        assert!(compute_bstar(&ProblemParams::bottom(4, 2, 3.0, 1.0, 0.0), &BStarOptions::default()).is_err());
    }

    #[test]
    fn delta_grid_starts_at_resolvable_rate() {
        let params = ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0);
        let g = delta_grid(&params, 1e-8 / 8.0);
        assert_eq!(g.len(), 12);
        assert!((g[0] - resolvable_delta(2.0, 1e-8 / 8.0)).abs() < 1e-15);
        assert!((g[0] - 0.3368).abs() < 1e-3);
    }

    #[test]
    fn sweep_points() {
        let s = Sweep { axis: ScanAxis::Gamma, from: 1.0, to: 2.0, count: 3 };
        assert_eq!(s.points().unwrap(), vec![1.0, 1.5, 2.0]);
        assert!(Sweep { count: 0, ..s }.points().is_err());
        assert!(Sweep { to: 1.0, ..s }.points().is_err());
    }

    #[test]
    fn gamma_scan_is_monotone() {
        let template = ProblemParams::new(4, 2, 2.0, 1.0, 0.5, 0.5);
        let sweep = Sweep { axis: ScanAxis::Gamma, from: 0.5, to: 3.0, count: 6 };
        let res = scan(&template, &sweep, &quick()).unwrap();
        assert_eq!(res.rows.len(), 6);
        assert!(res.rows.iter().enumerate().all(|(i, r)| r.index == i && r.estimate.is_some()));
        assert!(res.diagnostics.iter().all(|d| d.passed), "{:?}", res.diagnostics);
    }
}

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::form::{DiscreteProfile, ReducedForm};
use super::general::{minimize_general_with, GeneralOptions, InitialProfile};
use super::mesh::{mesh_at_level, MeshSpec};
use super::p2::minimize_p2_with;
use crate::error::{HardyError, Result};
use crate::params::ProblemParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineOptions {
    pub levels: u32,
    pub base: MeshSpec,
    pub general: GeneralOptions,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self { levels: 4, base: MeshSpec::default(), general: GeneralOptions::default() }
    }
}

impl RefineOptions {
    pub fn with_levels(levels: u32) -> Self {
        Self { levels, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelResult {
    pub theta_min: f64,
    pub n_cells: usize,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Refinement {
    pub levels: Vec<LevelResult>,
    pub extrapolated: f64,
    pub error_indicator: f64,
    /// Ratio of the last two level differences, when defined.
    pub contraction: Option<f64>,
    pub converged: bool,
    #[serde(skip)]
    pub profile: Option<DiscreteProfile>,
}

/// Largest contraction ratio accepted as geometric convergence.
const MAX_CONTRACTION: f64 = 0.8;

/// Extrapolates a non-increasing sequence of level values.
///
/// With three or more levels the ratio `r` of the last two differences is
/// used: for `0 < r < 0.8` the geometric tail `d r / (1 - r)` is removed
/// (Aitken). Otherwise the sequence is treated as sub-geometric: the last
/// value is kept and the tail estimate `d / (1 - r)` (capped) becomes the error
/// indicator. With two levels second-order convergence is assumed.
pub(crate) fn extrapolate(values: &[f64]) -> (f64, f64, Option<f64>) {
    let n = values.len();
    let last = values[n - 1];
    let d_last = (values[n - 2] - last).max(0.0);
    let floor = 1e-13 * last.abs();
    if n == 2 {
        let corr = d_last / 3.0;
        return (last - corr, d_last.max(floor), None);
    }
    let d_prev = (values[n - 3] - values[n - 2]).max(0.0);
    if d_last <= floor {
        return (last, d_last.max(floor), None);
    }
    let r = d_last / d_prev.max(f64::MIN_POSITIVE);
    if r > 0.0 && r < MAX_CONTRACTION {
        let tail = d_last * r / (1.0 - r);
        (last - tail, d_last.max(floor), Some(r))
    } else {
        let tail = d_last / (1.0 - r.min(0.95));
        (last, tail.max(d_last).max(floor), Some(r))
    }
}

/// Minimizes on `levels` nested meshes and extrapolates the level values.
///
/// Level `l` uses `N * 2^l` cells and `theta_min / 2^l`. For `p = 2` the
/// levels are independent eigenproblems and run in parallel; otherwise each
/// level is warm-started from the prolonged previous minimizer, which keeps
/// the level values non-increasing even when the iteration cap is hit.
pub fn refine_and_extrapolate(params: &ProblemParams, opts: &RefineOptions) -> Result<Refinement> {
    if opts.levels < 2 {
        return Err(HardyError::InvalidParams(format!("need at least 2 refinement levels, got {}", opts.levels)));
    }
    params.ensure_admissible()?;
    let meshes = (0..opts.levels).map(|l| mesh_at_level(opts.base, l).map(Arc::new)).collect::<Result<Vec<_>>>()?;

    let mut results: Vec<(LevelResult, DiscreteProfile)> = Vec::with_capacity(meshes.len());
    if (params.p - 2.0).abs() <= 1e-12 {
        let solved: Vec<Result<(LevelResult, DiscreteProfile)>> = meshes
            .par_iter()
            .map(|mesh| {
                let form = ReducedForm::new(params, mesh.clone())?;
                let (value, profile) = minimize_p2_with(&form)?;
                let spec = mesh.spec();
                Ok((
                    LevelResult {
                        theta_min: spec.theta_min,
                        n_cells: spec.n_cells,
                        value,
                        iterations: 1,
                        converged: true,
                    },
                    profile,
                ))
            })
            .collect();
        for r in solved {
            results.push(r?);
        }
    } else {
        let mut init = opts.general.init.clone();
        for mesh in &meshes {
            let form = ReducedForm::new(params, mesh.clone())?;
            let level_opts = GeneralOptions { init: init.clone(), ..opts.general.clone() };
            let res = minimize_general_with(&form, &level_opts)?;
            let spec = mesh.spec();
            init = InitialProfile::Given(mesh.prolong(&res.profile.values));
            results.push((
                LevelResult {
                    theta_min: spec.theta_min,
                    n_cells: spec.n_cells,
                    value: res.value,
                    iterations: res.iterations,
                    converged: res.converged,
                },
                res.profile,
            ));
        }
    }

    let values: Vec<f64> = results.iter().map(|(l, _)| l.value).collect();
    let (extrapolated, error_indicator, contraction) = extrapolate(&values);
    let converged = results.iter().all(|(l, _)| l.converged);
    let profile = results.last().map(|(_, p)| p.clone());
    Ok(Refinement {
        levels: results.into_iter().map(|(l, _)| l).collect(),
        extrapolated,
        error_indicator,
        contraction,
        converged,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::bottom_constant_p2;

    #[test]
    fn sharp_constant_after_four_levels() {
        let params = ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0);
        let r = refine_and_extrapolate(&params, &RefineOptions::with_levels(4)).unwrap();
        assert!((r.extrapolated - 0.116025).abs() < 5e-4);
        assert!((r.extrapolated - bottom_constant_p2(&params).unwrap()).abs() < 1e-6);
        assert!(r.levels.windows(2).all(|w| w[1].value <= w[0].value));
        assert_eq!(r.levels.len(), 4);
        assert!(r.levels.windows(2).all(|w| w[1].n_cells == 2 * w[0].n_cells));
    }

    #[test]
    fn quasi_spherical_levels_coincide() {
        let params = ProblemParams::new(3, 2, 2.0, 1.0, 0.5, 2.5);
        let r = refine_and_extrapolate(&params, &RefineOptions::with_levels(3)).unwrap();
        for l in &r.levels {
            assert!((l.value - 0.5625).abs() < 1e-12);
        }
    }

    #[test]
    fn warm_started_levels_are_monotone_for_general_p() {
        let params = ProblemParams::bottom(4, 2, 3.0, 2.0, 1.0);
        let r = refine_and_extrapolate(&params, &RefineOptions::with_levels(3)).unwrap();
        assert!(r.converged);
        assert!(r.levels.windows(2).all(|w| w[1].value <= w[0].value * (1.0 + 1e-12)));
    }

    #[test]
    fn single_level_is_rejected() {
        let params = ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0);
        assert!(refine_and_extrapolate(&params, &RefineOptions::with_levels(1)).is_err());
    }

    #[test]
    fn extrapolation_rules() {
        // geometric with ratio 1/4: exact limit recovered
        let (v, _, r) = extrapolate(&[1.0 + 1.0, 1.0 + 0.25, 1.0 + 0.0625]);
        assert!((v - 1.0).abs() < 1e-12 && (r.unwrap() - 0.25).abs() < 1e-12);
        // sub-geometric: keep last value, inflate error
        let (v, e, _) = extrapolate(&[1.3, 1.2, 1.11]);
        assert_eq!(v, 1.11);
        assert!(e > 0.09);
        let (v, e, _) = extrapolate(&[2.0, 1.3]);
        assert!((v - (1.3 - 0.7 / 3.0)).abs() < 1e-12 && (e - 0.7).abs() < 1e-12);
    }
}

//! Checks in `R^d` that do not reduce to the angular problem: the decay of
//! the quotient of translated bumps when `gamma < b`, the `p = 2` PDE
//! identity for `|y|^-lambda |z|^(lambda - H_b)`, and the spherical gradient
//! identity `|grad_sigma |P sigma||^2 = 1 - |P sigma|^2`.
//!
//! Points are `z = (y, x)` with `y` the first `k` coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HardyError, Result};
use crate::params::ProblemParams;

/// Largest dimension accepted by the Monte Carlo routines.
pub const MAX_DIM: u32 = 8;
/// Samples drawn from one independent random stream.
const CHUNK: usize = 8192;

/// `u(z) = (1 - |z - c|^2 / R^2)^3` on the ball `|z - c| < R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl BumpSpec {
    /// Unit bump centred at `y = 2 e_1`, `x = 0`.
    pub fn standard(d: u32) -> Self {
        let mut center = vec![0.0; d as usize];
        center[0] = 2.0;
        Self { center, radius: 1.0 }
    }

    /// Translations along `x` keep the `y`-part, so one check covers every shift.
    fn check(&self, k: u32) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(HardyError::MonteCarlo(format!("bump radius must be positive, got {}", self.radius)));
        }
        let y_norm = norm(&self.center[..k as usize]);
        if !(y_norm > self.radius) {
            return Err(HardyError::MonteCarlo(format!(
                "bump support touches y = 0 (|y_c| = {y_norm}, R = {})",
                self.radius
            )));
        }
        Ok(())
    }

    /// Value and gradient at offset `w = z - c` from the centre.
    fn eval(&self, w: &[f64]) -> Option<(f64, f64)> {
        let r2 = w.iter().map(|v| v * v).sum::<f64>() / (self.radius * self.radius);
        if r2 >= 1.0 {
            return None;
        }
        let s = 1.0 - r2;
        // |grad u| = 6 |w| s^2 / R^2
        let grad = 6.0 * r2.sqrt() * s * s / self.radius;
        Some((s * s * s, grad))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn check_mc(params: &ProblemParams, bump: &BumpSpec, samples: usize) -> Result<()> {
    params.ensure_admissible()?;
    if params.d > MAX_DIM {
        return Err(HardyError::MonteCarlo(format!("d = {} exceeds the Monte Carlo cap {MAX_DIM}", params.d)));
    }
    if bump.center.len() != params.d as usize {
        return Err(HardyError::MonteCarlo(format!(
            "bump centre has {} coordinates for d = {}",
            bump.center.len(),
            params.d
        )));
    }
    if samples < 2 {
        return Err(HardyError::MonteCarlo("need at least two samples".into()));
    }
    Ok(())
}

/// Offsets `w` uniform in the cube `[-R, R]^d` (flattened, `d` per sample),
/// drawn in chunks from independent ChaCha streams so the result does not
/// depend on threading.
fn offsets(d: usize, radius: f64, samples: usize, seed: u64) -> Vec<f64> {
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let n = CHUNK.min(samples - j * CHUNK);
            (0..n * d).map(|_| rng.random_range(-radius..radius)).collect::<Vec<f64>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

/// Per-sample numerator and denominator integrands of the quotient of
/// `u(. - h z0)`, `z0 = e_{k+1}`.
fn integrands(params: &ProblemParams, bump: &BumpSpec, h: f64, w: &[f64]) -> Vec<(f64, f64)> {
    let k = params.k as usize;
    let p = params.p;
    let den_y = params.a - p - params.b + params.gamma;
    let vol = (2.0 * bump.radius).powi(params.d as i32);
    w.par_chunks_exact(params.d as usize)
        .map(|w| match bump.eval(w) {
            None => (0.0, 0.0),
            Some((u, g)) => {
                let mut z: Vec<f64> = bump.center.iter().zip(w).map(|(c, o)| c + o).collect();
                z[k] += h;
                let y = norm(&z[..k]);
                let r = norm(&z);
                let num = y.powf(params.a) * r.powf(-params.b) * g.powf(p);
                let den = y.powf(den_y) * r.powf(-params.gamma) * u.powf(p);
                (vol * num, vol * den)
            }
        })
        .collect()
}

fn ratio_with_error(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = pairs.len() as f64;
    let mn = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let md = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    if !(md > 0.0) {
        return Err(HardyError::MonteCarlo("denominator estimate vanished".into()));
    }
    let r = mn / md;
    // first-order (delta method) propagation
    let var = pairs.iter().map(|(a, b)| (a - r * b).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((r, (var / n).sqrt() / md))
}

/// Monte Carlo estimate of the full quotient of the bump translated by
/// `h` along the `x`-axis (away from the origin, parallel to `y = 0`).
pub fn mc_quotient(
    params: &ProblemParams,
    bump: &BumpSpec,
    shift_h: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_mc(params, bump, samples)?;
    bump.check(params.k)?;
    let w = offsets(params.d as usize, bump.radius, samples, seed);
    let (value, std_error) = ratio_with_error(&integrands(params, bump, shift_h, &w))?;
    Ok(MonteCarloEstimate { value, std_error, samples, seed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub ratios: Vec<f64>,
    pub h_list: Vec<f64>,
}

const SLOPE_BATCHES: usize = 20;

/// Default translation lengths for [`scaling_slope`]; from `h = 8` on the
/// relative `O(h^-2)` corrections to the power law are below 2%.
pub const DEFAULT_SHIFTS: [f64; 4] = [8.0, 16.0, 32.0, 64.0];

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Least-squares slope of `log ratio(h)` against `log h`, which tends to
/// `gamma - b`. The same sample offsets are reused for every `h` so that the
/// fitted slope is insensitive to sampling noise; the standard error comes
/// from 20 independent batches.
pub fn scaling_slope(
    params: &ProblemParams,
    bump: &BumpSpec,
    h_list: &[f64],
    samples: usize,
    seed: u64,
) -> Result<SlopeFit> {
    if h_list.len() < 4 || h_list.iter().any(|&h| !(h > 0.0)) {
        return Err(HardyError::MonteCarlo("need at least four positive shifts".into()));
    }
    check_mc(params, bump, samples.max(2 * SLOPE_BATCHES))?;
    bump.check(params.k)?;
    let w = offsets(params.d as usize, bump.radius, samples, seed);
    let per_h: Vec<Vec<(f64, f64)>> = h_list.iter().map(|&h| integrands(params, bump, h, &w)).collect();
    let xs: Vec<f64> = h_list.iter().map(|h| h.ln()).collect();

    let fit = |range: std::ops::Range<usize>| -> Result<(f64, Vec<f64>)> {
        let mut logs = Vec::with_capacity(h_list.len());
        let mut ratios = Vec::with_capacity(h_list.len());
        for pairs in &per_h {
            let (r, _) = ratio_with_error(&pairs[range.clone()])?;
            ratios.push(r);
            logs.push(r.ln());
        }
        Ok((ls_slope(&xs, &logs), ratios))
    };
    let (slope, ratios) = fit(0..samples)?;
    let size = samples / SLOPE_BATCHES;
    let batch: Vec<f64> =
        (0..SLOPE_BATCHES).map(|i| fit(i * size..(i + 1) * size).map(|f| f.0)).collect::<Result<_>>()?;
    let mean = batch.iter().sum::<f64>() / batch.len() as f64;
    let var = batch.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (batch.len() - 1) as f64;
    Ok(SlopeFit { slope, stderr: (var / batch.len() as f64).sqrt(), ratios, h_list: h_list.to_vec() })
}

/// Random points in `R^d` with `|z|` in `[0.5, 2]` and `|y| >= 0.2 |z|`.
pub fn sample_points(d: u32, k: u32, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let r = norm(&z);
        if (0.5..=2.0).contains(&r) && norm(&z[..k as usize]) >= 0.2 * r {
            out.push(z);
        }
    }
    out
}

/// Uniform random points on `S^{d-1}` via normalized Gaussians (Box–Muller).
pub fn sphere_points(d: u32, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = move || {
        let u1: f64 = rng.random_range(f64::EPSILON..1.0);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    (0..n)
        .map(|_| {
            let z: Vec<f64> = (0..d).map(|_| gauss()).collect();
            let r = norm(&z);
            z.into_iter().map(|v| v / r).collect()
        })
        .collect()
}

/// Default relative finite-difference step.
pub const FD_STEP: f64 = 1e-4;

/// Maximum relative residual of
///
/// ```text
/// -div(|y|^a |z|^-b grad U) = lambda (2 Lambda_0 - lambda) |y|^(a-2) |z|^-b U
///                             + ((H_b - lambda)^2 - b lambda) |y|^a |z|^(-b-2) U
/// ```
///
/// for `U = |y|^-lambda |z|^(lambda - H_b)` (`p = 2`). The flux is coded
/// analytically and its divergence taken by central differences with step
/// `fd_step * |z|`. The residual is relative to the sum of the magnitudes
/// of the two right-hand terms.
pub fn p2_pde_residual(params: &ProblemParams, lambda: f64, sample_points: &[Vec<f64>], fd_step: f64) -> Result<f64> {
    if (params.p - 2.0).abs() > 1e-12 {
        return Err(HardyError::WrongRegime("PDE identity is stated for p = 2".into()));
    }
    if !(fd_step > 0.0) {
        return Err(HardyError::InvalidParams("finite-difference step must be positive".into()));
    }
    let dc = params.derived()?;
    let (d, k) = (params.d as usize, params.k as usize);
    let (a, b, hb, l0) = (params.a, params.b, dc.h_b, dc.lambda_0);

    let flux = |z: &[f64]| -> Vec<f64> {
        let y2: f64 = z[..k].iter().map(|v| v * v).sum();
        let r2: f64 = z.iter().map(|v| v * v).sum();
        let u = y2.powf(-0.5 * lambda) * r2.powf(0.5 * (lambda - hb));
        let w = y2.powf(0.5 * a) * r2.powf(-0.5 * b);
        (0..d)
            .map(|i| {
                let gy = if i < k { -lambda * z[i] / y2 } else { 0.0 };
                w * u * (gy + (lambda - hb) * z[i] / r2)
            })
            .collect()
    };

    let mut worst: f64 = 0.0;
    for z in sample_points {
        if z.len() != d {
            return Err(HardyError::InvalidParams(format!("sample point has {} coordinates, need {d}", z.len())));
        }
        let r = norm(z);
        let y = norm(&z[..k]);
        let step = fd_step * r;
        if !(y > 10.0 * step) {
            return Err(HardyError::InvalidParams(format!("sample point too close to y = 0 (|y| = {y})")));
        }
        let mut div = 0.0;
        let mut zp = z.clone();
        for i in 0..d {
            zp[i] = z[i] + step;
            let fp = flux(&zp)[i];
            zp[i] = z[i] - step;
            let fm = flux(&zp)[i];
            zp[i] = z[i];
            div += (fp - fm) / (2.0 * step);
        }
        let u = y.powf(-lambda) * r.powf(lambda - hb);
        let t1 = lambda * (2.0 * l0 - lambda) * y.powf(a - 2.0) * r.powf(-b) * u;
        let t2 = ((hb - lambda).powi(2) - b * lambda) * y.powf(a) * r.powf(-b - 2.0) * u;
        let scale = t1.abs() + t2.abs();
        let res = (-div - t1 - t2).abs() / scale.max(f64::MIN_POSITIVE);
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Below this size of `1 - |P sigma|^2` the residual of
/// [`useful_identity_residual`] is measured absolutely.
const IDENTITY_FLOOR: f64 = 1e-3;

/// Maximum residual of `|grad_sigma |P sigma||^2 = 1 - |P sigma|^2` over the
/// samples, with the tangential gradient obtained by projecting a central
/// finite-difference ambient gradient (step `1e-5`). The residual is relative
/// where the right side exceeds `1e-3` and absolute below.
pub fn useful_identity_residual(k: u32, sigma_samples: &[Vec<f64>]) -> Result<f64> {
    const STEP: f64 = 1e-5;
    let k = k as usize;
    let mut worst: f64 = 0.0;
    for s in sigma_samples {
        if k == 0 || s.len() <= k {
            return Err(HardyError::InvalidParams("need 1 <= k < d".into()));
        }
        let n = norm(s);
        if (n - 1.0).abs() > 1e-12 {
            return Err(HardyError::InvalidParams(format!("sample not on the unit sphere (|sigma| = {n})")));
        }
        let t = norm(&s[..k]);
        if !(t > 0.0) {
            return Err(HardyError::InvalidParams("sample lies on y = 0".into()));
        }
        let mut grad = vec![0.0; s.len()];
        let mut sp = s.clone();
        for i in 0..s.len() {
            sp[i] = s[i] + STEP;
            let fp = norm(&sp[..k]);
            sp[i] = s[i] - STEP;
            let fm = norm(&sp[..k]);
            sp[i] = s[i];
            grad[i] = (fp - fm) / (2.0 * STEP);
        }
        let radial: f64 = grad.iter().zip(s).map(|(g, v)| g * v).sum();
        let tangential2: f64 = grad.iter().zip(s).map(|(g, v)| (g - radial * v).powi(2)).sum();
        let rhs = 1.0 - t * t;
        let res = (tangential2 - rhs).abs() / rhs.abs().max(IDENTITY_FLOOR);
        worst = worst.max(res);
    }
    Ok(worst)
}

//! Integration against `sin^alpha(theta) cos^beta(theta)` on `(0, pi/2)`.
//!
//! Both endpoints may carry integrable power singularities. Each half of the
//! interval is split into geometrically graded cells accumulating at its
//! singular end; the innermost cell absorbs the power by the substitution
//! `u = theta^(alpha + 1)`, so the only non-smooth factor disappears before
//! Gauss-Legendre is applied.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{HardyError, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[lo, hi]`.
    pub fn on(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature points on `[lo, hi]` carrying the weight `sin^alpha cos^beta`.
///
/// When `lo == 0` the power `theta^alpha` is absorbed exactly by a change of
/// variable; `alpha` must then exceed `-1`.
pub fn weighted_cell_rule(lo: f64, hi: f64, alpha: f64, beta: f64, gl: &GaussLegendre) -> Vec<(f64, f64)> {
    if lo == 0.0 {
        let e = alpha + 1.0;
        let top = hi.powf(e);
        gl.on(0.0, top)
            .map(|(u, w)| {
                let t = u.powf(1.0 / e);
                let ratio = if t > 0.0 { t.sin() / t } else { 1.0 };
                (t, w / e * ratio.powf(alpha) * t.cos().powf(beta))
            })
            .collect()
    } else {
        gl.on(lo, hi).map(|(t, w)| (t, w * t.sin().powf(alpha) * t.cos().powf(beta))).collect()
    }
}

/// Grading used by [`theta_weight_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub theta_min: f64,
    pub ratio: f64,
    pub gauss_points: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { theta_min: 1e-8, ratio: 1.35, gauss_points: 8 }
    }
}

/// Integrand `sin^alpha(theta) cos^beta(theta) f(theta)` on `(0, pi/2)`.
#[derive(Clone, Copy)]
pub struct WeightedIntegrand<F> {
    pub alpha: f64,
    pub beta: f64,
    pub f: F,
}

impl<F: Fn(f64) -> f64> WeightedIntegrand<F> {
    pub fn new(alpha: f64, beta: f64, f: F) -> Self {
        Self { alpha, beta, f }
    }

    fn check(&self) -> Result<()> {
        if !(self.alpha > -1.0) || !(self.beta > -1.0) {
            return Err(HardyError::Singularity(format!(
                "need alpha > -1 and beta > -1, got ({}, {})",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }
}

/// Cell boundaries `0, theta_min, theta_min*ratio, ..., pi/4`.
fn half_partition(spec: &QuadratureSpec) -> Vec<f64> {
    let mut cuts = vec![0.0, spec.theta_min];
    let mut t = spec.theta_min;
    loop {
        t *= spec.ratio;
        if t >= FRAC_PI_4 {
            break;
        }
        cuts.push(t);
    }
    let n = cuts.len();
    // merge a sliver at the end
    if FRAC_PI_4 - cuts[n - 1] < 0.3 * (cuts[n - 1] - cuts[n - 2]) && n > 2 {
        cuts.pop();
    }
    cuts.push(FRAC_PI_4);
    cuts
}

/// `int_0^{pi/4} sin^alpha cos^beta g` with grading toward 0.
fn graded_half(alpha: f64, beta: f64, g: &dyn Fn(f64) -> f64, spec: &QuadratureSpec, gl: &GaussLegendre) -> f64 {
    let cuts = half_partition(spec);
    cuts.windows(2)
        .map(|c| weighted_cell_rule(c[0], c[1], alpha, beta, gl).into_iter().map(|(t, w)| w * g(t)).sum::<f64>())
        .sum()
}

fn integrate_with(alpha: f64, beta: f64, f: &dyn Fn(f64) -> f64, spec: &QuadratureSpec, n: usize) -> f64 {
    let gl = GaussLegendre::new(n);
    let left = graded_half(alpha, beta, f, spec, &gl);
    let mirrored = |s: f64| f(FRAC_PI_2 - s);
    let right = graded_half(beta, alpha, &mirrored, spec, &gl);
    left + right
}

fn check_spec(spec: &QuadratureSpec) -> Result<()> {
    if !(spec.theta_min > 0.0 && spec.theta_min < 1e-2) || !(spec.ratio > 1.0) || spec.gauss_points == 0 {
        return Err(HardyError::Mesh(format!("bad quadrature spec {spec:?}")));
    }
    Ok(())
}

/// `int_0^{pi/2} sin^alpha cos^beta f`.
pub fn theta_weight_integral<F: Fn(f64) -> f64>(w: &WeightedIntegrand<F>, spec: &QuadratureSpec) -> Result<f64> {
    Ok(theta_weight_integral_estimate(w, spec)?.0)
}

/// Value together with a two-level error indicator (rule with `n` points vs.
/// rule with `n / 2` points).
pub fn theta_weight_integral_estimate<F: Fn(f64) -> f64>(
    w: &WeightedIntegrand<F>,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    w.check()?;
    check_spec(spec)?;
    let fine = integrate_with(w.alpha, w.beta, &w.f, spec, spec.gauss_points);
    let coarse = integrate_with(w.alpha, w.beta, &w.f, spec, spec.gauss_points.div_ceil(2).max(1));
    Ok((fine, (fine - coarse).abs() + 4.0 * f64::EPSILON * fine.abs()))
}

/// `int_0^{pi/2} sin^alpha cos^beta = B((alpha+1)/2, (beta+1)/2) / 2`.
pub fn beta_moment(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > -1.0) || !(beta > -1.0) {
        return Err(HardyError::Singularity(format!("beta moment needs alpha, beta > -1, got ({alpha}, {beta})")));
    }
    let x = 0.5 * (alpha + 1.0);
    let y = 0.5 * (beta + 1.0);
    Ok(0.5 * (ln_gamma(x) + ln_gamma(y) - ln_gamma(x + y)).exp())
}

/// Surface measure `|S^m| = 2 pi^((m+1)/2) / Gamma((m+1)/2)`; `|S^0| = 2`.
pub fn sphere_area(m: u32) -> f64 {
    let h = 0.5 * (f64::from(m) + 1.0);
    2.0 * (h * PI.ln() - ln_gamma(h)).exp()
}

/// `int_{S^(d-1)} |P sigma|^tau d sigma`, where `P` projects onto the first `k` coordinates.
pub fn sphere_moment(d: u32, k: u32, tau: f64) -> Result<f64> {
    if d <= k || k == 0 {
        return Err(HardyError::InvalidParams(format!("need d > k >= 1, got d = {d}, k = {k}")));
    }
    let kf = f64::from(k);
    if !(kf + tau > 0.0) {
        return Err(HardyError::Singularity(format!("|P sigma|^tau integrable iff k + tau > 0, got {}", kf + tau)));
    }
    Ok(sphere_area(k - 1) * sphere_area(d - k - 1) * beta_moment(kf + tau - 1.0, f64::from(d - k) - 1.0)?)
}

/// Same moment computed through [`theta_weight_integral`] rather than Gamma functions.
pub fn sphere_moment_quadrature(d: u32, k: u32, tau: f64, spec: &QuadratureSpec) -> Result<f64> {
    if d <= k || k == 0 {
        return Err(HardyError::InvalidParams(format!("need d > k >= 1, got d = {d}, k = {k}")));
    }
    let kf = f64::from(k);
    let w = WeightedIntegrand::new(kf + tau - 1.0, f64::from(d - k) - 1.0, |_| 1.0);
    Ok(sphere_area(k - 1) * sphere_area(d - k - 1) * theta_weight_integral(&w, spec)?)
}

/// Relative residual of
/// `(k + tau - 2) int |P sigma|^(tau-2) = (d + tau - 2) int |P sigma|^tau`.
pub fn check_useful_iii(d: u32, k: u32, tau: f64) -> Result<f64> {
    useful_iii_residual_with(d, k, tau, |t| sphere_moment(d, k, t))
}

/// As [`check_useful_iii`], with both sphere integrals done by quadrature.
pub fn check_useful_iii_quadrature(d: u32, k: u32, tau: f64, spec: &QuadratureSpec) -> Result<f64> {
    useful_iii_residual_with(d, k, tau, |t| sphere_moment_quadrature(d, k, t, spec))
}

fn useful_iii_residual_with(d: u32, k: u32, tau: f64, moment: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let kf = f64::from(k);
    if !(kf + tau > 2.0) {
        return Err(HardyError::InvalidParams(format!("identity needs k + tau > 2, got {}", kf + tau)));
    }
    let lhs = (kf + tau - 2.0) * moment(tau - 2.0)?;
    let rhs = (f64::from(d) + tau - 2.0) * moment(tau)?;
    Ok((lhs - rhs).abs() / rhs.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        for deg in 0..16 {
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            let got = gl.integrate(-1.0, 1.0, |x| x.powi(deg));
            assert!((got - exact).abs() < 1e-14, "degree {deg}: {got} vs {exact}");
        }
        assert_relative_eq!(GaussLegendre::new(1).integrate(0.0, 2.0, |x| x), 2.0);
    }

    #[test]
    fn theta_integral_examples() {
        let spec = QuadratureSpec::default();
        let one = |_t: f64| 1.0;
        assert_relative_eq!(
            theta_weight_integral(&WeightedIntegrand::new(1.0, 0.0, one), &spec).unwrap(),
            1.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            theta_weight_integral(&WeightedIntegrand::new(0.0, 0.0, one), &spec).unwrap(),
            FRAC_PI_2,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            theta_weight_integral(&WeightedIntegrand::new(2.0, 1.0, one), &spec).unwrap(),
            1.0 / 3.0,
            max_relative = 1e-13
        );
        assert!(matches!(
            theta_weight_integral(&WeightedIntegrand::new(-1.0, 0.0, one), &spec),
            Err(HardyError::Singularity(_))
        ));
        assert!(matches!(
            theta_weight_integral(&WeightedIntegrand::new(0.0, -1.5, one), &spec),
            Err(HardyError::Singularity(_))
        ));
    }

    #[test]
    fn theta_integral_matches_beta_moment_grid() {
        let spec = QuadratureSpec::default();
        for alpha in [-0.9, -0.5, 0.0, 1.0, 3.7] {
            for beta in [-0.5, 0.0, 1.0, 2.0] {
                let q = theta_weight_integral(&WeightedIntegrand::new(alpha, beta, |_| 1.0), &spec).unwrap();
                let exact = beta_moment(alpha, beta).unwrap();
                assert!((q - exact).abs() <= 1e-10 * exact, "({alpha},{beta}): {q} vs {exact}");
            }
        }
    }

    #[test]
    fn error_indicator_bounds_doubling_change() {
        let spec = QuadratureSpec::default();
        let f = |t: f64| (3.0 * t).cos() + t * t;
        let w = WeightedIntegrand::new(0.3, 1.0, f);
        let (v, err) = theta_weight_integral_estimate(&w, &spec).unwrap();
        let doubled = theta_weight_integral(&w, &QuadratureSpec { gauss_points: 16, ..spec }).unwrap();
        assert!((doubled - v).abs() <= err);
    }

    #[test]
    fn beta_moment_examples() {
        assert_relative_eq!(beta_moment(1.0, 0.0).unwrap(), 1.0, max_relative = 1e-13);
        assert_relative_eq!(beta_moment(0.0, 0.0).unwrap(), FRAC_PI_2, max_relative = 1e-13);
        assert_relative_eq!(beta_moment(2.0, 1.0).unwrap(), 1.0 / 3.0, max_relative = 1e-13);
        // int sin^3 = 2/3, int sin^4 = 3 pi / 16
        assert_relative_eq!(beta_moment(3.0, 0.0).unwrap(), 2.0 / 3.0, max_relative = 1e-13);
        assert_relative_eq!(beta_moment(4.0, 0.0).unwrap(), 3.0 * PI / 16.0, max_relative = 1e-13);
        assert!(beta_moment(-1.0, 0.0).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(1), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(2), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(3), 2.0 * PI * PI, max_relative = 1e-14);
    }

    #[test]
    fn sphere_moment_examples() {
        assert_relative_eq!(sphere_moment(3, 2, 0.0).unwrap(), 4.0 * PI, max_relative = 1e-13);
        assert_relative_eq!(sphere_moment(3, 2, 2.0).unwrap(), 8.0 * PI / 3.0, max_relative = 1e-13);
        assert!(sphere_moment(3, 2, -1.9).unwrap().is_finite());
        assert!(matches!(sphere_moment(3, 2, -2.0), Err(HardyError::Singularity(_))));
        // total area of S^(d-1) regardless of the split
        for (d, k) in [(4, 1), (4, 2), (4, 3), (7, 3)] {
            assert_relative_eq!(sphere_moment(d, k, 0.0).unwrap(), sphere_area(d - 1), max_relative = 1e-13);
        }
    }

    #[test]
    fn useful_iii_examples() {
        assert!(check_useful_iii(3, 2, 2.0).unwrap() < 1e-12);
        assert_relative_eq!(2.0 * sphere_moment(3, 2, 0.0).unwrap(), 8.0 * PI, max_relative = 1e-13);
        assert!(check_useful_iii(4, 2, 3.0).unwrap() < 1e-10);
        assert!(check_useful_iii(3, 2, 0.5).unwrap() < 1e-10);
        assert!(matches!(check_useful_iii(3, 2, 0.0), Err(HardyError::InvalidParams(_))));
        assert!(check_useful_iii_quadrature(5, 2, 0.7, &QuadratureSpec::default()).unwrap() < 1e-10);
    }
}

//! Adaptive Dormand–Prince 5(4) integration of scalar ODEs.

use crate::error::{HardyError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub initial_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_steps: 2_000_000, initial_step: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeOutcome {
    /// Reached the end point with this value.
    Finished(f64),
    /// The stop predicate fired at `(x, y)`.
    Stopped { x: f64, y: f64 },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction), stopping
/// early at the first accepted step where `stop(x, y)` holds.
pub fn integrate(
    f: impl Fn(f64, f64) -> f64,
    x0: f64,
    y0: f64,
    x1: f64,
    opts: &OdeOptions,
    stop: impl Fn(f64, f64) -> bool,
) -> Result<OdeOutcome> {
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    let mut h = opts.initial_step.min(span).max(f64::MIN_POSITIVE);
    let (mut x, mut y) = (x0, y0);
    let mut k1 = f(x, y);
    for _ in 0..opts.max_steps {
        let remaining = (x1 - x).abs();
        if remaining <= 1e-14 * span.max(1.0) {
            return Ok(OdeOutcome::Finished(y));
        }
        h = h.min(remaining);
        let hs = dir * h;
        let k2 = f(x + C2 * hs, y + hs * A21 * k1);
        let k3 = f(x + C3 * hs, y + hs * (A31 * k1 + A32 * k2));
        let k4 = f(x + C4 * hs, y + hs * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(x + C5 * hs, y + hs * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = f(x + hs, y + hs * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let y_new = y + hs * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = f(x + hs, y_new);
        let err = hs * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let scale = opts.atol + opts.rtol * y.abs().max(y_new.abs());
        let ratio = (err / scale).abs();
        if ratio.is_finite() && ratio <= 1.0 && y_new.is_finite() {
            x += hs;
            y = y_new;
            k1 = k7;
            if stop(x, y) {
                return Ok(OdeOutcome::Stopped { x, y });
            }
            let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h *= grow;
        } else {
            let shrink = if ratio.is_finite() { (0.9 * ratio.powf(-0.25)).clamp(0.1, 0.5) } else { 0.1 };
            h *= shrink;
            if h < 1e-15 * x.abs().max(1.0) {
                return Err(HardyError::NonConvergence(format!("step size underflow at x = {x}, y = {y}")));
            }
        }
    }
    Err(HardyError::NonConvergence(format!("ODE step budget exhausted at x = {x}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let out = integrate(|_, y| -y, 0.0, 1.0, 3.0, &OdeOptions::default(), |_, _| false).unwrap();
        let OdeOutcome::Finished(y) = out else { panic!() };
        assert_relative_eq!(y, (-3.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn backward_integration_of_riccati() {
        // y' = -y^2, y(0) = 1  =>  y = 1/(1+x), valid for x > -1
        let out = integrate(|_, y| -y * y, 0.0, 1.0, -0.5, &OdeOptions::default(), |_, _| false).unwrap();
        let OdeOutcome::Finished(y) = out else { panic!() };
        assert_relative_eq!(y, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn blowup_is_caught_by_stop_predicate() {
        // y = 1/(1+x) blows up at x = -1
        let out = integrate(|_, y| -y * y, 0.0, 1.0, -2.0, &OdeOptions::default(), |_, y| y > 1e6).unwrap();
        let OdeOutcome::Stopped { x, .. } = out else { panic!("{out:?}") };
        assert!((x + 1.0).abs() < 1e-5);
    }
}

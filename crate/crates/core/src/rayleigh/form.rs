use std::sync::Arc;

use serde::Serialize;

use super::mesh::ThetaMesh;
use crate::error::{HardyError, Result};
use crate::params::ProblemParams;
use crate::quadrature::{weighted_cell_rule, GaussLegendre};
use crate::tridiag::SymTridiag;

/// Nodal values of a continuous piecewise-linear profile `phi(theta)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteProfile {
    #[serde(skip)]
    pub mesh: Arc<ThetaMesh>,
    pub values: Vec<f64>,
}

impl DiscreteProfile {
    pub fn new(mesh: Arc<ThetaMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_nodes() {
            return Err(HardyError::Mesh(format!("profile has {} values for {} nodes", values.len(), mesh.n_nodes())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(HardyError::InvalidParams("profile values must be finite".into()));
        }
        Ok(Self { mesh, values })
    }

    pub fn constant(mesh: Arc<ThetaMesh>, c: f64) -> Self {
        let values = vec![c; mesh.n_nodes()];
        Self { mesh, values }
    }

    /// Samples `f` at the nodes.
    pub fn from_fn(mesh: Arc<ThetaMesh>, f: impl Fn(f64) -> f64) -> Self {
        let values = mesh.nodes().iter().map(|&t| f(t)).collect();
        Self { mesh, values }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuotientBreakdown {
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// Gradient of the quotient with respect to nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub values: Vec<f64>,
    /// Quadrature points where `|phi'|^2 + H_b^2 phi^2` vanished and the
    /// subgradient 0 was used (only relevant for `p < 2`).
    pub nonsmooth_points: usize,
}

#[derive(Debug, Clone)]
struct Cell {
    h: f64,
    /// `(xi, weight)` pairs with `xi` the local coordinate in `[0, 1]`.
    num: Vec<(f64, f64)>,
    den: Vec<(f64, f64)>,
}

/// Precomputed quadrature of the reduced quotient on one mesh:
///
/// numerator   `int sin^(k+a-1) cos^(d-k-1) [phi'^2 + H_b^2 phi^2]^(p/2)`
/// denominator `int sin^(k+a-1-p+gamma-b) cos^(d-k-1) |phi|^p`
#[derive(Debug, Clone)]
pub struct ReducedForm {
    p: f64,
    h2: f64,
    cells: Vec<Cell>,
    mesh: Arc<ThetaMesh>,
}

pub(crate) struct Evaluation {
    pub numerator: f64,
    pub denominator: f64,
    pub grad_num: Vec<f64>,
    pub grad_den: Vec<f64>,
    pub nonsmooth: usize,
}

impl ReducedForm {
    pub const GAUSS_POINTS: usize = 8;

    pub fn new(params: &ProblemParams, mesh: Arc<ThetaMesh>) -> Result<Self> {
        Self::with_rule(params, mesh, Self::GAUSS_POINTS)
    }

    pub fn with_rule(params: &ProblemParams, mesh: Arc<ThetaMesh>, gauss_points: usize) -> Result<Self> {
        params.ensure_admissible()?;
        if params.gamma < params.b {
            return Err(HardyError::WrongRegime("reduced quotient needs gamma >= b".into()));
        }
        let c = params.derived_unchecked();
        let gl = GaussLegendre::new(gauss_points);
        let (an, ad, bc) = (params.num_sin_power(), params.den_sin_power(), params.cos_power());
        let cells = mesh
            .nodes()
            .windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                let h = hi - lo;
                let local = |rule: Vec<(f64, f64)>| rule.into_iter().map(|(t, wt)| ((t - lo) / h, wt)).collect();
                Cell {
                    h,
                    num: local(weighted_cell_rule(lo, hi, an, bc, &gl)),
                    den: local(weighted_cell_rule(lo, hi, ad, bc, &gl)),
                }
            })
            .collect();
        Ok(Self { p: params.p, h2: c.h_b * c.h_b, cells, mesh })
    }

    pub fn mesh(&self) -> &Arc<ThetaMesh> {
        &self.mesh
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.mesh.n_nodes() {
            return Err(HardyError::Mesh(format!(
                "profile has {} values for {} nodes",
                values.len(),
                self.mesh.n_nodes()
            )));
        }
        Ok(())
    }

    pub fn quotient(&self, values: &[f64]) -> Result<QuotientBreakdown> {
        self.check_len(values)?;
        let (numerator, denominator) = self.parts(values);
        if !(denominator > 0.0) {
            return Err(HardyError::ZeroProfile);
        }
        Ok(QuotientBreakdown { numerator, denominator, ratio: numerator / denominator })
    }

    pub(crate) fn parts(&self, values: &[f64]) -> (f64, f64) {
        let (p, h2) = (self.p, self.h2);
        let half_p = 0.5 * p;
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, cell) in self.cells.iter().enumerate() {
            let (va, vb) = (values[i], values[i + 1]);
            let slope = (vb - va) / cell.h;
            let s2 = slope * slope;
            for &(xi, w) in &cell.num {
                let v = va + (vb - va) * xi;
                num += w * (s2 + h2 * v * v).powf(half_p);
            }
            for &(xi, w) in &cell.den {
                let v = va + (vb - va) * xi;
                den += w * v.abs().powf(p);
            }
        }
        (num, den)
    }

    pub(crate) fn evaluate(&self, values: &[f64]) -> Evaluation {
        let n = values.len();
        let (p, h2) = (self.p, self.h2);
        let mut out = Evaluation {
            numerator: 0.0,
            denominator: 0.0,
            grad_num: vec![0.0; n],
            grad_den: vec![0.0; n],
            nonsmooth: 0,
        };
        for (i, cell) in self.cells.iter().enumerate() {
            let (va, vb) = (values[i], values[i + 1]);
            let slope = (vb - va) / cell.h;
            let s2 = slope * slope;
            let (mut ga, mut gb) = (0.0, 0.0);
            for &(xi, w) in &cell.num {
                let v = va + (vb - va) * xi;
                let g = s2 + h2 * v * v;
                if g > 0.0 {
                    let gp = g.powf(0.5 * p - 1.0);
                    out.numerator += w * g * gp;
                    // d/dv_a and d/dv_b of (slope^2 + h2 v^2)^(p/2)
                    let common = w * p * gp;
                    ga += common * (-slope / cell.h + h2 * v * (1.0 - xi));
                    gb += common * (slope / cell.h + h2 * v * xi);
                } else {
                    out.nonsmooth += 1;
                }
            }
            out.grad_num[i] += ga;
            out.grad_num[i + 1] += gb;
            let (mut da, mut db) = (0.0, 0.0);
            for &(xi, w) in &cell.den {
                let v = va + (vb - va) * xi;
                let av = v.abs();
                if av > 0.0 {
                    let apm1 = av.powf(p - 1.0);
                    out.denominator += w * apm1 * av;
                    let common = w * p * apm1 * v.signum();
                    da += common * (1.0 - xi);
                    db += common * xi;
                } else if p < 2.0 {
                    out.nonsmooth += 1;
                }
            }
            out.grad_den[i] += da;
            out.grad_den[i + 1] += db;
        }
        out
    }

    pub fn gradient(&self, values: &[f64]) -> Result<Gradient> {
        self.check_len(values)?;
        let e = self.evaluate(values);
        if !(e.denominator > 0.0) {
            return Err(HardyError::ZeroProfile);
        }
        let r = e.numerator / e.denominator;
        let values = e.grad_num.iter().zip(&e.grad_den).map(|(gn, gd)| (gn - r * gd) / e.denominator).collect();
        Ok(Gradient { values, nonsmooth_points: e.nonsmooth })
    }

    /// Stiffness-like and mass-like matrices of the `p = 2` quotient.
    pub fn assemble_quadratic(&self) -> (SymTridiag, SymTridiag) {
        let n = self.mesh.n_nodes();
        let mut k = SymTridiag::zeros(n);
        let mut m = SymTridiag::zeros(n);
        for (i, cell) in self.cells.iter().enumerate() {
            let inv_h2 = 1.0 / (cell.h * cell.h);
            let (mut k11, mut k12, mut k22) = (0.0, 0.0, 0.0);
            for &(xi, w) in &cell.num {
                let (n1, n2) = (1.0 - xi, xi);
                k11 += w * (inv_h2 + self.h2 * n1 * n1);
                k12 += w * (-inv_h2 + self.h2 * n1 * n2);
                k22 += w * (inv_h2 + self.h2 * n2 * n2);
            }
            k.add_block(i, k11, k12, k22);
            let (mut m11, mut m12, mut m22) = (0.0, 0.0, 0.0);
            for &(xi, w) in &cell.den {
                let (n1, n2) = (1.0 - xi, xi);
                m11 += w * n1 * n1;
                m12 += w * n1 * n2;
                m22 += w * n2 * n2;
            }
            m.add_block(i, m11, m12, m22);
        }
        (k, m)
    }

    /// Numerator Hessian with the nonlinearity frozen at `values`:
    /// `p int w [phi'^2 + H^2 phi^2]^((p-2)/2) (psi_i' psi_j' + H^2 psi_i psi_j)`.
    pub fn lagged_matrix(&self, values: &[f64]) -> SymTridiag {
        let n = self.mesh.n_nodes();
        let mut a = SymTridiag::zeros(n);
        let p = self.p;
        for (i, cell) in self.cells.iter().enumerate() {
            let (va, vb) = (values[i], values[i + 1]);
            let slope = (vb - va) / cell.h;
            let inv_h2 = 1.0 / (cell.h * cell.h);
            let (mut a11, mut a12, mut a22) = (0.0, 0.0, 0.0);
            for &(xi, w) in &cell.num {
                let v = va + (vb - va) * xi;
                let g = slope * slope + self.h2 * v * v;
                let coef = if g > 0.0 { w * p * g.powf(0.5 * p - 1.0) } else { 0.0 };
                let (n1, n2) = (1.0 - xi, xi);
                a11 += coef * (inv_h2 + self.h2 * n1 * n1);
                a12 += coef * (-inv_h2 + self.h2 * n1 * n2);
                a22 += coef * (inv_h2 + self.h2 * n2 * n2);
            }
            a.add_block(i, a11, a12, a22);
        }
        a
    }
}

/// Reduced Rayleigh quotient of the piecewise-linear profile.
pub fn eval_quotient(params: &ProblemParams, profile: &DiscreteProfile) -> Result<QuotientBreakdown> {
    ReducedForm::new(params, profile.mesh.clone())?.quotient(&profile.values)
}

/// Gradient of the quotient with respect to the nodal values.
pub fn eval_gradient(params: &ProblemParams, profile: &DiscreteProfile) -> Result<Gradient> {
    ReducedForm::new(params, profile.mesh.clone())?.gradient(&profile.values)
}

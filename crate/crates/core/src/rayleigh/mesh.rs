use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{HardyError, Result};

/// Grading descriptor: first interior node `theta_min`, `n_cells` cells and
/// the geometric ratio used inside the boundary layer at `theta = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshSpec {
    pub theta_min: f64,
    pub n_cells: usize,
    pub ratio: f64,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self { theta_min: 1e-8, n_cells: 256, ratio: 1.35 }
    }
}

impl MeshSpec {
    pub const MIN_CELLS: usize = 16;
    pub const MAX_THETA_MIN: f64 = 1e-6;

    /// Spec of refinement level `level` (0-based): `n_cells` doubled and
    /// `theta_min` halved per level.
    pub fn at_level(self, level: u32) -> Self {
        let f = 2f64.powi(level as i32);
        Self { theta_min: self.theta_min / f, n_cells: self.n_cells << level, ratio: self.ratio }
    }
}

/// Nodes `0 = theta_0 < theta_1 < ... < theta_N = pi/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaMesh {
    nodes: Vec<f64>,
    spec: MeshSpec,
}

impl ThetaMesh {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spec(&self) -> MeshSpec {
        self.spec
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Bisects every cell. The result contains every node of `self`.
    pub fn refined(&self) -> ThetaMesh {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(FRAC_PI_2);
        ThetaMesh {
            nodes,
            spec: MeshSpec { theta_min: 0.5 * self.spec.theta_min, n_cells: 2 * self.spec.n_cells, ..self.spec },
        }
    }

    /// Interpolates nodal values of a profile on `self` onto `self.refined()`.
    pub fn prolong(&self, values: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * values.len() - 1);
        for w in values.windows(2) {
            out.push(w[0]);
            out.push(0.5 * (w[0] + w[1]));
        }
        out.push(*values.last().expect("non-empty profile"));
        out
    }
}

/// Geometric cells of ratio `spec.ratio` from `theta_min` up to a crossover
/// angle, then uniform cells of matching width up to `pi/2`. The crossover is
/// chosen so that exactly `n_cells` cells result; if even a purely geometric
/// mesh needs more cells than that, the ratio is enlarged instead.
pub fn build_mesh(spec: MeshSpec) -> Result<ThetaMesh> {
    if spec.n_cells < MeshSpec::MIN_CELLS {
        return Err(HardyError::Mesh(format!("need at least {} cells, got {}", MeshSpec::MIN_CELLS, spec.n_cells)));
    }
    if !(spec.theta_min > 0.0 && spec.theta_min <= MeshSpec::MAX_THETA_MIN) {
        return Err(HardyError::Mesh(format!(
            "theta_min must lie in (0, {}], got {}",
            MeshSpec::MAX_THETA_MIN,
            spec.theta_min
        )));
    }
    if !(spec.ratio > 1.0 && spec.ratio.is_finite()) {
        return Err(HardyError::Mesh(format!("grading ratio must exceed 1, got {}", spec.ratio)));
    }
    let n = spec.n_cells;
    let span = (n - 1) as f64;
    let log_extent = (FRAC_PI_2 / spec.theta_min).ln();
    let mut c = spec.ratio.ln();
    let crossover = if log_extent / c >= span {
        c = log_extent / span;
        FRAC_PI_2
    } else {
        // cells needed with crossover angle tc, decreasing in tc
        let count = |tc: f64| (tc / spec.theta_min).ln() / c + (FRAC_PI_2 - tc) / (c * tc);
        let (mut lo, mut hi) = (spec.theta_min.ln(), FRAC_PI_2.ln());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count(mid.exp()) > span {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi.exp()
    };
    let s_cross = (crossover / spec.theta_min).ln() / c;
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(0.0);
    for j in 1..n {
        let s = (j - 1) as f64;
        let t = if s <= s_cross { spec.theta_min * (c * s).exp() } else { crossover + c * crossover * (s - s_cross) };
        nodes.push(t.min(FRAC_PI_2));
    }
    nodes.push(FRAC_PI_2);
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(HardyError::Mesh(format!("grading produced non-increasing nodes for {spec:?}")));
    }
    Ok(ThetaMesh { nodes, spec })
}

/// Mesh for refinement level `level` (0-based) obtained by repeated bisection
/// of the base mesh, so that consecutive levels are nested.
pub fn mesh_at_level(base: MeshSpec, level: u32) -> Result<ThetaMesh> {
    let mut mesh = build_mesh(base)?;
    for _ in 0..level {
        mesh = mesh.refined();
    }
    Ok(mesh)
}

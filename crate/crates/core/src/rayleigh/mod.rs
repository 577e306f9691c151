//! Discretization and minimization of the reduced one-dimensional Rayleigh
//! quotient in the angle `theta`, where `t = |P sigma| = sin(theta)`:
//!
//! ```text
//!            int sin^(k+a-1) cos^(d-k-1) [ phi'(theta)^2 + H_b^2 phi^2 ]^(p/2)
//! J(phi) = --------------------------------------------------------------
//!            int sin^(k+a-1-p+gamma-b) cos^(d-k-1) |phi|^p
//! ```
//!
//! Profiles are continuous and piecewise linear on a [`ThetaMesh`] with no
//! essential boundary conditions. The reduction is applied for every
//! `gamma >= b`: both weights depend on `t` only, so the fiberwise
//! rearrangement argument used in the bottom case carries over unchanged.

mod form;
mod general;
mod mesh;
mod p2;
mod refine;

pub use form::{eval_gradient, eval_quotient, DiscreteProfile, Gradient, QuotientBreakdown, ReducedForm};
pub use general::{minimize_general, GeneralOptions, GeneralResult, InitialProfile, DEFAULT_SEED};
pub use mesh::{build_mesh, mesh_at_level, MeshSpec, ThetaMesh};
pub use p2::minimize_p2;
pub use refine::{refine_and_extrapolate, LevelResult, RefineOptions, Refinement};

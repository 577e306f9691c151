// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod closedform;
pub mod error;
pub mod fullspace;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod rayleigh;
pub mod shooting;
pub mod solver;
pub mod suites;
pub mod tridiag;

pub use error::{HardyError, Result};
pub use params::{DerivedConstants, ProblemParams, Regime, ValidityReport};
pub use rayleigh::{DiscreteProfile, QuotientBreakdown, RefineOptions, ThetaMesh};
pub use solver::{compute_bstar, compute_constant, scan, BStarEstimate, ConstantEstimate, Provenance, SolveOptions};

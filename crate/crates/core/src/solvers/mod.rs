//! Explicit time stepping for the wave and heat equations, direct solves
//! for Laplace and Poisson, and the per-vertex CFL time-step bound.

mod cfl;
mod elliptic;
mod heat;
mod source;
mod wave;

pub use cfl::{cfl_bound, heat_dt_bound, StabilityBound};
pub use elliptic::{solve_laplace, solve_poisson, DirichletCondition, EllipticSolution};
pub use heat::HeatState;
pub use source::{Injection, SourceSignal};
pub use wave::{wave_energy, WaveState};

use thiserror::Error;

/// Any field value beyond this magnitude terminates a run as an overflow;
/// kept far below f64 range so the instability experiment reports a step
/// index instead of tripping on infinities.
pub const OVERFLOW_LIMIT: f64 = 1e12;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("field length {got} does not match vertex count {expected}")]
    FieldLengthMismatch { got: usize, expected: usize },
    #[error("field has a non-finite value at vertex {vertex}")]
    NonFiniteField { vertex: usize },
    #[error("non-positive stability radicand at vertex {vertex} (dual area {dual_area:.3e}, weight sum {weight_sum:.3e})")]
    UnstableVertex {
        vertex: usize,
        dual_area: f64,
        weight_sum: f64,
    },
    #[error("numerical overflow at time step {time_index}: max |u| = {max_abs:.3e}")]
    Overflow { time_index: u64, max_abs: f64 },
    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("singular system: the mesh component containing vertex {vertex} has no constrained vertex")]
    UnconstrainedComponent { vertex: usize },
    #[error("incompatible right-hand side on a closed surface without constraints (area-weighted mean {mean:.3e})")]
    IncompatibleRhs { mean: f64 },
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("invalid source signal: {0}")]
    InvalidSource(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl From<crate::dec::DecError> for SolveError {
    fn from(e: crate::dec::DecError) -> Self {
        match e {
            crate::dec::DecError::FieldLengthMismatch { got, expected } => {
                SolveError::FieldLengthMismatch { got, expected }
            }
            crate::dec::DecError::NonFiniteField { vertex } => {
                SolveError::NonFiniteField { vertex }
            }
            other => SolveError::InvalidParameter(other.to_string()),
        }
    }
}

//! Discrete exterior calculus on the circumcentric dual of a surface mesh.
//!
//! Two independent routes produce the same discrete Laplacian: direct
//! assembly from the dual metrics ([`assemble_laplacian`]) and composition
//! of incidence matrices with diagonal Hodge stars
//! ([`laplacian_from_forms`]); [`cotan_crosscheck`] ties both to the
//! classical cotangent weights.

mod forms;
mod metrics;
mod operator;

pub use forms::{build_hodge, build_incidence, laplacian_from_forms, HodgeStar, IncidenceMatrix};
pub use metrics::{build_dual_metrics, circumcenter, DualMetrics};
pub use operator::{assemble_laplacian, cotan_crosscheck, LaplaceOperator};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecError {
    #[error("triangle {index} is degenerate (collinear vertices)")]
    DegenerateTriangle { index: usize },
    #[error("non-positive dual cell area {area:.6e} at vertex {vertex}; the mesh is too ill-shaped for the circumcentric scheme")]
    NonPositiveDualArea { vertex: usize, area: f64 },
    #[error("field length {got} does not match vertex count {expected}")]
    FieldLengthMismatch { got: usize, expected: usize },
    #[error("field has a non-finite value at vertex {vertex}")]
    NonFiniteField { vertex: usize },
}

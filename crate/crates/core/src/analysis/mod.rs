//! Verification harness: spectral estimates, stability audits, convergence
//! studies.

mod convergence;
mod spectrum;

pub use convergence::{
    convergence_study, flat_standing_wave_error, sphere_mode_frequency, write_convergence_csv,
    ConvergenceRow, StudyProblem,
};
pub use spectrum::{audit_cfl, estimate_lambda_max, rayleigh_quotient, CflAudit, SpectrumEstimate};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("power iteration did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("field is identically zero")]
    ZeroField,
    #[error("invalid study: {0}")]
    InvalidStudy(String),
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
    #[error(transparent)]
    Dec(#[from] crate::dec::DecError),
    #[error(transparent)]
    Solve(#[from] crate::solvers::SolveError),
}

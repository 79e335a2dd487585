//! Command-line driver for decsim: configuration parsing, snapshot output
//! and the subcommand implementations.

pub mod config;
pub mod output;
pub mod run;

pub use config::{
    parse_config, parse_config_str, ConfigError, DtPolicy, InitialCondition, MeshSpec, ModelKind,
    OutputFormat, SimulationConfig,
};
pub use output::{frame_filename, read_vtk_scalars, write_csv, write_vtk, SnapshotSeries};
pub use run::{
    analyze, build_mesh, initial_field, mesh_info, simulate, solve, AnalyzeOptions, AnalyzeReport,
    RunOptions, RunSummary, SolveReport,
};

use decsim_core::{AnalysisError, DecError, MeshError, SolveError};
use thiserror::Error;

/// Process exit codes: 1 configuration, 2 mesh, 3 overflow, 4 solver
/// non-convergence.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Dec(#[from] DecError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{0}")]
    Setup(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Setup(_) | CliError::Io { .. } => 1,
            CliError::Mesh(_) | CliError::Dec(_) => 2,
            CliError::Solve(e) => solve_exit_code(e),
            CliError::Analysis(e) => analysis_exit_code(e),
        }
    }
}

fn solve_exit_code(e: &SolveError) -> i32 {
    match e {
        SolveError::Overflow { .. } => 3,
        SolveError::NonConvergence { .. } => 4,
        SolveError::UnstableVertex { .. } => 2,
        _ => 1,
    }
}

fn analysis_exit_code(e: &AnalysisError) -> i32 {
    match e {
        AnalysisError::NonConvergence { .. } => 4,
        AnalysisError::Mesh(_) | AnalysisError::Dec(_) => 2,
        AnalysisError::Solve(inner) => solve_exit_code(inner),
        _ => 1,
    }
}

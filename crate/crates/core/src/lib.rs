//! Scalar PDE simulation on triangulated surfaces via discrete exterior
//! calculus.
//!
//! The pipeline: build or load a [`mesh::SurfaceMesh`], derive its
//! circumcentric dual ([`dec::build_dual_metrics`]), assemble the discrete
//! Laplace operator ([`dec::assemble_laplacian`]), then either time-step the
//! wave or heat equation explicitly ([`solvers`]) or solve the Laplace and
//! Poisson equations directly. The [`analysis`] module estimates the
//! operator spectrum, audits the CFL time-step bound, and runs convergence
//! studies.

pub mod analysis;
pub mod dec;
pub mod mesh;
pub mod solvers;

pub use analysis::{
    audit_cfl, convergence_study, estimate_lambda_max, rayleigh_quotient, sphere_mode_frequency,
    write_convergence_csv, AnalysisError, CflAudit, ConvergenceRow, SpectrumEstimate,
    StudyProblem,
};
pub use dec::{
    assemble_laplacian, build_dual_metrics, build_hodge, build_incidence, circumcenter,
    cotan_crosscheck, laplacian_from_forms, DecError, DualMetrics, HodgeStar, IncidenceMatrix,
    LaplaceOperator,
};
pub use mesh::{
    generate_flat_grid, generate_icosphere, generate_tetrahedron, load_mesh, save_mesh,
    validate, GridDiagonal, MeshError, MeshFormat, MeshQualityReport, SurfaceMesh,
};
pub use solvers::{
    cfl_bound, heat_dt_bound, solve_laplace, solve_poisson, wave_energy, DirichletCondition,
    EllipticSolution, HeatState, Injection, SolveError, SourceSignal, StabilityBound, WaveState,
    OVERFLOW_LIMIT,
};

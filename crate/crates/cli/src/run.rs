//! Drivers behind the CLI subcommands: simulate, solve, analyze, mesh-info.

use crate::config::{DtPolicy, InitialCondition, MeshSpec, ModelKind, SimulationConfig};
use crate::output::SnapshotSeries;
use crate::CliError;
use decsim_core::{
    assemble_laplacian, audit_cfl, build_dual_metrics, cfl_bound, convergence_study,
    generate_flat_grid, generate_icosphere, generate_tetrahedron, heat_dt_bound, load_mesh,
    rayleigh_quotient, solve_laplace, solve_poisson, validate, write_convergence_csv,
    AnalysisError, ConvergenceRow, DirichletCondition, GridDiagonal, HeatState, LaplaceOperator,
    MeshFormat, MeshQualityReport, StudyProblem, SurfaceMesh, WaveState,
};
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub quiet: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            output_dir: None,
            quiet: false,
        }
    }
}

/// Outcome of a simulate/solve run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub model: ModelKind,
    pub n_vertices: usize,
    pub dt: f64,
    pub dt_was_auto: bool,
    /// The model's stability bound (CFL for wave, forward-Euler for heat).
    pub stability_bound: Option<f64>,
    pub steps: u64,
    pub final_time: f64,
    pub max_abs_u: f64,
    pub n_frames: usize,
    pub output_dir: PathBuf,
    pub wall_seconds: f64,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model:      {}", self.model)?;
        writeln!(f, "vertices:   {}", self.n_vertices)?;
        match self.stability_bound {
            Some(bound) if self.dt_was_auto => {
                writeln!(f, "dt:         {:.6e} (auto = 0.9 x bound {:.6e})", self.dt, bound)?
            }
            Some(bound) => writeln!(f, "dt:         {:.6e} (bound {:.6e})", self.dt, bound)?,
            None => writeln!(f, "dt:         {:.6e}", self.dt)?,
        }
        writeln!(f, "steps:      {} (final time {:.6e})", self.steps, self.final_time)?;
        writeln!(f, "max |u|:    {:.6e}", self.max_abs_u)?;
        writeln!(f, "frames:     {} -> {}", self.n_frames, self.output_dir.display())?;
        write!(f, "wall time:  {:.3} s", self.wall_seconds)
    }
}

pub fn build_mesh(spec: &MeshSpec) -> Result<SurfaceMesh, CliError> {
    let mesh = match spec {
        MeshSpec::File { path, format } => {
            let format = format
                .or_else(|| MeshFormat::from_path(path))
                .ok_or_else(|| {
                    CliError::Setup(format!(
                        "cannot infer mesh format of '{}'; set 'format = off' or 'format = obj'",
                        path.display()
                    ))
                })?;
            load_mesh(path, format)?
        }
        MeshSpec::Tetrahedron { edge_length } => generate_tetrahedron(*edge_length)?,
        MeshSpec::Icosphere {
            radius,
            subdivisions,
        } => generate_icosphere(*radius, *subdivisions)?,
        MeshSpec::FlatGrid { nx, ny, spacing } => {
            generate_flat_grid(*nx, *ny, *spacing, GridDiagonal::RightIsoceles)?
        }
    };
    Ok(mesh)
}

pub fn initial_field(
    initial: &InitialCondition,
    mesh: &SurfaceMesh,
) -> Result<Vec<f64>, CliError> {
    match *initial {
        InitialCondition::Zero => Ok(vec![0.0; mesh.n_vertices()]),
        InitialCondition::Constant(k) => Ok(vec![k; mesh.n_vertices()]),
        InitialCondition::GaussianBump {
            vertex,
            amplitude,
            width,
        } => {
            if vertex >= mesh.n_vertices() {
                return Err(CliError::Setup(format!(
                    "initial bump vertex {vertex} out of range ({} vertices)",
                    mesh.n_vertices()
                )));
            }
            let center = mesh.position(vertex);
            Ok(mesh
                .vertices()
                .iter()
                .map(|p| {
                    let d2 = (p - center).norm_squared();
                    amplitude * (-d2 / (2.0 * width * width)).exp()
                })
                .collect())
        }
    }
}

fn operator_for(mesh: &SurfaceMesh) -> Result<LaplaceOperator, CliError> {
    let metrics = build_dual_metrics(mesh)?;
    Ok(assemble_laplacian(mesh, &metrics)?)
}

fn prepare_output_dir(config: &SimulationConfig, opts: &RunOptions) -> Result<PathBuf, CliError> {
    let dir = opts
        .output_dir
        .clone()
        .unwrap_or_else(|| config.output_dir.clone());
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    Ok(dir)
}

fn report_warnings(config: &SimulationConfig, quality: &MeshQualityReport) {
    for w in &config.warnings {
        log::warn!("{w}");
    }
    for w in &quality.warnings {
        log::warn!("mesh: {w}");
    }
}

fn max_abs(u: &[f64]) -> f64 {
    u.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
}

/// Execute a wave or heat run: initialize, step, snapshot every
/// `snapshot_every` steps (plus the initial state), write the manifest
/// last.
pub fn simulate(
    config: &SimulationConfig,
    opts: &RunOptions,
) -> Result<(SnapshotSeries, RunSummary), CliError> {
    let started = Instant::now();
    let mesh = build_mesh(&config.mesh)?;
    let quality = validate(&mesh);
    report_warnings(config, &quality);
    let op = operator_for(&mesh)?;
    config.source.validate(mesh.n_vertices())?;

    let (dt, bound) = resolve_dt(config, &op)?;
    let u0 = initial_field(&config.initial, &mesh)?;
    let dir = prepare_output_dir(config, opts)?;
    let mut series = SnapshotSeries::new(dir.clone());
    let progress_every = (config.steps / 10).max(1);

    let io_err = |source: std::io::Error| CliError::Io {
        path: dir.display().to_string(),
        source,
    };

    series
        .emit(&mesh, &u0, 0, 0.0, config.output_format)
        .map_err(io_err)?;
    let mut peak = max_abs(&u0);

    match config.model {
        ModelKind::Wave => {
            let zeros = vec![0.0; mesh.n_vertices()];
            let mut state = WaveState::new(&op, &u0, &zeros, dt, config.c)?;
            // The initializer produced the layer at step 1; the source
            // applies there like after any other step.
            let t1 = state.time();
            config.source.apply(state.u_mut(), t1);
            peak = peak.max(max_abs(state.u()));
            if config.snapshot_every == 1 {
                series
                    .emit(&mesh, state.u(), 1, state.time(), config.output_format)
                    .map_err(io_err)?;
            }
            for step in 2..=config.steps {
                state.step(&op, &config.source)?;
                peak = peak.max(max_abs(state.u()));
                if step % config.snapshot_every == 0 {
                    series
                        .emit(&mesh, state.u(), step, state.time(), config.output_format)
                        .map_err(io_err)?;
                }
                if !opts.quiet && step % progress_every == 0 {
                    log::info!(
                        "step {step}/{} t = {:.4e} max|u| = {:.4e}",
                        config.steps,
                        state.time(),
                        max_abs(state.u())
                    );
                }
            }
        }
        ModelKind::Heat => {
            let mut state = HeatState::new(&op, &u0, dt, config.c)?;
            for step in 1..=config.steps {
                state.step(&op, &config.source)?;
                peak = peak.max(max_abs(state.u()));
                if step % config.snapshot_every == 0 {
                    series
                        .emit(&mesh, state.u(), step, state.time(), config.output_format)
                        .map_err(io_err)?;
                }
                if !opts.quiet && step % progress_every == 0 {
                    log::info!(
                        "step {step}/{} t = {:.4e} max|u| = {:.4e}",
                        config.steps,
                        state.time(),
                        max_abs(state.u())
                    );
                }
            }
        }
        other => {
            return Err(CliError::Setup(format!(
                "'simulate' drives time-dependent models (wave, heat); use 'solve' for {other}"
            )))
        }
    }

    series.write_manifest().map_err(io_err)?;
    let summary = RunSummary {
        model: config.model,
        n_vertices: mesh.n_vertices(),
        dt,
        dt_was_auto: matches!(config.dt, DtPolicy::Auto),
        stability_bound: Some(bound),
        steps: config.steps,
        final_time: config.steps as f64 * dt,
        max_abs_u: peak,
        n_frames: series.len(),
        output_dir: dir,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    Ok((series, summary))
}

fn resolve_dt(config: &SimulationConfig, op: &LaplaceOperator) -> Result<(f64, f64), CliError> {
    let bound = match config.model {
        ModelKind::Wave => cfl_bound(op, config.c)?.dt_max,
        ModelKind::Heat => heat_dt_bound(op, config.c)?,
        _ => f64::INFINITY,
    };
    let dt = match config.dt {
        DtPolicy::Auto => 0.9 * bound,
        DtPolicy::Fixed(dt) => dt,
    };
    Ok((dt, bound))
}

/// Outcome of an elliptic solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub summary: RunSummary,
    pub gauge_fixed: bool,
    pub iterations: usize,
    pub residual: f64,
}

/// Solve the Laplace or Poisson model and write the solution as a single
/// frame.
pub fn solve(
    config: &SimulationConfig,
    opts: &RunOptions,
) -> Result<(SnapshotSeries, SolveReport), CliError> {
    let started = Instant::now();
    let mesh = build_mesh(&config.mesh)?;
    let quality = validate(&mesh);
    report_warnings(config, &quality);
    let op = operator_for(&mesh)?;

    for &(v, _) in &config.constraints {
        if v >= mesh.n_vertices() {
            return Err(CliError::Setup(format!(
                "constraint vertex {v} out of range ({} vertices)",
                mesh.n_vertices()
            )));
        }
    }
    let condition = DirichletCondition::new(config.constraints.clone());
    let solution = match config.model {
        ModelKind::Laplace => solve_laplace(&op, &condition)?,
        ModelKind::Poisson => {
            // The field built from [initial] is the source term f in
            // -Lap u = f.
            let rhs = initial_field(&config.initial, &mesh)?;
            solve_poisson(&op, &rhs, &condition)?
        }
        other => {
            return Err(CliError::Setup(format!(
                "'solve' drives elliptic models (laplace, poisson); use 'simulate' for {other}"
            )))
        }
    };
    if solution.gauge_fixed {
        log::warn!("system determined up to a constant; returning the zero-mean gauge representative");
    }

    let dir = prepare_output_dir(config, opts)?;
    let mut series = SnapshotSeries::new(dir.clone());
    series
        .emit(&mesh, &solution.u, 0, 0.0, config.output_format)
        .map_err(|source| CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
    series.write_manifest().map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;

    let summary = RunSummary {
        model: config.model,
        n_vertices: mesh.n_vertices(),
        dt: 0.0,
        dt_was_auto: false,
        stability_bound: None,
        steps: 0,
        final_time: 0.0,
        max_abs_u: max_abs(&solution.u),
        n_frames: series.len(),
        output_dir: dir,
        wall_seconds: started.elapsed().as_secs_f64(),
    };
    Ok((
        series,
        SolveReport {
            summary,
            gauge_fixed: solution.gauge_fixed,
            iterations: solution.iterations,
            residual: solution.residual,
        },
    ))
}

#[derive(Debug, Clone, Default)]
pub struct AnalyzeOptions {
    pub convergence: bool,
    pub problem: Option<StudyProblem>,
    pub levels: u32,
    pub dump_operator: Option<PathBuf>,
}

/// Text report plus optional convergence table produced by `analyze`.
#[derive(Debug)]
pub struct AnalyzeReport {
    pub lines: Vec<String>,
    pub convergence: Option<Vec<ConvergenceRow>>,
    /// Set when the spectrum estimate failed; the caller still gets the
    /// closed-form bounds above.
    pub spectrum_failure: Option<AnalysisError>,
}

pub fn analyze(
    config: &SimulationConfig,
    opts: &RunOptions,
    analyze_opts: &AnalyzeOptions,
) -> Result<AnalyzeReport, CliError> {
    let mesh = build_mesh(&config.mesh)?;
    let quality = validate(&mesh);
    report_warnings(config, &quality);
    let op = operator_for(&mesh)?;

    let mut lines = Vec::new();
    lines.push(format!(
        "mesh: {} vertices, {} edges, {} triangles (closed: {}, well-centered: {})",
        quality.n_vertices,
        quality.n_edges,
        quality.n_triangles,
        quality.is_closed,
        quality.is_well_centered
    ));
    let bound = cfl_bound(&op, config.c)?;
    lines.push(format!(
        "cfl bound: dt_max = {:.6e} (attained at vertex {})",
        bound.dt_max, bound.argmin_vertex
    ));
    lines.push(format!(
        "heat bound: dt_max = {:.6e}",
        heat_dt_bound(&op, config.c)?
    ));

    if let Some(path) = &analyze_opts.dump_operator {
        let file = std::fs::File::create(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        op.write_triplets(std::io::BufWriter::new(file)).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        lines.push(format!("operator triplets written to {}", path.display()));
    }

    let mut spectrum_failure = None;
    match audit_cfl(&op, config.c, opts.seed) {
        Ok(audit) => {
            lines.push(format!(
                "lambda_max = {:.9e} (gershgorin bound {:.9e})",
                audit.lambda_max, audit.gershgorin_bound
            ));
            lines.push(format!(
                "stability audit: per-vertex bound {:.6e} vs spectral bound {:.6e} (ratio {:.6})",
                audit.gershgorin_dt_max, audit.spectral_dt_max, audit.ratio
            ));
            if !audit.conservative {
                lines.push("warning: per-vertex bound exceeded the spectral bound".to_string());
            }
        }
        Err(err) => {
            lines.push(format!("spectrum estimate failed: {err}"));
            spectrum_failure = Some(err);
        }
    }

    // On spheres, report the discrete quotient of the first polar harmonic
    // against its continuum value 2/R^2.
    if let MeshSpec::Icosphere { radius, .. } = config.mesh {
        let mode: Vec<f64> = mesh.vertices().iter().map(|p| p.z / radius).collect();
        let q = rayleigh_quotient(&op, &mode)?;
        lines.push(format!(
            "rayleigh quotient of z/R: {:.6e} (continuum 2/R^2 = {:.6e})",
            q,
            2.0 / (radius * radius)
        ));
    }

    let convergence = if analyze_opts.convergence {
        let problem = analyze_opts.problem.unwrap_or(match config.mesh {
            MeshSpec::FlatGrid { .. } => StudyProblem::FlatStandingWave,
            _ => StudyProblem::SphereHarmonicWave,
        });
        let levels = analyze_opts.levels.max(3);
        let rows = convergence_study(problem, levels)?;
        let dir = prepare_output_dir(config, opts)?;
        let csv_path = dir.join("convergence.csv");
        let file = std::fs::File::create(&csv_path).map_err(|source| CliError::Io {
            path: csv_path.display().to_string(),
            source,
        })?;
        write_convergence_csv(&rows, std::io::BufWriter::new(file)).map_err(|source| {
            CliError::Io {
                path: csv_path.display().to_string(),
                source,
            }
        })?;
        lines.push(format!("convergence table written to {}", csv_path.display()));
        Some(rows)
    } else {
        None
    };

    Ok(AnalyzeReport {
        lines,
        convergence,
        spectrum_failure,
    })
}

/// Load, validate and describe a mesh file.
pub fn mesh_info(path: &Path) -> Result<MeshQualityReport, CliError> {
    let format = MeshFormat::from_path(path).ok_or_else(|| {
        CliError::Setup(format!(
            "cannot infer mesh format of '{}' (expected .off or .obj)",
            path.display()
        ))
    })?;
    let mesh = load_mesh(path, format)?;
    Ok(validate(&mesh))
}

/// Render the quality report as the `mesh-info` output.
pub fn format_report(report: &MeshQualityReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("vertices:              {}\n", report.n_vertices));
    out.push_str(&format!("edges:                 {}\n", report.n_edges));
    out.push_str(&format!("triangles:             {}\n", report.n_triangles));
    out.push_str(&format!("closed:                {}\n", report.is_closed));
    out.push_str(&format!("well-centered:         {}\n", report.is_well_centered));
    out.push_str(&format!(
        "obtuse triangles:      {}\n",
        report.obtuse_triangle_indices.len()
    ));
    out.push_str(&format!("min angle:             {:.6} rad\n", report.min_angle));
    out.push_str(&format!(
        "euler characteristic:  {}\n",
        report.euler_characteristic
    ));
    out.push_str(&format!(
        "orientation:           {}\n",
        if report.orientation_consistent {
            "consistent"
        } else {
            "inconsistent"
        }
    ));
    for w in &report.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out
}

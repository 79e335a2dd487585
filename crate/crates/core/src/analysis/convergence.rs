//! Grid-refinement studies for the wave scheme.
//!
//! Two canonical problems:
//!
//! * `FlatStandingWave` - the separable mode `sin(pi x / L) sin(pi y / L)`
//!   on a square grid with a zero Dirichlet boundary (imposed by pinning
//!   boundary vertices each step). The exact solution oscillates at the
//!   angular frequency `c pi sqrt(2) / L`; the max-norm error at a fixed
//!   final time is measured per refinement level.
//! * `SphereHarmonicWave` - the degree-1 harmonic `z / R` on icospheres of
//!   increasing subdivision. Its continuum eigenvalue is `2 / R^2`, so the
//!   mode oscillates at angular frequency `c sqrt(2) / R`; the measured
//!   oscillation frequency (zero crossings of the mode projection) is
//!   compared against that per level.

use super::AnalysisError;
use crate::dec::{assemble_laplacian, build_dual_metrics};
use crate::mesh::{generate_flat_grid, generate_icosphere, GridDiagonal};
use crate::solvers::{cfl_bound, SourceSignal, WaveState};
use std::io::Write;

/// Study problems with exact reference dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyProblem {
    FlatStandingWave,
    SphereHarmonicWave,
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub level: u32,
    /// Mesh spacing (grid spacing, or mean edge length on spheres).
    pub h: f64,
    pub dt: f64,
    /// Max-norm solution error at the final time (flat problem) or absolute
    /// angular-frequency error (sphere problem).
    pub error_max: f64,
    /// `log2(previous error / this error)`; absent on the first row.
    pub observed_order: Option<f64>,
}

const FLAT_BASE_NX: usize = 17;
const FLAT_DOMAIN: f64 = 1.0;
const FLAT_FINAL_TIME: f64 = 0.5;
const FLAT_COURANT: f64 = 0.4;
const WAVE_SPEED: f64 = 1.0;
const SPHERE_BASE_SUBDIVISIONS: u32 = 2;
const SPHERE_RADIUS: f64 = 1.0;

/// Run a refinement study with `levels >= 3` rows, coarsest first.
pub fn convergence_study(
    problem: StudyProblem,
    levels: u32,
) -> Result<Vec<ConvergenceRow>, AnalysisError> {
    if levels < 3 {
        return Err(AnalysisError::InvalidStudy(format!(
            "a convergence study needs at least 3 levels, got {levels}"
        )));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels as usize);
    for level in 0..levels {
        let (h, dt, error_max) = match problem {
            StudyProblem::FlatStandingWave => {
                let nx = (FLAT_BASE_NX - 1) * (1 << level) + 1;
                flat_standing_wave_error(nx, 1.0)?
            }
            StudyProblem::SphereHarmonicWave => {
                let subdivisions = SPHERE_BASE_SUBDIVISIONS + level;
                let (h, dt, omega) = sphere_mode_frequency(subdivisions, SPHERE_RADIUS, WAVE_SPEED)?;
                let exact = 2.0_f64.sqrt() * WAVE_SPEED / SPHERE_RADIUS;
                (h, dt, (omega - exact).abs())
            }
        };
        let observed_order = rows
            .last()
            .map(|prev: &ConvergenceRow| (prev.error_max / error_max).log2());
        rows.push(ConvergenceRow {
            level,
            h,
            dt,
            error_max,
            observed_order,
        });
    }
    Ok(rows)
}

/// Write study rows as CSV with the header
/// `level,h,dt,error_max,observed_order`.
pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "level,h,dt,error_max,observed_order")?;
    for r in rows {
        match r.observed_order {
            Some(order) => writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.6}",
                r.level, r.h, r.dt, r.error_max, order
            )?,
            None => writeln!(out, "{},{:.16e},{:.16e},{:.16e},", r.level, r.h, r.dt, r.error_max)?,
        }
    }
    Ok(())
}

/// Evolve the separable standing mode on an `nx` by `nx` grid to
/// `FLAT_FINAL_TIME` and return (h, dt, max error). `dt_scale` shrinks the
/// time step below its default `0.4 h / (c sqrt 2)` for temporal-refinement
/// experiments.
pub fn flat_standing_wave_error(
    nx: usize,
    dt_scale: f64,
) -> Result<(f64, f64, f64), AnalysisError> {
    let h = FLAT_DOMAIN / (nx - 1) as f64;
    let mesh = generate_flat_grid(nx, nx, h, GridDiagonal::RightIsoceles)?;
    let metrics = build_dual_metrics(&mesh)?;
    let op = assemble_laplacian(&mesh, &metrics)?;

    let k = std::f64::consts::PI / FLAT_DOMAIN;
    let mode: Vec<f64> = mesh
        .vertices()
        .iter()
        .map(|p| (k * p.x).sin() * (k * p.y).sin())
        .collect();
    let omega = WAVE_SPEED * k * 2.0_f64.sqrt();

    // Land exactly on the final time with a step at or below the target.
    let dt_target = dt_scale * FLAT_COURANT * h / (WAVE_SPEED * 2.0_f64.sqrt());
    let n_steps = (FLAT_FINAL_TIME / dt_target).ceil() as u64;
    let dt = FLAT_FINAL_TIME / n_steps as f64;

    let boundary = mesh.boundary_vertices();
    let zeros = vec![0.0; mesh.n_vertices()];
    let mut state = WaveState::new(&op, &mode, &zeros, dt, WAVE_SPEED)?;
    pin(&mut state, &boundary);
    for _ in 1..n_steps {
        state.step(&op, &SourceSignal::None)?;
        pin(&mut state, &boundary);
    }
    debug_assert_eq!(state.time_index(), n_steps);

    let amplitude = (omega * FLAT_FINAL_TIME).cos();
    let error = state
        .u()
        .iter()
        .zip(&mode)
        .fold(0.0_f64, |m, (&num, &exact)| {
            m.max((num - amplitude * exact).abs())
        });
    Ok((h, dt, error))
}

fn pin(state: &mut WaveState, vertices: &[usize]) {
    let u = state.u_mut();
    for &v in vertices {
        u[v] = 0.0;
    }
}

/// Evolve `u0 = z / R` on an icosphere and measure the oscillation's
/// angular frequency from the zero crossings of its mode projection.
/// Returns (mean edge length, dt, measured angular frequency).
pub fn sphere_mode_frequency(
    subdivisions: u32,
    radius: f64,
    c: f64,
) -> Result<(f64, f64, f64), AnalysisError> {
    let mesh = generate_icosphere(radius, subdivisions)?;
    let metrics = build_dual_metrics(&mesh)?;
    let op = assemble_laplacian(&mesh, &metrics)?;
    let h = metrics.primal_edge_lengths.iter().sum::<f64>() / mesh.n_edges() as f64;

    let mode: Vec<f64> = mesh.vertices().iter().map(|p| p.z / radius).collect();
    let dt = 0.9 * cfl_bound(&op, c)?.dt_max;

    // Enough time for several half-periods of the expected oscillation.
    let expected_omega = 2.0_f64.sqrt() * c / radius;
    let max_time = 8.0 * std::f64::consts::PI / expected_omega;
    let max_steps = (max_time / dt).ceil() as u64;
    let wanted_crossings = 9;

    let project = |u: &[f64]| -> f64 {
        u.iter()
            .zip(&mode)
            .enumerate()
            .map(|(v, (&uv, &mv))| op.dual_area(v) * uv * mv)
            .sum()
    };

    let zeros = vec![0.0; mesh.n_vertices()];
    let mut state = WaveState::new(&op, &mode, &zeros, dt, c)?;
    let mut crossings: Vec<f64> = Vec::new();
    let mut prev_t = state.time();
    let mut prev_m = project(state.u());
    for _ in 1..max_steps {
        state.step(&op, &SourceSignal::None)?;
        let t = state.time();
        let m = project(state.u());
        if prev_m == 0.0 || (prev_m > 0.0) != (m > 0.0) {
            // Linear interpolation of the crossing time; the projection is
            // nearly linear around its zeros.
            crossings.push(prev_t + (t - prev_t) * prev_m / (prev_m - m));
            if crossings.len() >= wanted_crossings {
                break;
            }
        }
        prev_t = t;
        prev_m = m;
    }
    if crossings.len() < 3 {
        return Err(AnalysisError::InvalidStudy(format!(
            "only {} zero crossings observed on the sphere mode",
            crossings.len()
        )));
    }
    // Consecutive zero crossings of a cosine are half a period apart.
    let intervals = crossings.len() - 1;
    let mean_interval = (crossings[crossings.len() - 1] - crossings[0]) / intervals as f64;
    let omega = std::f64::consts::PI / mean_interval;
    Ok((h, dt, omega))
}

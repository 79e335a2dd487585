//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured values (visible with `--nocapture`).
//!
//! Run with: `cargo test -p decsim-cli --test acceptance -- --nocapture`

use decsim_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::Instant;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn operator_for(mesh: &SurfaceMesh) -> LaplaceOperator {
    let metrics = build_dual_metrics(mesh).unwrap();
    assemble_laplacian(mesh, &metrics).unwrap()
}

fn random_unit_field(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn max_abs(u: &[f64]) -> f64 {
    u.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
}

#[test]
fn criterion_01_tetrahedron_laplace_kernel() {
    let started = Instant::now();
    let mesh = generate_tetrahedron(1.0).unwrap();
    let op = operator_for(&mesh);

    let constant = vec![3.75; 4];
    let image = op.apply(&constant).unwrap();
    let worst = max_abs(&image);
    assert!(worst < 1e-12, "constant field image max {worst}");

    let sol = solve_laplace(&op, &DirichletCondition::empty()).unwrap();
    assert!(sol.gauge_fixed, "unconstrained solve must flag the gauge choice");
    assert!(sol.u.iter().all(|&x| x == 0.0));

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?}");
    println!(
        "ACCEPTANCE 01 PASS tetrahedron laplace kernel: max|L(const)| = {worst:.2e}, gauge flagged, {elapsed:?}"
    );
}

#[test]
fn criterion_02_tetrahedron_poisson() {
    let started = Instant::now();
    let mesh = generate_tetrahedron(1.0).unwrap();
    let op = operator_for(&mesh);
    let h = 7.5;
    let sol = solve_poisson(&op, &[0.0; 4], &DirichletCondition::single(0, h)).unwrap();
    let mut worst = 0.0_f64;
    for v in 1..4 {
        worst = worst.max((sol.u[v] - h).abs());
    }
    assert!(worst < 1e-10, "free vertices off the pinned value by {worst}");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0);
    println!("ACCEPTANCE 02 PASS tetrahedron poisson: max|u - {h}| = {worst:.2e}, {elapsed:?}");
}

#[test]
fn criterion_03_cfl_closed_forms() {
    let tetra = operator_for(&generate_tetrahedron(1.0).unwrap());
    let bound = cfl_bound(&tetra, 1.0).unwrap();
    let tetra_err = (bound.dt_max - 1.0 / SQRT2).abs();
    assert!(tetra_err < 1e-12, "tetrahedron bound off by {tetra_err}");

    let h = 0.25;
    let grid = operator_for(&generate_flat_grid(9, 9, h, GridDiagonal::RightIsoceles).unwrap());
    let bound = cfl_bound(&grid, 1.0).unwrap();
    let grid_err = (bound.dt_max - h / SQRT2).abs();
    assert!(grid_err < 1e-12, "grid bound off by {grid_err}");
    // Interior vertices attain the same value.
    let interior = 4 * 9 + 4;
    assert!((bound.per_vertex_dt[interior] - h / SQRT2).abs() < 1e-12);

    println!(
        "ACCEPTANCE 03 PASS cfl closed forms: tetra |dt - 1/sqrt2| = {tetra_err:.2e}, grid |dt - h/sqrt2| = {grid_err:.2e}"
    );
}

#[test]
fn criterion_04_stability_bracketing() {
    let started = Instant::now();
    let mesh = generate_icosphere(1.0, 3).unwrap();
    let op = operator_for(&mesh);
    let c = 1.0;
    let u0 = random_unit_field(mesh.n_vertices(), 4242);
    let zeros = vec![0.0; mesh.n_vertices()];

    // Stable leg: 0.9 x the per-vertex bound.
    let dt = 0.9 * cfl_bound(&op, c).unwrap().dt_max;
    let mut state = WaveState::new(&op, &u0, &zeros, dt, c).unwrap();
    let e0 = wave_energy(&state, &op);
    assert!(e0 > 0.0);
    let mut peak = max_abs(state.u());
    let mut drift = 0.0_f64;
    for _ in 0..2000 {
        state.step(&op, &SourceSignal::None).unwrap();
        peak = peak.max(max_abs(state.u()));
        drift = drift.max(((wave_energy(&state, &op) - e0) / e0).abs());
    }
    assert!(peak < 100.0, "stable run peak {peak}");
    assert!(drift < 1e-6, "relative energy drift {drift}");

    // Unstable leg: 1.05 x the measured spectral bound.
    let lambda = estimate_lambda_max(&op, 42).unwrap().lambda_max;
    let dt_bad = 1.05 * 2.0 / (c * lambda.sqrt());
    let mut state = WaveState::new(&op, &u0, &zeros, dt_bad, c).unwrap();
    let mut overflow = None;
    for _ in 0..2000 {
        if let Err(SolveError::Overflow { time_index, max_abs }) =
            state.step(&op, &SourceSignal::None)
        {
            overflow = Some((time_index, max_abs));
            break;
        }
    }
    let (step, magnitude) = overflow.expect("unstable run must overflow within 2000 steps");
    assert!(magnitude > 1e12);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "runtime {elapsed:?}");
    println!(
        "ACCEPTANCE 04 PASS stability bracketing: stable peak {peak:.3}, energy drift {drift:.2e}; unstable overflow at step {step} (|u| = {magnitude:.2e}), {elapsed:?}"
    );
}

#[test]
fn criterion_05_gershgorin_conservativeness() {
    // Closed forms on the tetrahedron.
    let tetra = operator_for(&generate_tetrahedron(1.0).unwrap());
    let audit = audit_cfl(&tetra, 1.0, 42).unwrap();
    let gershgorin_expected = 1.0 / SQRT2;
    let exact_expected = 2.0 / (16.0_f64 / 3.0).sqrt();
    assert!((audit.gershgorin_dt_max - gershgorin_expected).abs() < 1e-9);
    assert!((audit.spectral_dt_max - exact_expected).abs() < 1e-9);

    // The per-vertex bound never exceeds the measured spectral bound.
    let meshes: Vec<(String, SurfaceMesh)> = vec![
        ("tetrahedron".into(), generate_tetrahedron(1.0).unwrap()),
        (
            "grid 9x9".into(),
            generate_flat_grid(9, 9, 0.5, GridDiagonal::RightIsoceles).unwrap(),
        ),
        (
            "grid 17x17".into(),
            generate_flat_grid(17, 17, 1.0, GridDiagonal::RightIsoceles).unwrap(),
        ),
        ("icosphere 0".into(), generate_icosphere(1.0, 0).unwrap()),
        ("icosphere 1".into(), generate_icosphere(1.0, 1).unwrap()),
        ("icosphere 2".into(), generate_icosphere(2.0, 2).unwrap()),
        ("icosphere 3".into(), generate_icosphere(1.0, 3).unwrap()),
    ];
    let mut worst_margin = f64::MAX;
    for (name, mesh) in &meshes {
        let op = operator_for(mesh);
        let audit = audit_cfl(&op, 1.0, 42).unwrap();
        assert!(
            audit.gershgorin_dt_max <= audit.spectral_dt_max + 1e-12,
            "{name}: per-vertex bound {} above spectral bound {}",
            audit.gershgorin_dt_max,
            audit.spectral_dt_max
        );
        worst_margin = worst_margin.min(audit.spectral_dt_max - audit.gershgorin_dt_max);
    }
    println!(
        "ACCEPTANCE 05 PASS gershgorin conservativeness on {} meshes: tetra ratio {:.6}, min margin {worst_margin:.2e}",
        meshes.len(),
        audit.ratio
    );
}

#[test]
fn criterion_06_rectangular_grid_accuracy() {
    let started = Instant::now();
    let rows = convergence_study(StudyProblem::FlatStandingWave, 3).unwrap();
    let mut orders = Vec::new();
    for r in &rows[1..] {
        let order = r.observed_order.unwrap();
        assert!(
            (1.7..=2.3).contains(&order),
            "observed order {order} outside [1.7, 2.3] (level {})",
            r.level
        );
        orders.push(order);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?}");
    println!("ACCEPTANCE 06 PASS rectangular-grid accuracy: observed orders {orders:?}, {elapsed:?}");
}

#[test]
fn criterion_07_sphere_spectrum() {
    let started = Instant::now();
    let radius = 1.0;
    let c = 1.0;
    let mesh = generate_icosphere(radius, 4).unwrap();
    let op = operator_for(&mesh);

    let mode: Vec<f64> = mesh.vertices().iter().map(|p| p.z / radius).collect();
    let q = rayleigh_quotient(&op, &mode).unwrap();
    let q_rel = (q - 2.0 / (radius * radius)).abs() / (2.0 / (radius * radius));
    assert!(q_rel < 0.05, "rayleigh quotient {q} more than 5% from 2/R^2");

    let (_, _, omega) = sphere_mode_frequency(4, radius, c).unwrap();
    let omega_exact = SQRT2 * c / radius;
    let omega_rel = (omega - omega_exact).abs() / omega_exact;
    assert!(
        omega_rel < 0.05,
        "measured angular frequency {omega} more than 5% from sqrt(2) c"
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "runtime {elapsed:?}");
    println!(
        "ACCEPTANCE 07 PASS sphere spectrum: rayleigh(z/R) = {q:.4} ({:.2}% off), omega = {omega:.4} ({:.2}% off), {elapsed:?}",
        100.0 * q_rel,
        100.0 * omega_rel
    );
}

#[test]
fn criterion_08_heat_conservation_and_positivity() {
    let started = Instant::now();
    let mesh = generate_icosphere(1.0, 3).unwrap();
    let op = operator_for(&mesh);
    let dt = 0.9 * heat_dt_bound(&op, 1.0).unwrap();

    // Nonnegative initial data: a bump at the north pole.
    let u0: Vec<f64> = mesh
        .vertices()
        .iter()
        .map(|p| {
            let d2 = p.x * p.x + p.y * p.y + (p.z - 1.0) * (p.z - 1.0);
            (-d2 / 0.18).exp()
        })
        .collect();
    assert!(u0.iter().all(|&x| x >= 0.0));

    let mut state = HeatState::new(&op, &u0, dt, 1.0).unwrap();
    let total0 = state.weighted_total(&op);
    for _ in 0..1000 {
        state.step(&op, &SourceSignal::None).unwrap();
    }
    let drift = ((state.weighted_total(&op) - total0) / total0).abs();
    let min = state.u().iter().cloned().fold(f64::MAX, f64::min);
    assert!(drift < 1e-9, "weighted total drift {drift}");
    assert!(min >= -1e-12, "minimum value {min}");

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?}");
    println!(
        "ACCEPTANCE 08 PASS heat conservation and positivity: drift {drift:.2e}, min u {min:.2e}, {elapsed:?}"
    );
}

#[test]
fn criterion_09_operator_equivalences() {
    let meshes: Vec<(String, SurfaceMesh)> = vec![
        ("tetrahedron".into(), generate_tetrahedron(1.0).unwrap()),
        (
            "grid 17x17".into(),
            generate_flat_grid(17, 17, 1.0, GridDiagonal::RightIsoceles).unwrap(),
        ),
        ("icosphere 3".into(), generate_icosphere(1.0, 3).unwrap()),
    ];
    let mut worst_entry = 0.0_f64;
    let mut worst_cotan = 0.0_f64;
    for (name, mesh) in &meshes {
        let metrics = build_dual_metrics(mesh).unwrap();
        let direct = assemble_laplacian(mesh, &metrics).unwrap();
        let factored = laplacian_from_forms(mesh, &metrics).unwrap();
        for (r, c, value) in direct.entries() {
            let diff = (value - factored.matrix_entry(r, c)).abs();
            worst_entry = worst_entry.max(diff);
            assert!(diff < 1e-12, "{name}: entry ({r},{c}) differs by {diff}");
        }
        for e in 0..direct.n_edges() {
            assert!((direct.weight(e) - factored.weight(e)).abs() < 1e-12);
        }
        let discrepancy = cotan_crosscheck(mesh, &metrics);
        worst_cotan = worst_cotan.max(discrepancy);
        assert!(discrepancy < 1e-10, "{name}: cotan discrepancy {discrepancy}");
    }
    println!(
        "ACCEPTANCE 09 PASS operator equivalences: max entry diff {worst_entry:.2e}, max cotan discrepancy {worst_cotan:.2e}"
    );
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(
        &cfg_path,
        "[mesh]\ngenerator = icosphere\nsubdivisions = 2\n\
         [model]\nkind = wave\nsteps = 60\nsnapshot_every = 10\n\
         [source]\nkind = gaussian_pulse\nvertex = 5\nsigma = 0.2\namplitude = 0.8\n\
         [initial]\nkind = gaussian_bump\nvertex = 40\nwidth = 0.3\n",
    )
    .unwrap();

    let run = |out: &std::path::Path| {
        let output = Command::new(env!("CARGO_BIN_EXE_decsim"))
            .args([
                "simulate",
                cfg_path.to_str().unwrap(),
                "--seed",
                "42",
                "--output-dir",
                out.to_str().unwrap(),
                "--quiet",
            ])
            .output()
            .unwrap();
        assert!(output.status.success());
    };
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    run(&out_a);
    run(&out_b);

    let mut names: Vec<String> = std::fs::read_dir(&out_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 8); // 7 frames + manifest
    for name in &names {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "file {name} differs between identical runs");
    }
    println!(
        "ACCEPTANCE 10 PASS determinism: {} output files byte-identical across runs",
        names.len()
    );
}

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use decsim_core::{
    assemble_laplacian, build_dual_metrics, cfl_bound, generate_icosphere, solve_poisson,
    DirichletCondition, LaplaceOperator, SourceSignal, SurfaceMesh, WaveState,
};

fn sphere(subdivisions: u32) -> (SurfaceMesh, LaplaceOperator) {
    let mesh = generate_icosphere(1.0, subdivisions).unwrap();
    let metrics = build_dual_metrics(&mesh).unwrap();
    let op = assemble_laplacian(&mesh, &metrics).unwrap();
    (mesh, op)
}

fn bench_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for &s in &[3u32, 4, 5] {
        let mesh = generate_icosphere(1.0, s).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(s), &mesh, |b, mesh| {
            b.iter(|| {
                let metrics = build_dual_metrics(black_box(mesh)).unwrap();
                black_box(assemble_laplacian(mesh, &metrics).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_laplacian");
    for &s in &[4u32, 5] {
        let (mesh, op) = sphere(s);
        let u: Vec<f64> = (0..mesh.n_vertices()).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut out = vec![0.0; u.len()];
        group.bench_with_input(BenchmarkId::from_parameter(s), &op, |b, op| {
            b.iter(|| op.apply_into(black_box(&u), black_box(&mut out)))
        });
    }
    group.finish();
}

fn bench_wave_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("wave_step");
    for &s in &[3u32, 4] {
        let (mesh, op) = sphere(s);
        let dt = 0.9 * cfl_bound(&op, 1.0).unwrap().dt_max;
        let u0: Vec<f64> = mesh.vertices().iter().map(|p| p.z).collect();
        let zeros = vec![0.0; mesh.n_vertices()];
        group.bench_with_input(BenchmarkId::from_parameter(s), &op, |b, op| {
            let mut state = WaveState::new(op, &u0, &zeros, dt, 1.0).unwrap();
            b.iter(|| state.step(op, &SourceSignal::None).unwrap())
        });
    }
    group.finish();
}

fn bench_poisson(c: &mut Criterion) {
    let (mesh, op) = sphere(3);
    let rhs: Vec<f64> = mesh.vertices().iter().map(|p| p.x * p.y).collect();
    let condition = DirichletCondition::single(0, 0.0);
    c.bench_function("poisson_solve/642", |b| {
        b.iter(|| black_box(solve_poisson(&op, &rhs, &condition).unwrap()))
    });
}

criterion_group!(benches, bench_assembly, bench_apply, bench_wave_step, bench_poisson);
criterion_main!(benches);

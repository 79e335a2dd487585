//! Direct solves of the discrete Laplace and Poisson equations.
//!
//! Both reduce to the symmetric system `M u = diag(P) f` for `-Lap u = f`,
//! where `M` carries the edge weights (`M[v][u] = -w` off the diagonal, the
//! weight sum on it). Constrained vertices are eliminated, moving their
//! contributions to the right-hand side; the reduced system is solved by
//! conjugate gradients.

use super::SolveError;
use crate::dec::LaplaceOperator;

/// Relative residual target for the conjugate gradient iteration.
const CG_TOLERANCE: f64 = 1e-12;
/// Iteration cap as a multiple of the unknown count.
const CG_MAX_ITER_FACTOR: usize = 10;
/// A right-hand side whose area-weighted mean exceeds this fraction of its
/// max magnitude is incompatible on an unconstrained closed surface.
const COMPATIBILITY_TOLERANCE: f64 = 1e-9;

/// Pinned vertex values `u[vertex] = value`.
#[derive(Debug, Clone, Default)]
pub struct DirichletCondition {
    constrained: Vec<(usize, f64)>,
}

impl DirichletCondition {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(constrained: Vec<(usize, f64)>) -> Self {
        Self { constrained }
    }

    pub fn single(vertex: usize, value: f64) -> Self {
        Self {
            constrained: vec![(vertex, value)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.constrained.is_empty()
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.constrained
    }

    fn validate(&self, n_vertices: usize) -> Result<(), SolveError> {
        let mut seen = vec![false; n_vertices];
        for &(v, value) in &self.constrained {
            if v >= n_vertices {
                return Err(SolveError::InvalidConstraint(format!(
                    "vertex {v} out of range ({n_vertices} vertices)"
                )));
            }
            if seen[v] {
                return Err(SolveError::InvalidConstraint(format!(
                    "vertex {v} constrained twice"
                )));
            }
            if !value.is_finite() {
                return Err(SolveError::InvalidConstraint(format!(
                    "non-finite value at vertex {v}"
                )));
            }
            seen[v] = true;
        }
        Ok(())
    }
}

/// Solution of an elliptic solve plus solver diagnostics.
#[derive(Debug, Clone)]
pub struct EllipticSolution {
    pub u: Vec<f64>,
    /// True when the system only determined the solution up to an additive
    /// constant and a canonical representative was chosen.
    pub gauge_fixed: bool,
    pub iterations: usize,
    /// Relative residual of the conjugate gradient iteration at return.
    pub residual: f64,
}

/// Solve `-Lap u = 0` under the given constraints.
///
/// With no constraints the system is singular with the constants as kernel;
/// the zero field is returned as the canonical representative, flagged via
/// `gauge_fixed`.
pub fn solve_laplace(
    op: &LaplaceOperator,
    condition: &DirichletCondition,
) -> Result<EllipticSolution, SolveError> {
    condition.validate(op.n_vertices())?;
    if condition.is_empty() {
        check_all_constrained_or_connected(op, condition)?;
        log::info!("laplace solve without constraints: returning the zero representative of the constant family");
        return Ok(EllipticSolution {
            u: vec![0.0; op.n_vertices()],
            gauge_fixed: true,
            iterations: 0,
            residual: 0.0,
        });
    }
    solve_constrained(op, &vec![0.0; op.n_vertices()], condition)
}

/// Solve `-Lap u = rhs` under the given constraints.
///
/// Without constraints the right-hand side must have zero area-weighted
/// mean (the compatibility condition on a closed surface); the returned
/// solution then has zero weighted mean and is gauge-flagged.
pub fn solve_poisson(
    op: &LaplaceOperator,
    rhs: &[f64],
    condition: &DirichletCondition,
) -> Result<EllipticSolution, SolveError> {
    op.check_field(rhs)?;
    condition.validate(op.n_vertices())?;
    if condition.is_empty() {
        check_all_constrained_or_connected(op, condition)?;
        return solve_unconstrained(op, rhs);
    }
    solve_constrained(op, rhs, condition)
}

/// Eliminate constrained vertices and run CG on the reduced symmetric
/// system.
fn solve_constrained(
    op: &LaplaceOperator,
    rhs: &[f64],
    condition: &DirichletCondition,
) -> Result<EllipticSolution, SolveError> {
    let n = op.n_vertices();
    check_all_constrained_or_connected(op, condition)?;

    let mut fixed_value = vec![None; n];
    for &(v, value) in condition.entries() {
        fixed_value[v] = Some(value);
    }
    let free: Vec<usize> = (0..n).filter(|&v| fixed_value[v].is_none()).collect();
    let mut index_in_free = vec![usize::MAX; n];
    for (i, &v) in free.iter().enumerate() {
        index_in_free[v] = i;
    }

    // b = diag(P) rhs restricted to free vertices, plus the eliminated
    // columns' contributions w * fixed value.
    let mut b = Vec::with_capacity(free.len());
    for &v in &free {
        let mut bv = op.dual_area(v) * rhs[v];
        for &(nb, w) in op.neighbors(v) {
            if let Some(value) = fixed_value[nb] {
                bv += w * value;
            }
        }
        b.push(bv);
    }

    let matvec = |x: &[f64], out: &mut [f64]| {
        for (i, &v) in free.iter().enumerate() {
            let mut acc = op.weight_sum(v) * x[i];
            for &(nb, w) in op.neighbors(v) {
                if fixed_value[nb].is_none() {
                    acc -= w * x[index_in_free[nb]];
                }
            }
            out[i] = acc;
        }
    };

    let (x, iterations, residual) = conjugate_gradient(matvec, &b, None)?;
    let mut u = vec![0.0; n];
    for (i, &v) in free.iter().enumerate() {
        u[v] = x[i];
    }
    for &(v, value) in condition.entries() {
        u[v] = value;
    }
    Ok(EllipticSolution {
        u,
        gauge_fixed: false,
        iterations,
        residual,
    })
}

/// Unconstrained Poisson solve on the constant-orthogonal complement.
fn solve_unconstrained(
    op: &LaplaceOperator,
    rhs: &[f64],
) -> Result<EllipticSolution, SolveError> {
    let n = op.n_vertices();
    let total_area: f64 = (0..n).map(|v| op.dual_area(v)).sum();
    let weighted_sum: f64 = (0..n).map(|v| op.dual_area(v) * rhs[v]).sum();
    let mean = weighted_sum / total_area;
    let max_abs = rhs.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    if max_abs > 0.0 && mean.abs() > COMPATIBILITY_TOLERANCE * max_abs {
        return Err(SolveError::IncompatibleRhs { mean });
    }

    let b: Vec<f64> = (0..n).map(|v| op.dual_area(v) * rhs[v]).collect();
    let matvec = |x: &[f64], out: &mut [f64]| op.apply_symmetric_into(x, out);
    // Project the constant kernel out of the iterates so rounding does not
    // let it drift back in.
    let deflate = |x: &mut [f64]| {
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        x.iter_mut().for_each(|v| *v -= mean);
    };
    let (mut u, iterations, residual) = conjugate_gradient(matvec, &b, Some(&deflate))?;

    // Canonical representative: zero area-weighted mean.
    let shift = (0..n).map(|v| op.dual_area(v) * u[v]).sum::<f64>() / total_area;
    u.iter_mut().for_each(|x| *x -= shift);
    Ok(EllipticSolution {
        u,
        gauge_fixed: true,
        iterations,
        residual,
    })
}

/// Plain conjugate gradients for a symmetric positive (semi)definite
/// matvec. Returns (solution, iterations, relative residual).
fn conjugate_gradient(
    matvec: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    deflate: Option<&dyn Fn(&mut [f64])>,
) -> Result<(Vec<f64>, usize, f64), SolveError> {
    let n = b.len();
    let norm_b = dot(b, b).sqrt();
    if norm_b == 0.0 {
        return Ok((vec![0.0; n], 0, 0.0));
    }
    let max_iter = CG_MAX_ITER_FACTOR * n.max(1);

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    if let Some(d) = deflate {
        d(&mut r);
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);

    for iter in 1..=max_iter {
        matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(SolveError::NonConvergence {
                iterations: iter,
                residual: rr.sqrt() / norm_b,
            });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if let Some(d) = deflate {
            d(&mut r);
            d(&mut x);
        }
        let rr_next = dot(&r, &r);
        let rel = rr_next.sqrt() / norm_b;
        if rel <= CG_TOLERANCE {
            return Ok((x, iter, rel));
        }
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    Err(SolveError::NonConvergence {
        iterations: max_iter,
        residual: rr.sqrt() / norm_b,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Every connected component must hold a constraint, except that a single
/// fully unconstrained component is the legitimate gauge case.
fn check_all_constrained_or_connected(
    op: &LaplaceOperator,
    condition: &DirichletCondition,
) -> Result<(), SolveError> {
    let n = op.n_vertices();
    let mut component = vec![usize::MAX; n];
    let mut n_components = 0;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = n_components;
        n_components += 1;
        let mut stack = vec![start];
        component[start] = id;
        while let Some(v) = stack.pop() {
            for &(nb, _) in op.neighbors(v) {
                if component[nb] == usize::MAX {
                    component[nb] = id;
                    stack.push(nb);
                }
            }
        }
    }
    if condition.is_empty() {
        if n_components > 1 {
            let vertex = component.iter().position(|&c| c == 1).unwrap_or(0);
            return Err(SolveError::UnconstrainedComponent { vertex });
        }
        return Ok(());
    }
    let mut has_constraint = vec![false; n_components];
    for &(v, _) in condition.entries() {
        has_constraint[component[v]] = true;
    }
    if let Some(missing) = has_constraint.iter().position(|&c| !c) {
        let vertex = component.iter().position(|&c| c == missing).unwrap_or(0);
        return Err(SolveError::UnconstrainedComponent { vertex });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::{assemble_laplacian, build_dual_metrics, LaplaceOperator};
    use crate::mesh::{generate_icosphere, generate_tetrahedron, SurfaceMesh};

    fn op_of(mesh: &SurfaceMesh) -> LaplaceOperator {
        let dm = build_dual_metrics(mesh).unwrap();
        assemble_laplacian(mesh, &dm).unwrap()
    }

    #[test]
    fn laplace_tetrahedron_pinned_vertex_propagates() {
        let op = op_of(&generate_tetrahedron(1.0).unwrap());
        let h = 4.25;
        let sol = solve_laplace(&op, &DirichletCondition::single(0, h)).unwrap();
        for &x in &sol.u {
            assert!((x - h).abs() < 1e-10, "value {x}");
        }
        assert!(!sol.gauge_fixed);
    }

    #[test]
    fn laplace_unconstrained_returns_flagged_zero_field() {
        let op = op_of(&generate_tetrahedron(1.0).unwrap());
        let sol = solve_laplace(&op, &DirichletCondition::empty()).unwrap();
        assert!(sol.gauge_fixed);
        assert!(sol.u.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn laplace_obeys_discrete_maximum_principle() {
        let m = generate_icosphere(1.0, 3).unwrap();
        let op = op_of(&m);
        // Two antipodal vertices of the base icosahedron survive projection.
        let top = (0..m.n_vertices())
            .max_by(|&a, &b| m.position(a).z.total_cmp(&m.position(b).z))
            .unwrap();
        let bottom = (0..m.n_vertices())
            .min_by(|&a, &b| m.position(a).z.total_cmp(&m.position(b).z))
            .unwrap();
        let sol = solve_laplace(
            &op,
            &DirichletCondition::new(vec![(top, 1.0), (bottom, 0.0)]),
        )
        .unwrap();
        for &x in &sol.u {
            assert!((-1e-10..=1.0 + 1e-10).contains(&x), "value {x} outside [0, 1]");
        }
    }

    #[test]
    fn poisson_zero_rhs_matches_laplace() {
        let op = op_of(&generate_tetrahedron(1.0).unwrap());
        let h = 7.5;
        let sol = solve_poisson(&op, &[0.0; 4], &DirichletCondition::single(0, h)).unwrap();
        for &x in &sol.u {
            assert!((x - h).abs() < 1e-10);
        }
    }

    #[test]
    fn poisson_manufactured_solution_roundtrip() {
        let m = generate_icosphere(1.0, 2).unwrap();
        let op = op_of(&m);
        let f: Vec<f64> = (0..m.n_vertices())
            .map(|i| ((i * 11 + 3) as f64 * 0.37).sin())
            .collect();
        // rhs = -Lap f, constraint pins f at one vertex.
        let rhs: Vec<f64> = op.apply(&f).unwrap().iter().map(|x| -x).collect();
        let sol = solve_poisson(&op, &rhs, &DirichletCondition::single(0, f[0])).unwrap();
        let max_err = sol
            .u
            .iter()
            .zip(&f)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(max_err < 1e-9, "recovered field off by {max_err}");
    }

    #[test]
    fn poisson_residual_bound() {
        let m = generate_icosphere(1.0, 2).unwrap();
        let op = op_of(&m);
        let rhs: Vec<f64> = (0..m.n_vertices())
            .map(|i| ((i * 5 + 2) as f64 * 0.71).cos())
            .collect();
        let sol = solve_poisson(&op, &rhs, &DirichletCondition::single(3, 0.5)).unwrap();
        // || Lap u + rhs ||_inf < 1e-9 ||rhs||_inf away from the pin.
        let lap = op.apply(&sol.u).unwrap();
        let rhs_max = rhs.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
        for v in 0..m.n_vertices() {
            if v == 3 {
                continue;
            }
            assert!(
                (lap[v] + rhs[v]).abs() < 1e-9 * rhs_max,
                "residual at {v}: {}",
                lap[v] + rhs[v]
            );
        }
    }

    #[test]
    fn poisson_incompatible_rhs_rejected() {
        let op = op_of(&generate_tetrahedron(1.0).unwrap());
        let err = solve_poisson(&op, &[1.0; 4], &DirichletCondition::empty()).unwrap_err();
        assert!(matches!(err, SolveError::IncompatibleRhs { .. }));
    }

    #[test]
    fn poisson_compatible_unconstrained_solves_and_flags_gauge() {
        let op = op_of(&generate_tetrahedron(1.0).unwrap());
        // Weighted mean zero by symmetry (equal areas).
        let rhs = [1.0, -1.0, 1.0, -1.0];
        let sol = solve_poisson(&op, &rhs, &DirichletCondition::empty()).unwrap();
        assert!(sol.gauge_fixed);
        let lap = op.apply(&sol.u).unwrap();
        for v in 0..4 {
            assert!((lap[v] + rhs[v]).abs() < 1e-9);
        }
    }

    #[test]
    fn disconnected_component_without_constraint_errors() {
        // Two disjoint triangles.
        use nalgebra::Point3;
        let vs = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(5.0, 0.0, 0.0),
            Point3::new(6.0, 0.0, 0.0),
            Point3::new(5.0, 1.0, 0.0),
        ];
        let m = SurfaceMesh::new(vs, vec![[0, 1, 2], [3, 4, 5]]).unwrap();
        let op = op_of(&m);
        let err = solve_laplace(&op, &DirichletCondition::single(0, 1.0)).unwrap_err();
        assert!(matches!(err, SolveError::UnconstrainedComponent { .. }));
    }

    #[test]
    fn constraint_validation() {
        let op = op_of(&generate_tetrahedron(1.0).unwrap());
        assert!(solve_laplace(&op, &DirichletCondition::single(9, 1.0)).is_err());
        assert!(
            solve_laplace(&op, &DirichletCondition::new(vec![(1, 1.0), (1, 2.0)])).is_err()
        );
    }
}

//! The discrete Laplace operator and its assembly from dual metrics.
//!
//! At a vertex v the operator evaluates
//!
//! ```text
//! (L u)[v] = (1 / P_v) * sum over edges (v, u_i) of w_i * (u[u_i] - u[v])
//! ```
//!
//! with `w_i = dual edge length / primal edge length` and `P_v` the dual
//! cell area. The matrix `M` with `M[v][u] = -w` off the diagonal and the
//! weight sum on it is symmetric positive semidefinite; `L = -diag(1/P) M`.

use super::{DecError, DualMetrics};
use crate::mesh::SurfaceMesh;
use std::io::Write;

/// Sparse discrete Laplacian in factored form: symmetric edge weights plus
/// the inverse dual-area scaling. Immutable after assembly.
#[derive(Debug, Clone)]
pub struct LaplaceOperator {
    /// Weight of each canonical edge: dual length / primal length.
    weights: Vec<f64>,
    /// Dual cell area of each vertex.
    dual_areas: Vec<f64>,
    /// Per vertex: (neighbor vertex, edge weight), ascending by neighbor.
    neighbors: Vec<Vec<(usize, f64)>>,
    /// Canonical edge endpoints, copied from the mesh.
    edges: Vec<[usize; 2]>,
    /// Per vertex: sum of incident edge weights.
    weight_sums: Vec<f64>,
}

impl LaplaceOperator {
    pub fn n_vertices(&self) -> usize {
        self.dual_areas.len()
    }

    pub fn n_edges(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn dual_area(&self, v: usize) -> f64 {
        self.dual_areas[v]
    }

    pub fn dual_areas(&self) -> &[f64] {
        &self.dual_areas
    }

    pub fn weight_sum(&self, v: usize) -> f64 {
        self.weight_sums[v]
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.neighbors[v]
    }

    /// Apply the operator to a vertex field, checking the field first.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>, DecError> {
        self.check_field(u)?;
        let mut out = vec![0.0; u.len()];
        self.apply_into(u, &mut out);
        Ok(out)
    }

    /// Apply without allocation or validation; lengths are the caller's
    /// contract.
    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.n_vertices());
        debug_assert_eq!(out.len(), self.n_vertices());
        for (v, row) in self.neighbors.iter().enumerate() {
            let uv = u[v];
            let mut acc = 0.0;
            for &(nb, w) in row {
                acc += w * (u[nb] - uv);
            }
            out[v] = acc / self.dual_areas[v];
        }
    }

    /// Apply the symmetric factor `M = diag(weight sums) - W`, i.e.
    /// `(M u)[v] = sum_e w_e (u[v] - u[nb])`, without the 1/P scaling.
    pub fn apply_symmetric_into(&self, u: &[f64], out: &mut [f64]) {
        debug_assert_eq!(u.len(), self.n_vertices());
        for (v, row) in self.neighbors.iter().enumerate() {
            let uv = u[v];
            let mut acc = 0.0;
            for &(nb, w) in row {
                acc += w * (uv - u[nb]);
            }
            out[v] = acc;
        }
    }

    /// Full matrix entry of the operator (zero off the sparsity pattern).
    pub fn matrix_entry(&self, row: usize, col: usize) -> f64 {
        if row == col {
            return -self.weight_sums[row] / self.dual_areas[row];
        }
        self.neighbors[row]
            .iter()
            .find(|(nb, _)| *nb == col)
            .map(|(_, w)| w / self.dual_areas[row])
            .unwrap_or(0.0)
    }

    /// All nonzero matrix entries, row-major, columns ascending within each
    /// row.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.neighbors.iter().enumerate().flat_map(move |(v, row)| {
            let before = row
                .iter()
                .take_while(move |(nb, _)| *nb < v)
                .map(move |&(nb, w)| (v, nb, w / self.dual_areas[v]));
            let diag = std::iter::once((v, v, -self.weight_sums[v] / self.dual_areas[v]));
            let after = row
                .iter()
                .skip_while(move |(nb, _)| *nb < v)
                .map(move |&(nb, w)| (v, nb, w / self.dual_areas[v]));
            before.chain(diag).chain(after)
        })
    }

    /// Dump the operator as "row col value" triplets, row-major, full
    /// precision.
    pub fn write_triplets<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (r, c, v) in self.entries() {
            writeln!(out, "{r} {c} {v:.16e}")?;
        }
        Ok(())
    }

    pub(crate) fn check_field(&self, u: &[f64]) -> Result<(), DecError> {
        if u.len() != self.n_vertices() {
            return Err(DecError::FieldLengthMismatch {
                got: u.len(),
                expected: self.n_vertices(),
            });
        }
        if let Some(v) = u.iter().position(|x| !x.is_finite()) {
            return Err(DecError::NonFiniteField { vertex: v });
        }
        Ok(())
    }

    pub(crate) fn from_parts(
        weights: Vec<f64>,
        dual_areas: Vec<f64>,
        edges: Vec<[usize; 2]>,
    ) -> Result<Self, DecError> {
        if let Some((v, &area)) = dual_areas
            .iter()
            .enumerate()
            .find(|&(_, &a)| !(a > 0.0))
        {
            return Err(DecError::NonPositiveDualArea { vertex: v, area });
        }
        let n = dual_areas.len();
        let mut neighbors: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut weight_sums = vec![0.0; n];
        for (e, &[a, b]) in edges.iter().enumerate() {
            let w = weights[e];
            neighbors[a].push((b, w));
            neighbors[b].push((a, w));
            weight_sums[a] += w;
            weight_sums[b] += w;
        }
        for row in &mut neighbors {
            row.sort_unstable_by_key(|&(nb, _)| nb);
        }
        Ok(Self {
            weights,
            dual_areas,
            neighbors,
            edges,
            weight_sums,
        })
    }
}

/// Assemble the Laplacian directly from the dual metrics.
pub fn assemble_laplacian(
    mesh: &SurfaceMesh,
    metrics: &DualMetrics,
) -> Result<LaplaceOperator, DecError> {
    let weights: Vec<f64> = metrics
        .dual_edge_lengths
        .iter()
        .zip(&metrics.primal_edge_lengths)
        .map(|(d, p)| d / p)
        .collect();
    LaplaceOperator::from_parts(
        weights,
        metrics.dual_cell_areas.clone(),
        mesh.edges().to_vec(),
    )
}

/// Compare every edge weight against the cotangent formula
/// `(cot a + cot b) / 2` (a single term for boundary edges) and return the
/// largest absolute discrepancy. Independent check of the circumcentric
/// construction.
pub fn cotan_crosscheck(mesh: &SurfaceMesh, metrics: &DualMetrics) -> f64 {
    let mut max_discrepancy: f64 = 0.0;
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let mut cotan_sum = 0.0;
        for &t in mesh.edge_triangles(e) {
            let tri = mesh.triangles()[t];
            let opposite = tri
                .iter()
                .copied()
                .find(|&v| v != a && v != b)
                .expect("edge triangle lists its opposite vertex");
            let u = mesh.position(a) - mesh.position(opposite);
            let v = mesh.position(b) - mesh.position(opposite);
            cotan_sum += u.dot(&v) / u.cross(&v).norm();
        }
        let w = metrics.dual_edge_lengths[e] / metrics.primal_edge_lengths[e];
        max_discrepancy = max_discrepancy.max((w - cotan_sum / 2.0).abs());
    }
    max_discrepancy
}

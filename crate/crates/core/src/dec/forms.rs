//! Exterior-calculus building blocks: incidence matrices and diagonal Hodge
//! stars, plus a second assembly route for the Laplacian that composes them.
//!
//! `d0` (the transpose of the vertex-on-edge incidence matrix) turns vertex
//! fields into edge differences; `d1` turns edge fields into oriented
//! triangle sums. The 0-form Laplacian is the composition
//! `-star0^-1 * d0^T * star1 * d0`, which must agree entrywise with the
//! direct assembly in [`super::assemble_laplacian`].

use super::{DecError, DualMetrics, LaplaceOperator};
use crate::mesh::SurfaceMesh;
use std::collections::BTreeMap;

/// Signed incidence matrix of k-cells on (k+1)-cells: one row per
/// (k+1)-cell with entries of -1/+1 per incident k-cell by orientation.
#[derive(Debug, Clone)]
pub struct IncidenceMatrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<Vec<(usize, i8)>>,
}

impl IncidenceMatrix {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, r: usize) -> &[(usize, i8)] {
        &self.rows[r]
    }

    pub fn entry(&self, r: usize, c: usize) -> i8 {
        self.rows[r]
            .iter()
            .find(|(col, _)| *col == c)
            .map(|&(_, s)| s)
            .unwrap_or(0)
    }

    /// y = D x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols, "incidence apply: length mismatch");
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, s)| f64::from(s) * x[c]).sum())
            .collect()
    }

    /// y = D^T x.
    pub fn transpose_apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_rows, "incidence transpose apply: length mismatch");
        let mut out = vec![0.0; self.n_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, s) in row {
                out[c] += f64::from(s) * x[r];
            }
        }
        out
    }
}

/// Build the incidence matrix of k-cells on (k+1)-cells.
///
/// * `k = 0`: rows are edges, columns are vertices; applying it to a vertex
///   field yields `u[head] - u[tail]` per canonical edge.
/// * `k = 1`: rows are triangles, columns are edges, with the sign relating
///   triangle traversal to the canonical edge direction.
pub fn build_incidence(mesh: &SurfaceMesh, k: usize) -> IncidenceMatrix {
    match k {
        0 => {
            let rows = mesh
                .edges()
                .iter()
                .map(|&[tail, head]| vec![(tail, -1i8), (head, 1i8)])
                .collect();
            IncidenceMatrix {
                n_rows: mesh.n_edges(),
                n_cols: mesh.n_vertices(),
                rows,
            }
        }
        1 => {
            let rows = (0..mesh.n_triangles())
                .map(|t| {
                    let mut row: Vec<(usize, i8)> = mesh
                        .triangle_edge_signs(t)
                        .iter()
                        .map(|&(e, s)| (e, s))
                        .collect();
                    row.sort_unstable_by_key(|&(e, _)| e);
                    row
                })
                .collect();
            IncidenceMatrix {
                n_rows: mesh.n_triangles(),
                n_cols: mesh.n_edges(),
                rows,
            }
        }
        _ => panic!("incidence matrices are defined for k = 0 and k = 1 on a surface mesh"),
    }
}

/// Diagonal Hodge stars: dual volume over primal volume per cell.
#[derive(Debug, Clone)]
pub struct HodgeStar {
    /// Vertices: dual cell area / 1.
    pub star0: Vec<f64>,
    /// Edges: dual edge length / primal edge length.
    pub star1: Vec<f64>,
}

pub fn build_hodge(_mesh: &SurfaceMesh, metrics: &DualMetrics) -> HodgeStar {
    HodgeStar {
        star0: metrics.dual_cell_areas.clone(),
        star1: metrics
            .dual_edge_lengths
            .iter()
            .zip(&metrics.primal_edge_lengths)
            .map(|(d, p)| d / p)
            .collect(),
    }
}

/// Assemble the Laplacian by composing `d0`, `star1` and `star0` as generic
/// sparse factors, without reading the per-edge weights directly. Agrees
/// entrywise with [`super::assemble_laplacian`].
pub fn laplacian_from_forms(
    mesh: &SurfaceMesh,
    metrics: &DualMetrics,
) -> Result<LaplaceOperator, DecError> {
    let d0 = build_incidence(mesh, 0);
    let hodge = build_hodge(mesh, metrics);

    // A = d0^T * diag(star1) * d0, accumulated row by row of d0.
    let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (e, row) in d0.rows.iter().enumerate() {
        let s1 = hodge.star1[e];
        for &(p, sp) in row {
            for &(q, sq) in row {
                *entries.entry((p, q)).or_insert(0.0) +=
                    f64::from(sp) * f64::from(sq) * s1;
            }
        }
    }

    // Off-diagonal entries of A are -w per edge; recover the per-edge
    // weight vector in canonical edge order.
    let weights: Vec<f64> = mesh
        .edges()
        .iter()
        .map(|&[a, b]| -entries.get(&(a, b)).copied().unwrap_or(0.0))
        .collect();
    LaplaceOperator::from_parts(weights, hodge.star0, mesh.edges().to_vec())
}

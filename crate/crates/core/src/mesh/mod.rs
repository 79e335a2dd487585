//! Triangulated 2-manifold surface meshes: construction, indexing, adjacency.
//!
//! A [`SurfaceMesh`] is the primal simplicial complex (vertices, edges,
//! triangles) that the dual-complex machinery in [`crate::dec`] is built on.
//! Edges are stored canonically as `(min, max)` vertex pairs; each triangle
//! keeps, per edge, the sign relating its traversal direction to the
//! canonical direction.

mod generate;
mod io;
mod quality;

pub use generate::{generate_flat_grid, generate_icosphere, generate_tetrahedron, GridDiagonal};
pub use io::{load_mesh, load_mesh_str, save_mesh, write_mesh_string, MeshFormat};
pub use quality::{validate, MeshQualityReport, OBTUSE_ANGLE_TOLERANCE};

use nalgebra::Point3;
use std::collections::BTreeMap;
use thiserror::Error;

/// Triangle areas below this fraction of the mesh mean are rejected.
pub const DEGENERATE_AREA_FRACTION: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("non-manifold edge ({a}, {b}) shared by more than 2 triangles")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("triangle {index} is degenerate (area {area:.3e}, threshold {threshold:.3e})")]
    DegenerateTriangle {
        index: usize,
        area: f64,
        threshold: f64,
    },
    #[error("triangle {triangle} references vertex {index} but the mesh has {n_vertices} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        n_vertices: usize,
    },
    #[error("vertex {index} has a non-finite coordinate")]
    NonFiniteCoordinate { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Indexed triangle mesh with canonical edges and full adjacency.
///
/// Immutable after construction; shared read access is safe.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[usize; 3]>,
    /// Canonical edges `(min, max)`, sorted lexicographically.
    edges: Vec<[usize; 2]>,
    /// Per triangle: the edge index and the sign (+1 when the triangle
    /// traverses the edge in canonical low-to-high direction) for each of
    /// its three boundary edges, in traversal order (v0v1, v1v2, v2v0).
    triangle_edges: Vec<[(usize, i8); 3]>,
    /// Per edge: the 1 or 2 incident triangle indices.
    edge_to_triangles: Vec<Vec<usize>>,
    /// Per vertex: incident edge indices, in cyclic order where the vertex
    /// star is a single fan.
    vertex_to_edges: Vec<Vec<usize>>,
    /// Lookup from canonical vertex pair to edge index.
    edge_index: BTreeMap<(usize, usize), usize>,
}

impl SurfaceMesh {
    /// Build a mesh from vertex positions and triangles, deriving the edge
    /// list and adjacency. Triangle orientation is taken as given.
    pub fn new(
        vertices: Vec<Point3<f64>>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self, MeshError> {
        for (i, p) in vertices.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(MeshError::NonFiniteCoordinate { index: i });
            }
        }
        let n = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= n {
                    return Err(MeshError::IndexOutOfRange {
                        triangle: t,
                        index: v,
                        n_vertices: n,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateTriangle {
                    index: t,
                    area: 0.0,
                    threshold: 0.0,
                });
            }
        }

        // Degeneracy gate relative to the mean triangle area.
        let areas: Vec<f64> = triangles
            .iter()
            .map(|tri| triangle_area_of(&vertices, tri))
            .collect();
        if !areas.is_empty() {
            let mean = areas.iter().sum::<f64>() / areas.len() as f64;
            let threshold = DEGENERATE_AREA_FRACTION * mean;
            for (t, &a) in areas.iter().enumerate() {
                if a <= threshold {
                    return Err(MeshError::DegenerateTriangle {
                        index: t,
                        area: a,
                        threshold,
                    });
                }
            }
        }

        // Canonical edge set. BTreeMap iteration gives a deterministic,
        // lexicographically sorted edge list.
        let mut edge_index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let next = edge_index.len();
                edge_index.entry(key).or_insert(next);
            }
        }
        // Re-number in sorted key order.
        let mut edges = Vec::with_capacity(edge_index.len());
        for (i, (key, idx)) in edge_index.iter_mut().enumerate() {
            *idx = i;
            edges.push([key.0, key.1]);
        }

        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut edge_to_triangles = vec![Vec::new(); edges.len()];
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [(0usize, 0i8); 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let e = edge_index[&(a.min(b), a.max(b))];
                te[k] = (e, if a < b { 1 } else { -1 });
                edge_to_triangles[e].push(t);
                if edge_to_triangles[e].len() > 2 {
                    return Err(MeshError::NonManifoldEdge {
                        a: a.min(b),
                        b: a.max(b),
                    });
                }
            }
            triangle_edges.push(te);
        }

        let vertex_to_edges =
            cyclic_vertex_edges(n, &edges, &triangle_edges, &edge_to_triangles, &triangles);

        Ok(Self {
            vertices,
            triangles,
            edges,
            triangle_edges,
            edge_to_triangles,
            vertex_to_edges,
            edge_index,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn position(&self, v: usize) -> Point3<f64> {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Edge index for an unordered vertex pair, if the edge exists.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&(a.min(b), a.max(b))).copied()
    }

    /// The 1 or 2 triangles incident to an edge.
    pub fn edge_triangles(&self, e: usize) -> &[usize] {
        &self.edge_to_triangles[e]
    }

    /// Incident edges of a vertex, cyclically ordered where possible.
    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_to_edges[v]
    }

    /// Per-edge `(edge index, orientation sign)` of a triangle, in traversal
    /// order.
    pub fn triangle_edge_signs(&self, t: usize) -> &[(usize, i8); 3] {
        &self.triangle_edges[t]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_to_triangles[e].len() == 1
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        (self.vertices[b] - self.vertices[a]).norm()
    }

    /// The endpoint of edge `e` that is not `v`.
    pub fn edge_other_vertex(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        triangle_area_of(&self.vertices, &self.triangles[t])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Indices of vertices lying on at least one boundary edge, ascending.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut on_boundary = vec![false; self.vertices.len()];
        for (e, tris) in self.edge_to_triangles.iter().enumerate() {
            if tris.len() == 1 {
                on_boundary[self.edges[e][0]] = true;
                on_boundary[self.edges[e][1]] = true;
            }
        }
        (0..self.vertices.len()).filter(|&v| on_boundary[v]).collect()
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.edge_to_triangles.iter().filter(|t| t.len() == 1).count()
    }

    /// True when every interior edge is traversed once in each direction by
    /// its two triangles.
    pub fn orientation_consistent(&self) -> bool {
        let mut signs: Vec<i8> = vec![0; self.edges.len()];
        for te in &self.triangle_edges {
            for &(e, s) in te {
                signs[e] += s;
            }
        }
        signs
            .iter()
            .enumerate()
            .all(|(e, &s)| if self.is_boundary_edge(e) { true } else { s == 0 })
    }
}

fn triangle_area_of(vertices: &[Point3<f64>], tri: &[usize; 3]) -> f64 {
    let a = vertices[tri[0]];
    let ab = vertices[tri[1]] - a;
    let ac = vertices[tri[2]] - a;
    0.5 * ab.cross(&ac).norm()
}

/// Order each vertex's incident edges by walking the triangle fan. Falls
/// back to ascending index order for vertices whose star is not a single
/// fan (non-manifold or multiply-bounded stars).
fn cyclic_vertex_edges(
    n_vertices: usize,
    edges: &[[usize; 2]],
    triangle_edges: &[[(usize, i8); 3]],
    edge_to_triangles: &[Vec<usize>],
    triangles: &[[usize; 3]],
) -> Vec<Vec<usize>> {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n_vertices];
    for (e, &[a, b]) in edges.iter().enumerate() {
        incident[a].push(e);
        incident[b].push(e);
    }

    // For triangle t and vertex v, the two edges of t incident to v.
    let edges_at = |t: usize, v: usize| -> [usize; 2] {
        let mut out = [usize::MAX; 2];
        let mut k = 0;
        for &(e, _) in &triangle_edges[t] {
            if edges[e][0] == v || edges[e][1] == v {
                out[k] = e;
                k += 1;
            }
        }
        debug_assert_eq!(k, 2, "triangle {t} does not contain vertex {v} twice");
        out
    };

    let mut result = Vec::with_capacity(n_vertices);
    for v in 0..n_vertices {
        let inc = &incident[v];
        if inc.len() < 2 {
            result.push(inc.clone());
            continue;
        }
        // Start from a boundary edge when there is one so an open fan is
        // walked end to end.
        let start = *inc
            .iter()
            .find(|&&e| edge_to_triangles[e].len() == 1)
            .unwrap_or(&inc[0]);
        let mut order = vec![start];
        let mut prev_tri: Option<usize> = None;
        let mut current = start;
        loop {
            let next_tri = edge_to_triangles[current]
                .iter()
                .copied()
                .find(|&t| Some(t) != prev_tri && triangles[t].contains(&v));
            let Some(t) = next_tri else { break };
            let [e1, e2] = edges_at(t, v);
            let next = if e1 == current { e2 } else { e1 };
            if next == start {
                break; // closed fan
            }
            order.push(next);
            prev_tri = Some(t);
            current = next;
        }
        if order.len() == inc.len() {
            result.push(order);
        } else {
            let mut sorted = inc.clone();
            sorted.sort_unstable();
            result.push(sorted);
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> SurfaceMesh {
        generate_tetrahedron(1.0).unwrap()
    }

    #[test]
    fn tetrahedron_combinatorics() {
        let m = tetra();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_edges(), 6);
        assert_eq!(m.n_triangles(), 4);
        assert_eq!(m.n_boundary_edges(), 0);
    }

    #[test]
    fn orientation_is_consistent_on_generated_meshes() {
        assert!(tetra().orientation_consistent());
        assert!(generate_icosphere(1.0, 2).unwrap().orientation_consistent());
        assert!(generate_flat_grid(4, 3, 0.5, GridDiagonal::RightIsoceles)
            .unwrap()
            .orientation_consistent());
    }

    #[test]
    fn non_manifold_edge_rejected() {
        // Three triangles share the edge (0, 1).
        let vs = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, -1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let tris = vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]];
        match SurfaceMesh::new(vs, tris) {
            Err(MeshError::NonManifoldEdge { a: 0, b: 1 }) => {}
            other => panic!("expected non-manifold error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let vs = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0), // collinear
            Point3::new(0.0, 1.0, 0.0),
        ];
        let tris = vec![[0, 1, 3], [0, 1, 2]];
        assert!(matches!(
            SurfaceMesh::new(vs, tris),
            Err(MeshError::DegenerateTriangle { index: 1, .. })
        ));
    }

    #[test]
    fn vertex_edges_are_cyclic_on_closed_mesh() {
        let m = generate_icosphere(1.0, 1).unwrap();
        for v in 0..m.n_vertices() {
            let ring = m.vertex_edges(v);
            // Consecutive edges in the ring (wrapping) must share a triangle.
            for i in 0..ring.len() {
                let e1 = ring[i];
                let e2 = ring[(i + 1) % ring.len()];
                let shared = m
                    .edge_triangles(e1)
                    .iter()
                    .any(|t| m.edge_triangles(e2).contains(t));
                assert!(shared, "edges {e1} and {e2} around vertex {v} share no triangle");
            }
        }
    }

    #[test]
    fn edge_lookup_and_lengths() {
        let m = tetra();
        for e in 0..m.n_edges() {
            let [a, b] = m.edges()[e];
            assert_eq!(m.edge_between(a, b), Some(e));
            assert_eq!(m.edge_between(b, a), Some(e));
            assert!((m.edge_length(e) - 1.0).abs() < 1e-14);
        }
        assert_eq!(m.edge_between(0, 0), None);
    }
}

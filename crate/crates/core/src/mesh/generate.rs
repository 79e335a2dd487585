//! Built-in mesh generators: regular tetrahedron, icosphere, flat grid.

use super::{MeshError, SurfaceMesh};
use nalgebra::Point3;
use std::collections::HashMap;

/// Diagonal split pattern for [`generate_flat_grid`]. Every unit cell is cut
/// into two right-isoceles triangles along the same diagonal direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridDiagonal {
    RightIsoceles,
}

/// Surface of a regular tetrahedron with the given edge length, outward
/// oriented.
pub fn generate_tetrahedron(edge_length: f64) -> Result<SurfaceMesh, MeshError> {
    if !(edge_length > 0.0) {
        return Err(MeshError::InvalidParameter(format!(
            "edge_length must be positive, got {edge_length}"
        )));
    }
    // Alternate cube corners; pairwise distance 2*sqrt(2) before scaling.
    let s = edge_length / (2.0 * 2.0_f64.sqrt());
    let vertices = vec![
        Point3::new(s, s, s),
        Point3::new(s, -s, -s),
        Point3::new(-s, s, -s),
        Point3::new(-s, -s, s),
    ];
    let triangles = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
    SurfaceMesh::new(vertices, triangles)
}

/// Icosahedron subdivided `subdivisions` times, every vertex projected onto
/// the sphere of the given radius. Closed and outward oriented.
pub fn generate_icosphere(radius: f64, subdivisions: u32) -> Result<SurfaceMesh, MeshError> {
    if !(radius > 0.0) {
        return Err(MeshError::InvalidParameter(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if subdivisions > 7 {
        return Err(MeshError::InvalidParameter(format!(
            "subdivisions must be at most 7, got {subdivisions}"
        )));
    }

    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ]
    .iter()
    .map(|v| project(Point3::new(v[0], v[1], v[2]), radius))
    .collect();

    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoint_cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut new_faces = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut vertices, &mut midpoint_cache, radius);
            let bc = midpoint(b, c, &mut vertices, &mut midpoint_cache, radius);
            let ca = midpoint(c, a, &mut vertices, &mut midpoint_cache, radius);
            new_faces.push([a, ab, ca]);
            new_faces.push([b, bc, ab]);
            new_faces.push([c, ca, bc]);
            new_faces.push([ab, bc, ca]);
        }
        faces = new_faces;
    }

    SurfaceMesh::new(vertices, faces)
}

fn project(p: Point3<f64>, radius: f64) -> Point3<f64> {
    let n = p.coords.norm();
    Point3::from(p.coords * (radius / n))
}

fn midpoint(
    a: usize,
    b: usize,
    vertices: &mut Vec<Point3<f64>>,
    cache: &mut HashMap<(usize, usize), usize>,
    radius: f64,
) -> usize {
    let key = (a.min(b), a.max(b));
    if let Some(&idx) = cache.get(&key) {
        return idx;
    }
    let mid = Point3::from((vertices[a].coords + vertices[b].coords) * 0.5);
    let idx = vertices.len();
    vertices.push(project(mid, radius));
    cache.insert(key, idx);
    idx
}

/// Planar grid of `nx` by `ny` vertices in the z = 0 plane with uniform
/// spacing, each cell split into two right-isoceles triangles along the
/// (+x, +y) diagonal. Counter-clockwise oriented seen from +z.
pub fn generate_flat_grid(
    nx: usize,
    ny: usize,
    spacing: f64,
    _diagonal: GridDiagonal,
) -> Result<SurfaceMesh, MeshError> {
    if nx < 2 || ny < 2 {
        return Err(MeshError::InvalidParameter(format!(
            "grid needs nx, ny >= 2, got {nx} x {ny}"
        )));
    }
    if !(spacing > 0.0) {
        return Err(MeshError::InvalidParameter(format!(
            "spacing must be positive, got {spacing}"
        )));
    }

    let mut vertices = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            vertices.push(Point3::new(i as f64 * spacing, j as f64 * spacing, 0.0));
        }
    }
    let at = |i: usize, j: usize| j * nx + i;
    let mut triangles = Vec::with_capacity(2 * (nx - 1) * (ny - 1));
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            triangles.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            triangles.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    SurfaceMesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::circumcenter;

    #[test]
    fn tetrahedron_edge_lengths_exact() {
        for &len in &[1.0, 2.0, 0.37] {
            let m = generate_tetrahedron(len).unwrap();
            for e in 0..m.n_edges() {
                assert!((m.edge_length(e) - len).abs() < 1e-14 * len.max(1.0));
            }
        }
    }

    #[test]
    fn tetrahedron_face_circumradius_closed_form() {
        // Equilateral triangle of side a has circumradius a / sqrt(3).
        let a = 2.0;
        let m = generate_tetrahedron(a).unwrap();
        let expected = a / 3.0_f64.sqrt();
        for tri in m.triangles() {
            let c = circumcenter(
                &m.position(tri[0]),
                &m.position(tri[1]),
                &m.position(tri[2]),
            )
            .unwrap();
            for &v in tri {
                assert!(((c - m.position(v)).norm() - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tetrahedron_rejects_bad_edge_length() {
        assert!(generate_tetrahedron(0.0).is_err());
        assert!(generate_tetrahedron(-1.0).is_err());
    }

    #[test]
    fn icosphere_level_zero_is_icosahedron() {
        let m = generate_icosphere(1.0, 0).unwrap();
        assert_eq!(m.n_vertices(), 12);
        assert_eq!(m.n_edges(), 30);
        assert_eq!(m.n_triangles(), 20);
    }

    #[test]
    fn icosphere_subdivision_counts_and_euler() {
        let m = generate_icosphere(1.0, 2).unwrap();
        assert_eq!(m.n_vertices(), 162);
        assert_eq!(m.n_triangles(), 320);
        let chi = m.n_vertices() as i64 - m.n_edges() as i64 + m.n_triangles() as i64;
        assert_eq!(chi, 2);
    }

    #[test]
    fn icosphere_vertices_on_sphere() {
        let m = generate_icosphere(3.0, 3).unwrap();
        let max_dev = m
            .vertices()
            .iter()
            .map(|p| (p.coords.norm() - 3.0).abs())
            .fold(0.0, f64::max);
        assert!(max_dev < 1e-12, "max radius deviation {max_dev}");
    }

    #[test]
    fn icosphere_rejects_deep_subdivision() {
        assert!(generate_icosphere(1.0, 8).is_err());
    }

    #[test]
    fn grid_2x2_counts() {
        let m = generate_flat_grid(2, 2, 1.0, GridDiagonal::RightIsoceles).unwrap();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_edges(), 5);
        assert_eq!(m.n_triangles(), 2);
    }

    #[test]
    fn grid_interior_vertex_has_six_edges() {
        let m = generate_flat_grid(3, 3, 0.7, GridDiagonal::RightIsoceles).unwrap();
        // Vertex (1,1) is the single interior vertex, index 4.
        assert_eq!(m.vertex_edges(4).len(), 6);
    }

    #[test]
    fn grid_is_open() {
        let m = generate_flat_grid(5, 4, 1.0, GridDiagonal::RightIsoceles).unwrap();
        assert!(m.n_boundary_edges() > 0);
        let report = crate::mesh::validate(&m);
        assert!(!report.is_closed);
    }

    #[test]
    fn grid_rejects_degenerate_dimensions() {
        assert!(generate_flat_grid(1, 5, 1.0, GridDiagonal::RightIsoceles).is_err());
        assert!(generate_flat_grid(3, 3, 0.0, GridDiagonal::RightIsoceles).is_err());
    }
}

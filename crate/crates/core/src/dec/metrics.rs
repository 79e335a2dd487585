//! Circumcentric dual complex: circumcenters, dual edge lengths, dual cell
//! areas.
//!
//! The dual 0-cell of a triangle is its circumcenter; the dual edge of a
//! primal edge is the pair of segments joining each adjacent circumcenter to
//! the edge midpoint; the dual 2-cell of a vertex is the union of the
//! quadrilaterals (vertex, edge midpoint, circumcenter, other edge midpoint)
//! over its incident triangles.
//!
//! Dual lengths are signed: a circumcenter that falls on the far side of an
//! edge (obtuse opposite angle) contributes negatively, which keeps the
//! cotangent identity `w_e = (cot a + cot b) / 2` exact on non-well-centered
//! meshes.

use super::DecError;
use crate::mesh::SurfaceMesh;
use nalgebra::{Point3, Vector3};

/// Per-triangle circumcenters and the derived dual measures.
#[derive(Debug, Clone)]
pub struct DualMetrics {
    /// Circumcenter of each triangle.
    pub circumcenters: Vec<Point3<f64>>,
    /// Midpoint of each canonical edge.
    pub edge_midpoints: Vec<Point3<f64>>,
    /// Signed dual length of each edge (one contribution per incident
    /// triangle; boundary edges get a single contribution).
    pub dual_edge_lengths: Vec<f64>,
    /// Signed dual cell area of each vertex.
    pub dual_cell_areas: Vec<f64>,
    /// Length of each canonical edge.
    pub primal_edge_lengths: Vec<f64>,
}

impl DualMetrics {
    /// Sum of the dual cell areas; tiles the surface, so it equals the total
    /// mesh area up to rounding.
    pub fn total_dual_area(&self) -> f64 {
        self.dual_cell_areas.iter().sum()
    }
}

/// Circumcenter of a triangle in 3D: the point in the triangle's plane
/// equidistant from all three vertices.
pub fn circumcenter(
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> Result<Point3<f64>, DecError> {
    let ab = b - a;
    let ac = c - a;
    let n = ab.cross(&ac);
    let n2 = n.norm_squared();
    let scale = ab.norm().max(ac.norm()).max((c - b).norm());
    if n2.sqrt() <= 1e-12 * scale * scale {
        return Err(DecError::DegenerateTriangle { index: usize::MAX });
    }
    let offset = (ab.norm_squared() * ac.cross(&n) + ac.norm_squared() * n.cross(&ab))
        / (2.0 * n2);
    Ok(a + offset)
}

/// Build the full dual-complex metric data for a mesh.
pub fn build_dual_metrics(mesh: &SurfaceMesh) -> Result<DualMetrics, DecError> {
    let mut circumcenters = Vec::with_capacity(mesh.n_triangles());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let c = circumcenter(
            &mesh.position(tri[0]),
            &mesh.position(tri[1]),
            &mesh.position(tri[2]),
        )
        .map_err(|_| DecError::DegenerateTriangle { index: t })?;
        circumcenters.push(c);
    }

    let mut edge_midpoints = Vec::with_capacity(mesh.n_edges());
    let mut primal_edge_lengths = Vec::with_capacity(mesh.n_edges());
    for &[a, b] in mesh.edges() {
        let pa = mesh.position(a);
        let pb = mesh.position(b);
        edge_midpoints.push(Point3::from((pa.coords + pb.coords) * 0.5));
        primal_edge_lengths.push((pb - pa).norm());
    }

    // Signed circumcenter-to-midpoint contributions, one per (triangle,
    // edge) incidence.
    let mut dual_edge_lengths = vec![0.0; mesh.n_edges()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for &(e, _) in mesh.triangle_edge_signs(t) {
            let [a, b] = mesh.edges()[e];
            let opposite = tri
                .iter()
                .copied()
                .find(|&v| v != a && v != b)
                .expect("triangle must have a vertex opposite each of its edges");
            dual_edge_lengths[e] +=
                signed_center_offset(&mesh.position(a), &mesh.position(b), &mesh.position(opposite), &circumcenters[t]);
        }
    }

    // Dual cell areas from the signed quadrilateral pieces (vertex, first
    // midpoint, circumcenter, second midpoint), split into two triangles
    // oriented by the face normal.
    let mut dual_cell_areas = vec![0.0; mesh.n_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let normal = face_normal(mesh, tri);
        let c = circumcenters[t];
        for k in 0..3 {
            let v = tri[k];
            let next = tri[(k + 1) % 3];
            let prev = tri[(k + 2) % 3];
            let pv = mesh.position(v);
            let m1 = midpoint(&pv, &mesh.position(next));
            let m2 = midpoint(&pv, &mesh.position(prev));
            let a1 = 0.5 * (m1 - pv).cross(&(c - pv)).dot(&normal);
            let a2 = 0.5 * (c - pv).cross(&(m2 - pv)).dot(&normal);
            dual_cell_areas[v] += a1 + a2;
        }
    }

    Ok(DualMetrics {
        circumcenters,
        edge_midpoints,
        dual_edge_lengths,
        dual_cell_areas,
        primal_edge_lengths,
    })
}

fn midpoint(a: &Point3<f64>, b: &Point3<f64>) -> Point3<f64> {
    Point3::from((a.coords + b.coords) * 0.5)
}

fn face_normal(mesh: &SurfaceMesh, tri: &[usize; 3]) -> Vector3<f64> {
    let a = mesh.position(tri[0]);
    let n = (mesh.position(tri[1]) - a).cross(&(mesh.position(tri[2]) - a));
    n / n.norm()
}

/// Distance from an edge midpoint to a triangle circumcenter, signed
/// positive when the circumcenter lies on the same side of the edge as the
/// opposite vertex.
fn signed_center_offset(
    a: &Point3<f64>,
    b: &Point3<f64>,
    opposite: &Point3<f64>,
    center: &Point3<f64>,
) -> f64 {
    let m = midpoint(a, b);
    let edge_dir = (b - a).normalize();
    // In-plane perpendicular to the edge, pointing toward the opposite
    // vertex.
    let q = opposite - m;
    let perp = q - edge_dir * q.dot(&edge_dir);
    let perp = perp / perp.norm();
    (center - m).dot(&perp)
}

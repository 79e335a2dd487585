//! Mesh quality reporting: closedness, well-centeredness, angle statistics.

use super::SurfaceMesh;

/// Angles this far above a right angle count as obtuse. Exact right angles
/// (flat-grid hypotenuses) stay borderline: they keep a zero-length dual
/// edge instead of disqualifying the mesh.
pub const OBTUSE_ANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct MeshQualityReport {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_triangles: usize,
    /// No boundary edges.
    pub is_closed: bool,
    /// True iff no triangle is obtuse, i.e. every triangle contains its own
    /// circumcenter.
    pub is_well_centered: bool,
    pub obtuse_triangle_indices: Vec<usize>,
    /// Smallest interior angle over all triangles, radians.
    pub min_angle: f64,
    /// V - E + F.
    pub euler_characteristic: i64,
    pub orientation_consistent: bool,
    pub warnings: Vec<String>,
}

/// Inspect a mesh and report quality measures. Never fails: problematic
/// meshes are described through the report's flags and warnings.
pub fn validate(mesh: &SurfaceMesh) -> MeshQualityReport {
    let mut obtuse = Vec::new();
    let mut min_angle = f64::INFINITY;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let angles = triangle_angles(mesh, tri);
        let largest = angles.iter().cloned().fold(f64::MIN, f64::max);
        min_angle = min_angle.min(angles.iter().cloned().fold(f64::MAX, f64::min));
        if largest > std::f64::consts::FRAC_PI_2 + OBTUSE_ANGLE_TOLERANCE {
            obtuse.push(t);
        }
    }

    let n_boundary = mesh.n_boundary_edges();
    let orientation_consistent = mesh.orientation_consistent();
    let mut warnings = Vec::new();
    if n_boundary > 0 {
        warnings.push(format!(
            "mesh has a boundary ({n_boundary} boundary edges); dual cells are truncated there"
        ));
    }
    if !orientation_consistent {
        warnings.push("triangle orientations are not globally consistent".to_string());
    }
    if !obtuse.is_empty() {
        warnings.push(format!(
            "mesh is not well-centered ({} obtuse triangles); dual edge lengths may be negative",
            obtuse.len()
        ));
    }
    let isolated = (0..mesh.n_vertices())
        .filter(|&v| mesh.vertex_edges(v).is_empty())
        .count();
    if isolated > 0 {
        warnings.push(format!("{isolated} isolated vertices (no incident edges)"));
    }
    if mesh.n_triangles() == 0 {
        warnings.push("mesh has no triangles".to_string());
    }

    MeshQualityReport {
        n_vertices: mesh.n_vertices(),
        n_edges: mesh.n_edges(),
        n_triangles: mesh.n_triangles(),
        is_closed: n_boundary == 0,
        is_well_centered: obtuse.is_empty(),
        obtuse_triangle_indices: obtuse,
        min_angle,
        euler_characteristic: mesh.n_vertices() as i64 - mesh.n_edges() as i64
            + mesh.n_triangles() as i64,
        orientation_consistent,
        warnings,
    }
}

/// Interior angles at the three corners of a triangle.
pub(crate) fn triangle_angles(mesh: &SurfaceMesh, tri: &[usize; 3]) -> [f64; 3] {
    let p = [
        mesh.position(tri[0]),
        mesh.position(tri[1]),
        mesh.position(tri[2]),
    ];
    let mut angles = [0.0; 3];
    for k in 0..3 {
        let u = p[(k + 1) % 3] - p[k];
        let v = p[(k + 2) % 3] - p[k];
        let cos = u.dot(&v) / (u.norm() * v.norm());
        angles[k] = cos.clamp(-1.0, 1.0).acos();
    }
    angles
}

//! Minimal OFF and OBJ readers/writers (vertex and face records only).

use super::{MeshError, SurfaceMesh};
use nalgebra::Point3;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    /// Guess the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("off") => Some(MeshFormat::Off),
            Some("obj") => Some(MeshFormat::Obj),
            _ => None,
        }
    }
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<SurfaceMesh, MeshError> {
    let text = std::fs::read_to_string(path).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_mesh_str(&text, format, &path.display().to_string())
}

/// Parse mesh text in the given format. `origin` labels parse errors.
pub fn load_mesh_str(
    text: &str,
    format: MeshFormat,
    origin: &str,
) -> Result<SurfaceMesh, MeshError> {
    match format {
        MeshFormat::Off => parse_off(text, origin),
        MeshFormat::Obj => parse_obj(text, origin),
    }
}

pub fn save_mesh(mesh: &SurfaceMesh, path: &Path, format: MeshFormat) -> Result<(), MeshError> {
    std::fs::write(path, write_mesh_string(mesh, format)).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Serialize a mesh; positions are written with 17 significant digits so a
/// round trip through text reproduces them bit for bit.
pub fn write_mesh_string(mesh: &SurfaceMesh, format: MeshFormat) -> String {
    let mut out = String::new();
    match format {
        MeshFormat::Off => {
            out.push_str("OFF\n");
            let _ = writeln!(
                out,
                "{} {} {}",
                mesh.n_vertices(),
                mesh.n_edges(),
                mesh.n_triangles()
            );
            for p in mesh.vertices() {
                let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
            }
            for t in mesh.triangles() {
                let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
            }
        }
        MeshFormat::Obj => {
            for p in mesh.vertices() {
                let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
            }
            for t in mesh.triangles() {
                let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
            }
        }
    }
    out
}

fn parse_error(origin: &str, line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        origin: origin.to_string(),
        line,
        message: message.into(),
    }
}

/// Content lines with their 1-based line numbers; blank lines and `#`
/// comments skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(origin: &str, line: usize, token: &str) -> Result<f64, MeshError> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_error(origin, line, format!("expected a number, got '{token}'")))?;
    if !v.is_finite() {
        return Err(parse_error(origin, line, format!("non-finite coordinate '{token}'")));
    }
    Ok(v)
}

fn parse_usize(origin: &str, line: usize, token: &str) -> Result<usize, MeshError> {
    token
        .parse()
        .map_err(|_| parse_error(origin, line, format!("expected an index, got '{token}'")))
}

fn parse_off(text: &str, origin: &str) -> Result<SurfaceMesh, MeshError> {
    let mut lines = content_lines(text);
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_error(origin, 1, "empty file"))?;
    if header != "OFF" {
        return Err(parse_error(origin, ln, format!("expected 'OFF' header, got '{header}'")));
    }
    let (ln, counts) = lines
        .next()
        .ok_or_else(|| parse_error(origin, ln, "missing count line"))?;
    let tokens: Vec<&str> = counts.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(parse_error(origin, ln, "count line must be 'V E F'"));
    }
    let n_vertices = parse_usize(origin, ln, tokens[0])?;
    // The edge count in OFF headers is unreliable; edges are derived.
    let n_faces = parse_usize(origin, ln, tokens[2])?;

    let mut vertices = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_error(origin, 0, "unexpected end of file in vertex list"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 3 {
            return Err(parse_error(origin, ln, "vertex line must be 'x y z'"));
        }
        vertices.push(Point3::new(
            parse_f64(origin, ln, t[0])?,
            parse_f64(origin, ln, t[1])?,
            parse_f64(origin, ln, t[2])?,
        ));
    }

    let mut triangles = Vec::with_capacity(n_faces);
    for _ in 0..n_faces {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_error(origin, 0, "unexpected end of file in face list"))?;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.is_empty() || parse_usize(origin, ln, t[0])? != 3 || t.len() != 4 {
            return Err(parse_error(origin, ln, "only triangular faces ('3 i j k') are supported"));
        }
        triangles.push([
            parse_usize(origin, ln, t[1])?,
            parse_usize(origin, ln, t[2])?,
            parse_usize(origin, ln, t[3])?,
        ]);
    }

    SurfaceMesh::new(vertices, triangles)
}

fn parse_obj(text: &str, origin: &str) -> Result<SurfaceMesh, MeshError> {
    let mut vertices = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for (ln, line) in content_lines(text) {
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let t: Vec<&str> = tokens.collect();
                if t.len() < 3 {
                    return Err(parse_error(origin, ln, "vertex record must be 'v x y z'"));
                }
                vertices.push(Point3::new(
                    parse_f64(origin, ln, t[0])?,
                    parse_f64(origin, ln, t[1])?,
                    parse_f64(origin, ln, t[2])?,
                ));
            }
            Some("f") => {
                let t: Vec<&str> = tokens.collect();
                if t.len() != 3 {
                    return Err(parse_error(origin, ln, "only triangular faces are supported"));
                }
                let mut tri = [0usize; 3];
                for (k, tok) in t.iter().enumerate() {
                    // "i", "i/t", "i/t/n" and "i//n" all start with the
                    // vertex index.
                    let idx_tok = tok.split('/').next().unwrap_or("");
                    let idx = parse_usize(origin, ln, idx_tok)?;
                    if idx == 0 {
                        return Err(parse_error(origin, ln, "OBJ indices are 1-based"));
                    }
                    tri[k] = idx - 1;
                }
                triangles.push(tri);
            }
            // Normals, texture coordinates, groups, materials, ...
            Some(_) => {}
            None => {}
        }
    }
    SurfaceMesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_icosphere, generate_tetrahedron, validate};

    const TETRA_OFF: &str = "\
OFF
4 0 4
0 0 0
1 0 0
0 1 0
0 0 1
3 0 2 1
3 0 1 3
3 0 3 2
3 1 2 3
";

    #[test]
    fn off_tetrahedron_combinatorics() {
        let m = load_mesh_str(TETRA_OFF, MeshFormat::Off, "tetra.off").unwrap();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_edges(), 6);
        let report = validate(&m);
        assert_eq!(report.euler_characteristic, 2);
    }

    #[test]
    fn obj_single_triangle() {
        let obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
        let m = load_mesh_str(obj, MeshFormat::Obj, "tri.obj").unwrap();
        assert_eq!(m.n_edges(), 3);
        assert_eq!(m.n_triangles(), 1);
        assert!(!validate(&m).is_closed);
    }

    #[test]
    fn obj_ignores_other_records_and_slashed_indices() {
        let obj = "\
# comment
vn 0 0 1
v 0 0 0
v 1 0 0
v 0 1 0
vt 0 0
f 1/1/1 2/2/1 3//1
usemtl whatever
";
        let m = load_mesh_str(obj, MeshFormat::Obj, "tri.obj").unwrap();
        assert_eq!(m.n_triangles(), 1);
    }

    #[test]
    fn off_non_manifold_is_rejected() {
        let off = "\
OFF
5 0 3
0 0 0
1 0 0
0 1 0
0 -1 0
0 0 1
3 0 1 2
3 0 1 3
3 0 1 4
";
        assert!(matches!(
            load_mesh_str(off, MeshFormat::Off, "bad.off"),
            Err(MeshError::NonManifoldEdge { .. })
        ));
    }

    #[test]
    fn off_malformed_header_is_parse_error() {
        let err = load_mesh_str("OFFX\n1 0 0\n", MeshFormat::Off, "x.off").unwrap_err();
        assert!(matches!(err, MeshError::Parse { line: 1, .. }));
    }

    #[test]
    fn off_quad_face_is_rejected() {
        let off = "OFF\n4 0 1\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        assert!(matches!(
            load_mesh_str(off, MeshFormat::Off, "quad.off"),
            Err(MeshError::Parse { .. })
        ));
    }

    #[test]
    fn round_trip_preserves_positions_and_connectivity() {
        for format in [MeshFormat::Off, MeshFormat::Obj] {
            let m = generate_icosphere(1.7, 1).unwrap();
            let text = write_mesh_string(&m, format);
            let back = load_mesh_str(&text, format, "roundtrip").unwrap();
            assert_eq!(back.n_vertices(), m.n_vertices());
            assert_eq!(back.triangles(), m.triangles());
            for (p, q) in m.vertices().iter().zip(back.vertices()) {
                assert!((p - q).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(MeshFormat::from_path(Path::new("a/b.off")), Some(MeshFormat::Off));
        assert_eq!(MeshFormat::from_path(Path::new("b.OBJ")), Some(MeshFormat::Obj));
        assert_eq!(MeshFormat::from_path(Path::new("b.stl")), None);
    }

    #[test]
    fn save_and_load_file() {
        let dir = std::env::temp_dir().join("decsim_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("tetra.off");
        let m = generate_tetrahedron(1.0).unwrap();
        save_mesh(&m, &path, MeshFormat::Off).unwrap();
        let back = load_mesh(&path, MeshFormat::Off).unwrap();
        assert_eq!(back.triangles(), m.triangles());
        std::fs::remove_file(&path).ok();
    }
}

//! Snapshot emission: legacy ASCII VTK polydata, CSV, frame naming and the
//! run manifest.

use crate::config::OutputFormat;
use decsim_core::SurfaceMesh;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Scientific notation with the given number of significant digits.
fn sig(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits - 1, x)
}

/// VTK viewers read floats at 9 significant digits.
const VTK_DIGITS: usize = 9;
/// CSV keeps full f64 precision so values round-trip exactly.
const CSV_DIGITS: usize = 17;

/// Legacy VTK polydata with the scalar field attached as point data.
pub fn write_vtk<W: Write>(
    mesh: &SurfaceMesh,
    field: &[f64],
    title: &str,
    mut out: W,
) -> std::io::Result<()> {
    assert_eq!(field.len(), mesh.n_vertices(), "field length must match the mesh");
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET POLYDATA")?;
    writeln!(out, "POINTS {} float", mesh.n_vertices())?;
    for p in mesh.vertices() {
        writeln!(
            out,
            "{} {} {}",
            sig(p.x, VTK_DIGITS),
            sig(p.y, VTK_DIGITS),
            sig(p.z, VTK_DIGITS)
        )?;
    }
    writeln!(out, "POLYGONS {} {}", mesh.n_triangles(), 4 * mesh.n_triangles())?;
    for t in mesh.triangles() {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(out, "POINT_DATA {}", mesh.n_vertices())?;
    writeln!(out, "SCALARS u float 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for &v in field {
        writeln!(out, "{}", sig(v, VTK_DIGITS))?;
    }
    Ok(())
}

/// CSV rows `vertex,x,y,z,u` at full precision, one per vertex in index
/// order.
pub fn write_csv<W: Write>(mesh: &SurfaceMesh, field: &[f64], mut out: W) -> std::io::Result<()> {
    assert_eq!(field.len(), mesh.n_vertices(), "field length must match the mesh");
    writeln!(out, "vertex,x,y,z,u")?;
    for (v, (p, &u)) in mesh.vertices().iter().zip(field).enumerate() {
        writeln!(
            out,
            "{v},{},{},{},{}",
            sig(p.x, CSV_DIGITS),
            sig(p.y, CSV_DIGITS),
            sig(p.z, CSV_DIGITS),
            sig(u, CSV_DIGITS)
        )?;
    }
    Ok(())
}

/// `frame_000040.vtk` for step 40.
pub fn frame_filename(step: u64, format: OutputFormat) -> String {
    format!("frame_{step:06}.{}", format.extension())
}

#[derive(Debug, Clone)]
pub struct FrameRecord {
    pub step: u64,
    pub time: f64,
    pub filename: String,
}

/// The set of frames a run emitted, plus the manifest writer.
#[derive(Debug, Clone)]
pub struct SnapshotSeries {
    pub directory: PathBuf,
    pub frames: Vec<FrameRecord>,
}

impl SnapshotSeries {
    pub fn new(directory: PathBuf) -> Self {
        Self {
            directory,
            frames: Vec::new(),
        }
    }

    /// Write one frame file and record it.
    pub fn emit(
        &mut self,
        mesh: &SurfaceMesh,
        field: &[f64],
        step: u64,
        time: f64,
        format: OutputFormat,
    ) -> std::io::Result<()> {
        let filename = frame_filename(step, format);
        let path = self.directory.join(&filename);
        let file = std::fs::File::create(path)?;
        let mut writer = std::io::BufWriter::new(file);
        match format {
            OutputFormat::Vtk => {
                let title = format!("u field, step {step}, t = {}", sig(time, VTK_DIGITS));
                write_vtk(mesh, field, &title, &mut writer)?;
            }
            OutputFormat::Csv => write_csv(mesh, field, &mut writer)?,
        }
        writer.flush()?;
        self.frames.push(FrameRecord {
            step,
            time,
            filename,
        });
        Ok(())
    }

    /// Write `manifest.csv` listing every frame with its simulation time.
    /// Called once, after the last frame, so a complete manifest implies a
    /// complete series.
    pub fn write_manifest(&self) -> std::io::Result<PathBuf> {
        let path = self.directory.join("manifest.csv");
        let mut out = std::io::BufWriter::new(std::fs::File::create(&path)?);
        writeln!(out, "filename,step,time")?;
        for f in &self.frames {
            writeln!(out, "{},{},{}", f.filename, f.step, sig(f.time, CSV_DIGITS))?;
        }
        out.flush()?;
        Ok(path)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Parse the scalar point data back out of a legacy VTK file written by
/// [`write_vtk`]; used by round-trip tests.
pub fn read_vtk_scalars(path: &Path) -> std::io::Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    for line in lines.by_ref() {
        if line.starts_with("LOOKUP_TABLE") {
            break;
        }
    }
    Ok(lines.filter_map(|l| l.trim().parse().ok()).collect())
}

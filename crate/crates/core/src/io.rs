//! Legacy ASCII VTK snapshots of the discrete surface and CSV time series.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fem::{quadrature, QuadratureRule};
use crate::mesh::Mesh;
use crate::scheme::{Observer, State, QUADRATURE_DEGREE};

/// Nodal values of one time level on a mesh.
#[derive(Clone, Copy, Debug)]
pub struct Snapshot<'a> {
    pub m: usize,
    pub t: f64,
    pub mesh: &'a Mesh,
    pub u: &'a [f64],
    pub w: &'a [f64],
}

impl<'a> Snapshot<'a> {
    pub fn new(m: usize, t: f64, mesh: &'a Mesh, u: &'a [f64], w: &'a [f64]) -> Result<Self> {
        let n = mesh.num_vertices();
        if u.len() != n || w.len() != n {
            return Err(Error::InvalidArgument(format!(
                "snapshot needs {n} values per field, got {} and {}",
                u.len(),
                w.len()
            )));
        }
        Ok(Snapshot { m, t, mesh, u, w })
    }

    pub fn from_state(state: &'a State<'a>) -> Self {
        Snapshot {
            m: state.m,
            t: state.t,
            mesh: state.u.mesh(),
            u: state.u.values(),
            w: state.w.values(),
        }
    }
}

/// Renders the surface `{(x, u_h(x))}` with point scalars `w` and `u`.
pub fn surface_vtk_string(s: &Snapshot<'_>) -> String {
    let mesh = s.mesh;
    let (nv, nt) = (mesh.num_vertices(), mesh.num_triangles());
    let mut out = String::with_capacity(64 * (nv + nt));
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "graphflow surface m={} t={:.16e}", s.m, s.t);
    out.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {nv} double");
    for (x, u) in mesh.vertices().iter().zip(s.u) {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", x[0], x[1], u);
    }
    let _ = writeln!(out, "CELLS {nt} {}", 4 * nt);
    for t in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(out, "CELL_TYPES {nt}");
    for _ in 0..nt {
        out.push_str("5\n");
    }
    let _ = writeln!(out, "POINT_DATA {nv}");
    for (name, values) in [("w", s.w), ("u", s.u)] {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in values {
            let _ = writeln!(out, "{v:.16e}");
        }
    }
    out
}

pub fn write_surface_vtk(s: &Snapshot<'_>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, surface_vtk_string(s)).map_err(|e| Error::io(path, e))
}

/// Summary of one time level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeseriesRecord {
    pub m: usize,
    pub t: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub min_w: f64,
    pub max_w: f64,
    /// `‖w_h‖_{L²}`.
    pub l2_w: f64,
}

impl TimeseriesRecord {
    pub fn from_state(state: &State<'_>, rule: &QuadratureRule) -> Self {
        TimeseriesRecord {
            m: state.m,
            t: state.t,
            min_u: state.u.min(),
            max_u: state.u.max(),
            min_w: state.w.min(),
            max_w: state.w.max(),
            l2_w: state.w.l2_norm_sq(rule).sqrt(),
        }
    }
}

pub const TIMESERIES_HEADER: &str = "m,t,min_u,max_u,min_w,max_w,l2_w";

pub fn timeseries_csv_string(records: &[TimeseriesRecord]) -> String {
    let mut out = String::from(TIMESERIES_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}",
            r.m, r.t, r.min_u, r.max_u, r.min_w, r.max_w, r.l2_w
        );
    }
    out
}

pub fn write_timeseries_csv(records: &[TimeseriesRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, timeseries_csv_string(records)).map_err(|e| Error::io(path, e))
}

/// Writes `<prefix>_<m>.vtk` every `⌈M/30⌉` steps, plus the first and last
/// level.
#[derive(Debug)]
pub struct SnapshotWriter {
    dir: PathBuf,
    prefix: String,
    every: usize,
    last: usize,
    written: Vec<PathBuf>,
}

impl SnapshotWriter {
    pub fn new(dir: impl Into<PathBuf>, prefix: &str, total_steps: usize) -> Self {
        SnapshotWriter {
            dir: dir.into(),
            prefix: prefix.to_string(),
            every: total_steps.div_ceil(30).max(1),
            last: total_steps,
            written: Vec::new(),
        }
    }

    pub fn every(&self) -> usize {
        self.every
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn wants(&self, m: usize) -> bool {
        m % self.every == 0 || m == self.last
    }
}

impl Observer for SnapshotWriter {
    fn observe(&mut self, state: &State<'_>) -> Result<()> {
        if !self.wants(state.m) {
            return Ok(());
        }
        let path = self.dir.join(format!("{}_{:06}.vtk", self.prefix, state.m));
        write_surface_vtk(&Snapshot::from_state(state), &path)?;
        self.written.push(path);
        Ok(())
    }
}

/// Collects one [`TimeseriesRecord`] per observed level.
#[derive(Debug)]
pub struct TimeseriesRecorder {
    rule: QuadratureRule,
    records: Vec<TimeseriesRecord>,
}

impl TimeseriesRecorder {
    pub fn new() -> Self {
        TimeseriesRecorder {
            rule: quadrature(QUADRATURE_DEGREE).expect("supported degree"),
            records: Vec::new(),
        }
    }

    pub fn records(&self) -> &[TimeseriesRecord] {
        &self.records
    }
}

impl Default for TimeseriesRecorder {
    fn default() -> Self {
        Self::new()
    }
}

impl Observer for TimeseriesRecorder {
    fn observe(&mut self, state: &State<'_>) -> Result<()> {
        self.records
            .push(TimeseriesRecord::from_state(state, &self.rule));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryTag, Mesh};

    fn one_triangle() -> Mesh {
        Mesh::from_triangles(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![[0, 1, 2]],
            BoundaryTag::Outer,
        )
        .unwrap()
    }

    #[test]
    fn vtk_layout() {
        let mesh = one_triangle();
        let s = Snapshot::new(0, 0.0, &mesh, &[0.0; 3], &[1.0, 2.0, 3.0]).unwrap();
        let text = surface_vtk_string(&s);
        assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
        assert!(text.contains("POINTS 3 double\n"));
        assert!(text.contains("CELLS 1 4\n3 0 1 2\n"));
        assert!(text.contains("CELL_TYPES 1\n5\n"));
        assert!(text.contains("SCALARS w double 1\nLOOKUP_TABLE default\n1.0000000000000000e0\n"));
        assert_eq!(text, surface_vtk_string(&s));
    }

    #[test]
    fn snapshot_rejects_wrong_lengths() {
        let mesh = one_triangle();
        assert!(Snapshot::new(0, 0.0, &mesh, &[0.0; 2], &[0.0; 3]).is_err());
    }

    #[test]
    fn csv_rows() {
        assert_eq!(timeseries_csv_string(&[]), format!("{TIMESERIES_HEADER}\n"));
        let r = TimeseriesRecord {
            m: 0,
            t: 0.0,
            min_u: 1.0,
            max_u: 1.0,
            min_w: 0.0,
            max_w: 0.0,
            l2_w: 0.0,
        };
        assert_eq!(timeseries_csv_string(&[r]).lines().count(), 2);
    }

    #[test]
    fn cadence() {
        let w = SnapshotWriter::new("/nonexistent", "s", 100);
        assert_eq!(w.every(), 4);
        assert!(w.wants(0) && w.wants(4) && w.wants(100) && !w.wants(5));
        let w = SnapshotWriter::new("/nonexistent", "s", 7);
        assert!(w.wants(7) && w.wants(1));
    }
}

//! Snapshot and diagnostics files.
//!
//! VTK output is the legacy ASCII 2.0 unstructured-grid format with one
//! triangle cell per element and point scalars `u`, `v`, `w`. CSV output has
//! the header `x,y,u,v,w` and one row per node in mesh order. Floats are
//! written with Rust's shortest round-trip formatting, so re-reading a file
//! recovers the nodal values bit for bit.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::OutputFormat;
use crate::dynamics::FieldState;
use crate::mesh::TriMesh;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("state has {state} nodes, mesh has {mesh}")]
    Mismatch { state: usize, mesh: usize },
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("invalid VTK: {0}")]
    InvalidVtk(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), OutputError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    let mut f = std::fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(contents).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(io_err(path))
}

fn check(state: &FieldState, mesh: &TriMesh) -> Result<(), OutputError> {
    if state.len() != mesh.n_nodes() {
        return Err(OutputError::Mismatch {
            state: state.len(),
            mesh: mesh.n_nodes(),
        });
    }
    Ok(())
}

pub fn vtk_string(state: &FieldState, mesh: &TriMesh) -> Result<String, OutputError> {
    check(state, mesh)?;
    let n = mesh.n_nodes();
    let ne = mesh.n_elements();
    let mut s = String::with_capacity(64 * n);
    s.push_str("# vtk DataFile Version 2.0\n");
    let _ = writeln!(s, "u v w at t = {}", state.t);
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {n} double");
    for p in &mesh.nodes {
        let _ = writeln!(s, "{} {} 0", p[0], p[1]);
    }
    let _ = writeln!(s, "CELLS {ne} {}", 4 * ne);
    for el in &mesh.elements {
        let _ = writeln!(s, "3 {} {} {}", el[0], el[1], el[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    for _ in 0..ne {
        s.push_str("5\n");
    }
    let _ = writeln!(s, "POINT_DATA {n}");
    for (name, f) in ["u", "v", "w"].iter().zip(state.fields()) {
        let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for x in f {
            let _ = writeln!(s, "{x}");
        }
    }
    Ok(s)
}

pub fn csv_string(state: &FieldState, mesh: &TriMesh) -> Result<String, OutputError> {
    check(state, mesh)?;
    let mut s = String::with_capacity(80 * mesh.n_nodes());
    s.push_str("x,y,u,v,w\n");
    for (i, p) in mesh.nodes.iter().enumerate() {
        let _ = writeln!(s, "{},{},{},{},{}", p[0], p[1], state.u[i], state.v[i], state.w[i]);
    }
    Ok(s)
}

pub fn write_snapshot(state: &FieldState, mesh: &TriMesh, path: &Path, format: OutputFormat) -> Result<(), OutputError> {
    let text = match format {
        OutputFormat::Vtk => vtk_string(state, mesh)?,
        OutputFormat::Csv => csv_string(state, mesh)?,
    };
    write_atomic(path, text.as_bytes())
}

/// File name for a snapshot at time `t`, e.g. `snapshot_t0020.000.vtk`.
pub fn snapshot_name(t: f64, format: OutputFormat) -> String {
    format!("snapshot_t{:08.3}.{}", t, format.extension())
}

/// Nodal coordinates and values read back from a CSV snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSnapshot {
    pub nodes: Vec<[f64; 2]>,
    pub state: FieldState,
}

pub fn parse_csv(text: &str, path: &Path) -> Result<CsvSnapshot, OutputError> {
    let perr = |line: usize, message: String| OutputError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some("x,y,u,v,w") => {}
        other => return Err(perr(1, format!("expected header x,y,u,v,w, found {other:?}"))),
    }
    let (mut nodes, mut u, mut v, mut w) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (k, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| perr(k + 2, e.to_string()))?;
        if vals.len() != 5 {
            return Err(perr(k + 2, format!("expected 5 columns, found {}", vals.len())));
        }
        nodes.push([vals[0], vals[1]]);
        u.push(vals[2]);
        v.push(vals[3]);
        w.push(vals[4]);
    }
    Ok(CsvSnapshot {
        nodes,
        state: FieldState::new(0.0, u, v, w),
    })
}

pub fn read_csv(path: &Path) -> Result<CsvSnapshot, OutputError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_csv(&text, path)
}

/// Counts found by [`validate_vtk`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VtkSummary {
    pub points: usize,
    pub cells: usize,
    pub scalars: Vec<String>,
}

/// Structural check of a legacy ASCII VTK file as written by [`vtk_string`]:
/// header, point and cell counts, triangle connectivity in range, cell type 5,
/// and every scalar field with one finite value per point.
pub fn validate_vtk(text: &str) -> Result<VtkSummary, OutputError> {
    let bad = |m: String| OutputError::InvalidVtk(m);
    let mut lines = text.lines();
    let mut next = |what: &str| lines.next().ok_or_else(|| bad(format!("unexpected end of file, expected {what}")));
    if next("header")? != "# vtk DataFile Version 2.0" {
        return Err(bad("missing version 2.0 header".into()));
    }
    next("title")?;
    if next("ASCII")?.trim() != "ASCII" {
        return Err(bad("only ASCII is supported".into()));
    }
    if next("DATASET")?.trim() != "DATASET UNSTRUCTURED_GRID" {
        return Err(bad("expected DATASET UNSTRUCTURED_GRID".into()));
    }
    let count = |line: &str, key: &str| -> Result<Vec<usize>, OutputError> {
        let mut it = line.split_whitespace();
        if it.next() != Some(key) {
            return Err(bad(format!("expected {key}, found `{line}`")));
        }
        Ok(it.filter_map(|t| t.parse().ok()).collect())
    };
    let np = *count(next("POINTS")?, "POINTS")?.first().ok_or_else(|| bad("POINTS without count".into()))?;
    for i in 0..np {
        let l = next("point")?;
        let xs: Vec<f64> = l.split_whitespace().filter_map(|t| t.parse().ok()).collect();
        if xs.len() != 3 || xs.iter().any(|x| !x.is_finite()) {
            return Err(bad(format!("point {i} malformed: `{l}`")));
        }
    }
    let c = count(next("CELLS")?, "CELLS")?;
    let (nc, size) = match c[..] {
        [a, b] => (a, b),
        _ => return Err(bad("CELLS needs two counts".into())),
    };
    if size != 4 * nc {
        return Err(bad(format!("CELLS size {size} != 4 * {nc}")));
    }
    for i in 0..nc {
        let l = next("cell")?;
        let ids: Vec<usize> = l.split_whitespace().filter_map(|t| t.parse().ok()).collect();
        if ids.len() != 4 || ids[0] != 3 || ids[1..].iter().any(|&k| k >= np) {
            return Err(bad(format!("cell {i} malformed: `{l}`")));
        }
    }
    let nt = *count(next("CELL_TYPES")?, "CELL_TYPES")?.first().ok_or_else(|| bad("CELL_TYPES without count".into()))?;
    if nt != nc {
        return Err(bad(format!("CELL_TYPES {nt} != CELLS {nc}")));
    }
    for i in 0..nt {
        if next("cell type")?.trim() != "5" {
            return Err(bad(format!("cell {i} is not a triangle")));
        }
    }
    let npd = *count(next("POINT_DATA")?, "POINT_DATA")?.first().ok_or_else(|| bad("POINT_DATA without count".into()))?;
    if npd != np {
        return Err(bad(format!("POINT_DATA {npd} != POINTS {np}")));
    }
    let mut scalars = Vec::new();
    while let Some(l) = lines.next() {
        if l.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() < 3 || parts[0] != "SCALARS" {
            return Err(bad(format!("expected SCALARS, found `{l}`")));
        }
        scalars.push(parts[1].to_string());
        if lines.next().map(str::trim) != Some("LOOKUP_TABLE default") {
            return Err(bad(format!("SCALARS {} missing LOOKUP_TABLE", parts[1])));
        }
        for i in 0..np {
            let v = lines.next().and_then(|t| t.trim().parse::<f64>().ok());
            if !v.is_some_and(f64::is_finite) {
                return Err(bad(format!("SCALARS {}: value {i} missing or non-finite", parts[1])));
            }
        }
    }
    Ok(VtkSummary {
        points: np,
        cells: nc,
        scalars,
    })
}

/// Nodal `u, v, w` values of a VTK file written by [`vtk_string`].
pub fn vtk_scalars(text: &str) -> Result<FieldState, OutputError> {
    let summary = validate_vtk(text)?;
    let mut fields: Vec<Vec<f64>> = Vec::new();
    let mut lines = text.lines();
    while let Some(l) = lines.next() {
        if l.starts_with("SCALARS ") {
            lines.next();
            fields.push((0..summary.points).filter_map(|_| lines.next()?.trim().parse().ok()).collect());
        }
    }
    match <[Vec<f64>; 3]>::try_from(fields) {
        Ok([u, v, w]) => Ok(FieldState::new(0.0, u, v, w)),
        Err(f) => Err(OutputError::InvalidVtk(format!("expected 3 scalar fields, found {}", f.len()))),
    }
}

pub fn diagnostics_csv(rows: &[crate::stepper::DiagnosticsRecord]) -> String {
    let mut s = String::from(crate::stepper::DiagnosticsRecord::CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Run manifest: resolved configuration, crate version, numerical thresholds.
pub fn manifest(config_toml: &str, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# igpsim run manifest");
    let _ = writeln!(s, "# version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "# negativity_threshold = {}", crate::dynamics::NEGATIVITY_THRESHOLD);
    let _ = writeln!(s, "# envelope_slack = {}", crate::stepper::ENVELOPE_SLACK);
    let _ = writeln!(s, "# marginal_band = {}", crate::equilibria::MARGINAL_BAND);
    for (k, v) in extra {
        let _ = writeln!(s, "# {k} = {v}");
    }
    s.push('\n');
    s.push_str(config_toml);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rect_mesh, Rect};

    fn sample_state(mesh: &TriMesh) -> FieldState {
        let f = |k: f64| mesh.nodes.iter().map(|p| (k * p[0]).sin() * (p[1] + 1.3).ln() / 3.0).collect::<Vec<_>>();
        FieldState::new(0.25, f(1.0), f(2.7), f(0.1))
    }

    #[test]
    fn single_cell_zero_state() {
        let mesh = build_rect_mesh(1, 1, Rect::UNIT_SQUARE).unwrap();
        let st = FieldState::zeros(4);
        let a = vtk_string(&st, &mesh).unwrap();
        let b = vtk_string(&st, &mesh).unwrap();
        assert_eq!(a, b);
        let s = validate_vtk(&a).unwrap();
        assert_eq!(s, VtkSummary { points: 4, cells: 2, scalars: vec!["u".into(), "v".into(), "w".into()] });
        assert!(a.contains("CELL_TYPES 2\n5\n5\n"));
        assert!(vtk_scalars(&a).unwrap().fields().iter().all(|f| f.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mesh = build_rect_mesh(7, 5, Rect::UNIT_SQUARE).unwrap();
        let st = sample_state(&mesh);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/s.csv");
        write_snapshot(&st, &mesh, &path, OutputFormat::Csv).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.nodes, mesh.nodes);
        assert_eq!((back.state.u, back.state.v, back.state.w), (st.u.clone(), st.v.clone(), st.w.clone()));
        // VTK carries the same values
        let vtk = vtk_scalars(&vtk_string(&st, &mesh).unwrap()).unwrap();
        assert_eq!((vtk.u, vtk.v, vtk.w), (st.u, st.v, st.w));
        // no temp files left behind
        let names: Vec<_> = std::fs::read_dir(dir.path().join("nested")).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }

    #[test]
    fn validator_rejects_damage() {
        let mesh = build_rect_mesh(2, 2, Rect::UNIT_SQUARE).unwrap();
        let good = vtk_string(&sample_state(&mesh), &mesh).unwrap();
        assert!(validate_vtk(&good).is_ok());
        let cases = [
            good.replacen("CELL_TYPES 8\n5", "CELL_TYPES 8\n7", 1),
            good.replacen("POINTS 9", "POINTS 10", 1),
            good.replacen("3 0 1 4", "3 0 1 40", 1),
            good.replacen("POINT_DATA 9", "POINT_DATA 8", 1),
            good[..good.len() - 100].to_string(),
            good.replacen("# vtk DataFile Version 2.0", "# vtk DataFile Version 3.0", 1),
        ];
        for (i, c) in cases.iter().enumerate() {
            assert_ne!(c, &good, "case {i} did not apply");
            assert!(validate_vtk(c).is_err(), "case {i}");
        }
    }

    #[test]
    fn csv_errors_carry_location() {
        let p = Path::new("x.csv");
        assert!(matches!(parse_csv("a,b\n", p), Err(OutputError::Parse { line: 1, .. })));
        assert!(matches!(parse_csv("x,y,u,v,w\n1,2,3\n", p), Err(OutputError::Parse { line: 2, .. })));
        assert!(matches!(parse_csv("x,y,u,v,w\n1,2,3,4,q\n", p), Err(OutputError::Parse { line: 2, .. })));
    }

    #[test]
    fn mismatch_and_io_errors() {
        let mesh = build_rect_mesh(1, 1, Rect::UNIT_SQUARE).unwrap();
        assert!(matches!(vtk_string(&FieldState::zeros(3), &mesh), Err(OutputError::Mismatch { .. })));
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let e = write_snapshot(&FieldState::zeros(4), &mesh, &blocker.join("s.vtk"), OutputFormat::Vtk).unwrap_err();
        assert!(e.to_string().contains("file"));
    }

    #[test]
    fn snapshot_names_sort_by_time() {
        let mut names: Vec<String> = [20.0, 0.1, 2.0, 0.0].iter().map(|&t| snapshot_name(t, OutputFormat::Vtk)).collect();
        names.sort();
        assert_eq!(names[0], "snapshot_t0000.000.vtk");
        assert_eq!(names[3], "snapshot_t0020.000.vtk");
    }
}

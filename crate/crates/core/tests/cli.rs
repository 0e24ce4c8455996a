use std::path::Path;
use std::process::{Command, Output};

use igp_core::config::preset;
use igp_core::output::{read_csv, validate_vtk};

fn igpsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_igpsim"))
        .args(args)
        .env_remove("IGP_OUTPUT_DIR")
        .output()
        .expect("spawn igpsim")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The reference preset shrunk to a short run on a 20x20 mesh.
fn short_config(dir: &Path, format: &str) -> String {
    let text = preset("model1_e1_1_e2_10")
        .unwrap()
        .replace("nx = 32", "nx = 20")
        .replace("ny = 32", "ny = 20")
        .replace("t_final = 20.0", "t_final = 0.01")
        .replace("[0.0, 0.1, 0.5, 2.0, 4.0, 20.0]", "[0.0, 0.01]")
        .replace("format = \"vtk\"", &format!("format = \"{format}\""));
    let path = dir.join(format!("short_{format}.toml"));
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn simulate_writes_snapshots_diagnostics_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), "csv");
    let out = dir.path().join("run");
    let o = igpsim(&["simulate", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("wrote 2 snapshot(s)"));
    for name in ["snapshot_t0000.000.csv", "snapshot_t0000.010.csv", "diagnostics.csv", "manifest.toml"] {
        assert!(out.join(name).is_file(), "missing {name}");
    }
    let diag = std::fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert!(diag.starts_with("t,total_biomass"));
    // 10 steps at stride 100: the initial row and the final one
    assert_eq!(diag.lines().count(), 3);
    let manifest = std::fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("e2 = 10.0"));
}

#[test]
fn initial_snapshot_matches_the_expression() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), "csv");
    let out = dir.path().join("run");
    assert!(igpsim(&["simulate", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let snap = read_csv(&out.join("snapshot_t0000.000.csv")).unwrap();
    let u0 = |x: f64, y: f64| {
        2.0 * (-10.0 * (x * x + (y - 0.9) * (y - 0.9))).exp() * (1.0 - x * x).powi(2) * (1.0 - y * y).powi(2)
    };
    for (&[x, y], &u) in snap.nodes.iter().zip(&snap.state.u) {
        assert!((u - u0(x, y)).abs() <= 1e-14, "({x}, {y}): {u}");
    }
    assert!(snap.state.w.iter().all(|&w| w == 1.5));
    // the cutoff factor pulls the peak below y = 0.9
    let (i, _) = snap.state.u.iter().enumerate().fold((0, f64::MIN), |a, (i, &u)| if u > a.1 { (i, u) } else { a });
    assert_eq!(snap.nodes[i][0], 0.0);
    assert!(snap.nodes[i][1] < 0.9);
}

#[test]
fn vtk_output_validates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), "vtk");
    let out = dir.path().join("run");
    assert!(igpsim(&["simulate", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let text = std::fs::read_to_string(out.join("snapshot_t0000.010.vtk")).unwrap();
    let s = validate_vtk(&text).unwrap();
    assert_eq!((s.points, s.cells), (21 * 21, 2 * 20 * 20));
}

#[test]
fn sequential_flag_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), "csv");
    let a = dir.path().join("par");
    let b = dir.path().join("seq");
    assert!(igpsim(&["simulate", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(igpsim(&["--sequential", "simulate", &cfg, "--out", b.to_str().unwrap()]).status.success());
    for name in ["snapshot_t0000.010.csv", "diagnostics.csv"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn table1_reports_three_thresholds() {
    let o = igpsim(&["table1", "preset:model1_e1_1_e2_10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("0.02020202"), "{text}");
    assert!(text.contains("2.02020202"), "{text}");
    assert!(text.contains("2.0206"), "{text}");
    // a coarse grid steps over the interior stability window
    let coarse = stdout(&igpsim(&["table1", "preset:model1_e1_1_e2_10", "--points", "2041"]));
    assert!(!coarse.contains("2.0206"), "{coarse}");
}

#[test]
fn equilibria_prints_interior_point() {
    let o = igpsim(&["equilibria", "preset:model1_e1_1_e2_10", "--K", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("3,P5,")).expect("P5 row");
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[2].parse::<f64>().unwrap(), 1.0);
    assert_eq!(cols[3].parse::<f64>().unwrap(), 2.0);
    assert!((cols[4].parse::<f64>().unwrap() - 2.0 * 97.0 / 3.0).abs() < 1e-12);
}

#[test]
fn mms_orders_near_two() {
    let o = igpsim(&["mms", "--levels", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let orders: Vec<f64> = text.lines().skip(2).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(orders.len(), 2);
    assert!(orders.iter().all(|&o| o >= 1.9), "{orders:?}");
}

#[test]
fn ode_starts_from_spatial_means() {
    let o = igpsim(&["ode", "preset:model1_e1_1_e2_10", "--K", "1", "--t-final", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let first = text.lines().nth(1).unwrap();
    let w0: f64 = first.split(',').nth(3).unwrap().parse().unwrap();
    assert!((w0 - 1.5).abs() < 1e-12);
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn missing_key_is_a_one_line_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, preset("model1_e1_1_e2_10").unwrap().replace("mu = 0.05\n", "")).unwrap();
    let o = igpsim(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error[config]:") && err.contains("params.mu"), "{err}");
}

#[test]
fn unknown_preset_and_missing_file_fail() {
    let o = igpsim(&["simulate", "preset:nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[config]"));
    let o = igpsim(&["equilibria", "/nonexistent/cfg.toml", "--K", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors() {
    assert!(!igpsim(&["frobnicate"]).status.success());
    let o = igpsim(&["equilibria", "preset:model1_e1_1_e2_10", "--K", "1:2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[usage]"));
}

#[test]
fn presets_listing() {
    let o = igpsim(&["presets"]);
    assert_eq!(stdout(&o).lines().count(), 14);
}

//! Simulation configuration: TOML files and the bundled presets.
//!
//! ```toml
//! [model]
//! id = 1                    # 1: chi1 along grad v, 2: chi2 along grad u
//! scheme = "imex_rk2"       # or "implicit_euler"
//!
//! [params]                  # alpha a b c d beta gamma mu nu d0 d1 d2 required
//! e1 = 1.0                  # e1, e2, q default to 0
//!
//! [mesh]                    # nx = ny = 32, rect = [-1, 1, -1, 1]
//! [time]                    # t_final required; dt = 1e-3; snapshot_times = [0, t_final]
//! [fields]                  # K, u0, v0, w0 required (expressions in x, y)
//! [output]                  # dir = "output", format = "vtk" | "csv"
//! [solver]                  # tol = 1e-12, max_iter = 10 n
//! [diagnostics]             # stride = 100
//! ```
//!
//! Unknown keys are rejected. Keys filled from defaults are listed in
//! [`SimConfig::defaulted`].

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;
use toml::{Table, Value};

use crate::dynamics::{DynamicsError, ModelId, Params};
use crate::expr::{Expr, ParseError};
use crate::mesh::Rect;
use crate::sparse::SolverOptions;
use crate::stepper::{Scheme, StepError, TimeGrid};

/// Environment variable that replaces `[output] dir`.
pub const OUTPUT_DIR_ENV: &str = "IGP_OUTPUT_DIR";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed TOML: {0}")]
    Syntax(String),
    #[error("missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{key}` must be {expected}")]
    BadType { key: String, expected: &'static str },
    #[error("`{key}` = {value} out of range: must be {bound}")]
    OutOfRange { key: String, value: f64, bound: String },
    #[error("bad expression in `{key}` at byte {offset}: {message}")]
    Expression { key: String, offset: usize, message: String },
    #[error("unknown preset `{name}` (available: {})", available.join(", "))]
    UnknownPreset { name: String, available: Vec<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Vtk,
    Csv,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Vtk => "vtk",
            OutputFormat::Csv => "csv",
        }
    }

    pub fn extension(self) -> &'static str {
        self.name()
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExpr {
    pub text: String,
    pub expr: Expr,
}

impl FieldExpr {
    pub fn parse(key: &str, text: &str) -> Result<FieldExpr, ConfigError> {
        let expr = Expr::parse(text).map_err(|e: ParseError| ConfigError::Expression {
            key: key.to_string(),
            offset: e.offset(),
            message: e.to_string(),
        })?;
        Ok(FieldExpr {
            text: text.to_string(),
            expr,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: Params,
    pub scheme: Scheme,
    pub nx: usize,
    pub ny: usize,
    pub rect: Rect,
    pub dt: f64,
    pub t_final: f64,
    pub snapshot_times: Vec<f64>,
    pub k: FieldExpr,
    pub u0: FieldExpr,
    pub v0: FieldExpr,
    pub w0: FieldExpr,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub tol: f64,
    pub max_iter: Option<usize>,
    pub stride: usize,
    /// Dotted keys that took their default value.
    pub defaulted: Vec<String>,
}

const PARAM_REQUIRED: [&str; 12] = ["alpha", "a", "b", "c", "d", "beta", "gamma", "mu", "nu", "d0", "d1", "d2"];
const PARAM_OPTIONAL: [&str; 3] = ["e1", "e2", "q"];

const SCHEMA: [(&str, &[&str]); 8] = [
    ("model", &["id", "scheme"]),
    (
        "params",
        &["alpha", "a", "b", "c", "d", "beta", "gamma", "mu", "nu", "d0", "d1", "d2", "e1", "e2", "q"],
    ),
    ("mesh", &["nx", "ny", "rect"]),
    ("time", &["dt", "t_final", "snapshot_times"]),
    ("fields", &["K", "u0", "v0", "w0"]),
    ("output", &["dir", "format"]),
    ("solver", &["tol", "max_iter"]),
    ("diagnostics", &["stride"]),
];

/// Every key without a default, in file order.
pub fn required_keys() -> Vec<String> {
    let mut out = vec!["model.id".to_string()];
    out.extend(PARAM_REQUIRED.iter().map(|k| format!("params.{k}")));
    out.push("time.t_final".into());
    out.extend(["K", "u0", "v0", "w0"].iter().map(|k| format!("fields.{k}")));
    out
}

struct Reader<'a> {
    root: &'a Table,
    defaulted: Vec<String>,
    missing: Vec<String>,
}

impl<'a> Reader<'a> {
    fn get(&self, section: &str, key: &str) -> Option<&'a Value> {
        self.root.get(section).and_then(|s| s.as_table()).and_then(|t| t.get(key))
    }

    fn float(&mut self, section: &str, key: &str, default: Option<f64>) -> Result<f64, ConfigError> {
        let name = format!("{section}.{key}");
        match self.get(section, key) {
            Some(Value::Float(x)) => Ok(*x),
            Some(Value::Integer(i)) => Ok(*i as f64),
            Some(_) => Err(ConfigError::BadType { key: name, expected: "a number" }),
            None => Ok(self.fallback(name, default, f64::NAN)),
        }
    }

    fn uint(&mut self, section: &str, key: &str, default: Option<usize>) -> Result<usize, ConfigError> {
        let name = format!("{section}.{key}");
        match self.get(section, key) {
            Some(Value::Integer(i)) if *i >= 0 => Ok(*i as usize),
            Some(_) => Err(ConfigError::BadType {
                key: name,
                expected: "a non-negative integer",
            }),
            None => Ok(self.fallback(name, default, 0)),
        }
    }

    fn string(&mut self, section: &str, key: &str, default: Option<&str>) -> Result<String, ConfigError> {
        let name = format!("{section}.{key}");
        match self.get(section, key) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(ConfigError::BadType { key: name, expected: "a string" }),
            None => Ok(self.fallback(name, default.map(str::to_string), String::new())),
        }
    }

    fn floats(&mut self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let name = format!("{section}.{key}");
        match self.get(section, key) {
            None => {
                self.defaulted.push(name);
                Ok(None)
            }
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::Float(x) => Ok(*x),
                    Value::Integer(i) => Ok(*i as f64),
                    _ => Err(ConfigError::BadType {
                        key: name.clone(),
                        expected: "an array of numbers",
                    }),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(ConfigError::BadType {
                key: name,
                expected: "an array of numbers",
            }),
        }
    }

    fn fallback<T>(&mut self, name: String, default: Option<T>, placeholder: T) -> T {
        match default {
            Some(d) => {
                self.defaulted.push(name);
                d
            }
            None => {
                self.missing.push(name);
                placeholder
            }
        }
    }
}

fn check_unknown(root: &Table) -> Result<(), ConfigError> {
    for (section, value) in root {
        let Some(keys) = SCHEMA.iter().find(|(s, _)| s == section).map(|(_, k)| *k) else {
            return Err(ConfigError::UnknownKey(section.clone()));
        };
        let Some(table) = value.as_table() else {
            return Err(ConfigError::BadType {
                key: section.clone(),
                expected: "a table",
            });
        };
        if let Some(k) = table.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(ConfigError::UnknownKey(format!("{section}.{k}")));
        }
    }
    Ok(())
}

fn out_of_range(key: &str, value: f64, bound: &str) -> ConfigError {
    ConfigError::OutOfRange {
        key: key.to_string(),
        value,
        bound: bound.to_string(),
    }
}

impl SimConfig {
    pub fn parse(text: &str) -> Result<SimConfig, ConfigError> {
        let root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_string()))?;
        check_unknown(&root)?;
        let mut r = Reader {
            root: &root,
            defaulted: Vec::new(),
            missing: Vec::new(),
        };

        let model_id = match r.get("model", "id") {
            Some(Value::Integer(i)) => Some(*i),
            Some(_) => {
                return Err(ConfigError::BadType {
                    key: "model.id".into(),
                    expected: "1 or 2",
                })
            }
            None => {
                r.missing.push("model.id".into());
                None
            }
        };
        let scheme_name = r.string("model", "scheme", Some(Scheme::default().name()))?;
        let mut pv = [0.0; 15];
        for (slot, key) in pv.iter_mut().zip(PARAM_REQUIRED.iter().chain(&PARAM_OPTIONAL)) {
            let default = PARAM_OPTIONAL.contains(key).then_some(0.0);
            *slot = r.float("params", key, default)?;
        }
        let nx = r.uint("mesh", "nx", Some(32))?;
        let ny = r.uint("mesh", "ny", Some(32))?;
        let rect = r.floats("mesh", "rect")?;
        let dt = r.float("time", "dt", Some(1e-3))?;
        let t_final = r.float("time", "t_final", None)?;
        let snaps = r.floats("time", "snapshot_times")?;
        let k = r.string("fields", "K", None)?;
        let u0 = r.string("fields", "u0", None)?;
        let v0 = r.string("fields", "v0", None)?;
        let w0 = r.string("fields", "w0", None)?;
        let dir = r.string("output", "dir", Some("output"))?;
        let format = r.string("output", "format", Some("vtk"))?;
        let tol = r.float("solver", "tol", Some(1e-12))?;
        let max_iter = match r.get("solver", "max_iter") {
            None => {
                r.defaulted.push("solver.max_iter".into());
                None
            }
            Some(_) => Some(r.uint("solver", "max_iter", None)?),
        };
        let stride = r.uint("diagnostics", "stride", Some(100))?;

        if !r.missing.is_empty() {
            return Err(ConfigError::MissingKeys(r.missing));
        }

        let model = ModelId::from_number(model_id.unwrap_or(0)).ok_or_else(|| {
            out_of_range("model.id", model_id.unwrap_or(0) as f64, "1 or 2")
        })?;
        let scheme = Scheme::from_name(&scheme_name).ok_or(ConfigError::BadType {
            key: "model.scheme".into(),
            expected: "\"imex_rk2\" or \"implicit_euler\"",
        })?;
        let [alpha, a, b, c, d, beta, gamma, mu, nu, d0, d1, d2, e1, e2, q] = pv;
        let params = Params {
            alpha,
            a,
            b,
            c,
            d,
            gamma,
            beta,
            mu,
            nu,
            d0,
            d1,
            d2,
            e1,
            e2,
            q,
            model,
        };
        params.validate().map_err(|e| match e {
            DynamicsError::OutOfRange { name, value, bound } => out_of_range(&format!("params.{name}"), value, bound),
            other => ConfigError::Syntax(other.to_string()),
        })?;

        if nx == 0 {
            return Err(out_of_range("mesh.nx", 0.0, ">= 1"));
        }
        if ny == 0 {
            return Err(out_of_range("mesh.ny", 0.0, ">= 1"));
        }
        let rect = match rect {
            None => Rect::UNIT_SQUARE,
            Some(v) if v.len() == 4 => Rect {
                xmin: v[0],
                xmax: v[1],
                ymin: v[2],
                ymax: v[3],
            },
            Some(_) => {
                return Err(ConfigError::BadType {
                    key: "mesh.rect".into(),
                    expected: "[xmin, xmax, ymin, ymax]",
                })
            }
        };
        if !(rect.xmax > rect.xmin && rect.ymax > rect.ymin && rect.area().is_finite()) {
            return Err(out_of_range("mesh.rect", rect.area(), "a non-degenerate rectangle"));
        }
        let snapshot_times = snaps.unwrap_or_else(|| vec![0.0, t_final]);
        let grid = TimeGrid::new(dt, t_final, &snapshot_times).map_err(|e| match e {
            StepError::BadTimeGrid(msg) => ConfigError::OutOfRange {
                key: "time".into(),
                value: dt,
                bound: msg,
            },
            other => ConfigError::Syntax(other.to_string()),
        })?;
        let format = match format.as_str() {
            "vtk" => OutputFormat::Vtk,
            "csv" => OutputFormat::Csv,
            _ => {
                return Err(ConfigError::BadType {
                    key: "output.format".into(),
                    expected: "\"vtk\" or \"csv\"",
                })
            }
        };
        if !(tol > 0.0 && tol < 1.0) {
            return Err(out_of_range("solver.tol", tol, "in (0, 1)"));
        }
        if max_iter == Some(0) {
            return Err(out_of_range("solver.max_iter", 0.0, ">= 1"));
        }
        if stride == 0 {
            return Err(out_of_range("diagnostics.stride", 0.0, ">= 1"));
        }

        Ok(SimConfig {
            params,
            scheme,
            nx,
            ny,
            rect,
            dt,
            t_final,
            snapshot_times: grid.snapshot_times,
            k: FieldExpr::parse("fields.K", &k)?,
            u0: FieldExpr::parse("fields.u0", &u0)?,
            v0: FieldExpr::parse("fields.v0", &v0)?,
            w0: FieldExpr::parse("fields.w0", &w0)?,
            output_dir: PathBuf::from(dir),
            format,
            tol,
            max_iter,
            stride,
            defaulted: r.defaulted,
        })
    }

    pub fn load(path: &Path) -> Result<SimConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        SimConfig::parse(&text)
    }

    /// `preset:NAME` or a file path.
    pub fn load_source(source: &str) -> Result<SimConfig, ConfigError> {
        match source.strip_prefix("preset:") {
            Some(name) => SimConfig::parse(preset(name)?),
            None => SimConfig::load(Path::new(source)),
        }
    }

    pub fn time_grid(&self) -> TimeGrid {
        TimeGrid::new(self.dt, self.t_final, &self.snapshot_times).expect("validated on parse")
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            ..Default::default()
        }
    }

    /// Output directory after applying [`OUTPUT_DIR_ENV`].
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(d) if !d.is_empty() => PathBuf::from(d),
            _ => self.output_dir.clone(),
        }
    }

    /// Fully explicit TOML; parsing it yields the same configuration.
    pub fn to_toml(&self) -> String {
        let p = &self.params;
        let mut root = Table::new();
        let mut t = Table::new();
        t.insert("id".into(), Value::Integer(p.model.number()));
        t.insert("scheme".into(), Value::String(self.scheme.name().into()));
        root.insert("model".into(), Value::Table(t));

        let mut t = Table::new();
        let vals = [p.alpha, p.a, p.b, p.c, p.d, p.beta, p.gamma, p.mu, p.nu, p.d0, p.d1, p.d2, p.e1, p.e2, p.q];
        for (k, v) in PARAM_REQUIRED.iter().chain(&PARAM_OPTIONAL).zip(vals) {
            t.insert((*k).into(), Value::Float(v));
        }
        root.insert("params".into(), Value::Table(t));

        let floats = |v: &[f64]| Value::Array(v.iter().map(|x| Value::Float(*x)).collect());
        let mut t = Table::new();
        t.insert("nx".into(), Value::Integer(self.nx as i64));
        t.insert("ny".into(), Value::Integer(self.ny as i64));
        let r = self.rect;
        t.insert("rect".into(), floats(&[r.xmin, r.xmax, r.ymin, r.ymax]));
        root.insert("mesh".into(), Value::Table(t));

        let mut t = Table::new();
        t.insert("dt".into(), Value::Float(self.dt));
        t.insert("t_final".into(), Value::Float(self.t_final));
        t.insert("snapshot_times".into(), floats(&self.snapshot_times));
        root.insert("time".into(), Value::Table(t));

        let mut t = Table::new();
        for (k, f) in [("K", &self.k), ("u0", &self.u0), ("v0", &self.v0), ("w0", &self.w0)] {
            t.insert(k.into(), Value::String(f.text.clone()));
        }
        root.insert("fields".into(), Value::Table(t));

        let mut t = Table::new();
        t.insert("dir".into(), Value::String(self.output_dir.display().to_string()));
        t.insert("format".into(), Value::String(self.format.name().into()));
        root.insert("output".into(), Value::Table(t));

        let mut t = Table::new();
        t.insert("tol".into(), Value::Float(self.tol));
        if let Some(m) = self.max_iter {
            t.insert("max_iter".into(), Value::Integer(m as i64));
        }
        root.insert("solver".into(), Value::Table(t));

        let mut t = Table::new();
        t.insert("stride".into(), Value::Integer(self.stride as i64));
        root.insert("diagnostics".into(), Value::Table(t));

        toml::to_string(&root).expect("plain table serializes")
    }
}

pub const PRESETS: [(&str, &str); 14] = [
    ("model1_e1_1_e2_1", include_str!("../presets/model1_e1_1_e2_1.toml")),
    ("model1_e1_1_e2_0p5", include_str!("../presets/model1_e1_1_e2_0p5.toml")),
    ("model1_e1_1_e2_2", include_str!("../presets/model1_e1_1_e2_2.toml")),
    ("model1_e1_1_e2_10", include_str!("../presets/model1_e1_1_e2_10.toml")),
    ("model1_e1_10_e2_1", include_str!("../presets/model1_e1_10_e2_1.toml")),
    ("model1_habitat_four_bump", include_str!("../presets/model1_habitat_four_bump.toml")),
    ("model1_habitat_five_bump", include_str!("../presets/model1_habitat_five_bump.toml")),
    ("model2_q0p1_c1", include_str!("../presets/model2_q0p1_c1.toml")),
    ("model2_q0p1_c1p5", include_str!("../presets/model2_q0p1_c1p5.toml")),
    ("model2_q1_c1p5", include_str!("../presets/model2_q1_c1p5.toml")),
    ("model2_q1_c2p5", include_str!("../presets/model2_q1_c2p5.toml")),
    ("model2_q10_c0p1", include_str!("../presets/model2_q10_c0p1.toml")),
    ("model2_q10_c1", include_str!("../presets/model2_q10_c1.toml")),
    ("model2_q10_c1p5", include_str!("../presets/model2_q10_c1p5.toml")),
];

pub fn preset(name: &str) -> Result<&'static str, ConfigError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| ConfigError::UnknownPreset {
            name: name.to_string(),
            available: PRESETS.iter().map(|(n, _)| n.to_string()).collect(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
id = 1
[params]
alpha = 5
a = 2.0
b = 5.0
c = 0.1
d = 2.0
beta = 1.0
gamma = 1.0
mu = 0.05
nu = 0.05
d0 = 0.1
d1 = 1
d2 = 1
[time]
t_final = 1.0
[fields]
K = "1"
u0 = "0.5"
v0 = "0.5"
w0 = "1.5"
"#;

    #[test]
    fn empty_file_lists_every_required_key() {
        match SimConfig::parse("") {
            Err(ConfigError::MissingKeys(keys)) => assert_eq!(keys, required_keys()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_key_is_named() {
        let text = MINIMAL.replace("nu = 0.05\n", "");
        assert_eq!(SimConfig::parse(&text), Err(ConfigError::MissingKeys(vec!["params.nu".into()])));
    }

    #[test]
    fn defaults_and_provenance() {
        let c = SimConfig::parse(MINIMAL).unwrap();
        assert_eq!((c.nx, c.ny), (32, 32));
        assert_eq!(c.dt, 1e-3);
        assert_eq!(c.rect, Rect::UNIT_SQUARE);
        assert_eq!(c.snapshot_times, vec![0.0, 1.0]);
        assert_eq!(c.format, OutputFormat::Vtk);
        assert_eq!(c.params.e1, 0.0);
        assert_eq!(c.scheme, Scheme::ImexRk2);
        for k in ["params.e1", "params.q", "mesh.nx", "time.dt", "output.format", "solver.tol", "diagnostics.stride"] {
            assert!(c.defaulted.iter().any(|d| d == k), "{k}");
        }
        assert!(!c.defaulted.iter().any(|d| d == "params.alpha"));
    }

    #[test]
    fn bad_values_are_reported() {
        let e = SimConfig::parse(&MINIMAL.replace("mu = 0.05", "mu = -1")).unwrap_err();
        assert!(matches!(e, ConfigError::OutOfRange { ref key, .. } if key == "params.mu"), "{e}");
        let e = SimConfig::parse(&MINIMAL.replace("id = 1", "id = 3")).unwrap_err();
        assert!(matches!(e, ConfigError::OutOfRange { ref key, .. } if key == "model.id"));
        let e = SimConfig::parse(&MINIMAL.replace("K = \"1\"", "K = \"1 + * x\"")).unwrap_err();
        assert!(matches!(e, ConfigError::Expression { ref key, offset: 4, .. } if key == "fields.K"), "{e}");
        let e = SimConfig::parse(&format!("{MINIMAL}\n[output]\nformat = \"png\"\n")).unwrap_err();
        assert!(matches!(e, ConfigError::BadType { .. }));
        let e = SimConfig::parse(&MINIMAL.replace("d0 = 0.1", "d0 = 0.1\nd9 = 1")).unwrap_err();
        assert_eq!(e, ConfigError::UnknownKey("params.d9".into()));
        let e = SimConfig::parse(&MINIMAL.replace("t_final = 1.0", "t_final = 1.0\ndt = 0.3")).unwrap_err();
        assert!(matches!(e, ConfigError::OutOfRange { .. }));
        assert!(matches!(SimConfig::parse("[model"), Err(ConfigError::Syntax(_))));
    }

    #[test]
    fn serialization_round_trips() {
        for (name, text) in PRESETS {
            let a = SimConfig::parse(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            let s = a.to_toml();
            let b = SimConfig::parse(&s).unwrap();
            assert!(b.defaulted.is_empty() || b.defaulted == ["solver.max_iter"], "{:?}", b.defaulted);
            assert_eq!(SimConfig { defaulted: vec![], ..a }, SimConfig { defaulted: vec![], ..b.clone() });
            assert_eq!(s, b.to_toml());
        }
    }

    #[test]
    fn presets_match_scenarios() {
        let c = SimConfig::load_source("preset:model1_e1_1_e2_10").unwrap();
        assert_eq!((c.params.e1, c.params.e2), (1.0, 10.0));
        assert_eq!(c.params.model, ModelId::ActiveSearch);
        assert_eq!(c.params.c, 0.1);
        assert_eq!(c.snapshot_times, vec![0.0, 0.1, 0.5, 2.0, 4.0, 20.0]);
        assert_eq!(c.t_final, 20.0);

        let c = SimConfig::load_source("preset:model2_q10_c1").unwrap();
        assert_eq!((c.params.q, c.params.c), (10.0, 1.0));
        assert_eq!(c.params.model, ModelId::ResourceAttraction);

        let five = SimConfig::load_source("preset:model1_habitat_five_bump").unwrap();
        assert!((five.k.expr.eval(0.0, 0.0).unwrap() - 2.0288).abs() < 1e-3);

        assert!(matches!(
            SimConfig::load_source("preset:nope"),
            Err(ConfigError::UnknownPreset { .. })
        ));
    }

    #[test]
    fn load_reports_path() {
        let e = SimConfig::load(Path::new("/definitely/not/here.toml")).unwrap_err();
        assert!(matches!(e, ConfigError::Io { ref path, .. } if path.contains("not/here")));
    }
}

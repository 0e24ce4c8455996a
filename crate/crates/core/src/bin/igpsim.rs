//! Command-line driver.
//!
//! Every failure prints a single line `error[<kind>]: <message>` on stderr
//! and exits with status 1 (usage errors from clap exit with 2).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use igp_core::config::{SimConfig, PRESETS};
use igp_core::equilibria::{self, Label};
use igp_core::exec::ExecPolicy;
use igp_core::fem::{mms_study, AssembledOperators};
use igp_core::mesh::build_rect_mesh;
use igp_core::output::{self, write_atomic};
use igp_core::stepper::{self, integral};

#[derive(Parser)]
#[command(name = "igpsim", version, about = "Intraguild-predation chemotaxis simulator")]
struct Cli {
    /// Run every kernel on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write snapshots, diagnostics and a manifest.
    Simulate {
        /// Config file or `preset:NAME`.
        config: String,
        /// Output directory (overrides the config and IGP_OUTPUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form equilibria and their stability at constant K.
    Equilibria {
        config: String,
        /// A value, or `lo:hi:n` for n evenly spaced values.
        #[arg(long = "K", alias = "k")]
        k: String,
    },
    /// Existence/stability scan over K with bisected thresholds.
    Table1 {
        config: String,
        #[arg(long, default_value_t = 0.01)]
        kmin: f64,
        #[arg(long, default_value_t = 2.05)]
        kmax: f64,
        #[arg(long, default_value_t = 20401)]
        points: usize,
        /// Write every scanned row to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Manufactured-solution convergence study for -Lap u + mu u = f.
    Mms {
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 16)]
        start: usize,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
    },
    /// Integrate the spatially homogeneous system from the mean initial data.
    Ode {
        config: String,
        #[arg(long = "K", alias = "k")]
        k: f64,
        /// Final time (defaults to the config's).
        #[arg(long)]
        t_final: Option<f64>,
        /// Step size (defaults to the config's).
        #[arg(long)]
        dt: Option<f64>,
        /// Print every n-th step.
        #[arg(long, default_value_t = 1000)]
        stride: usize,
    },
    /// List the bundled presets, or print one.
    Presets { name: Option<String> },
}

struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, e: impl std::fmt::Display) -> Failure {
        Failure {
            kind,
            message: e.to_string().replace('\n', " "),
        }
    }
}

fn load(source: &str) -> Result<SimConfig, Failure> {
    SimConfig::load_source(source).map_err(|e| Failure::new("config", e))
}

fn parse_k_values(spec: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::new("usage", format!("--K expects a value or lo:hi:n, got `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts[..] {
        [v] => Ok(vec![v.parse().map_err(|_| bad())?]),
        [lo, hi, n] => {
            let (lo, hi): (f64, f64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
            let n: usize = n.parse().map_err(|_| bad())?;
            Ok(equilibria::linspace(lo, hi, n))
        }
        _ => Err(bad()),
    }
}

fn simulate(source: &str, out: Option<PathBuf>, exec: ExecPolicy) -> Result<String, Failure> {
    let config = load(source)?;
    let dir = out.unwrap_or_else(|| config.resolved_output_dir());
    let (stepper, run) = stepper::run(&config, exec).map_err(|e| Failure::new("run", e))?;
    let mesh = stepper.mesh();
    for snap in &run.snapshots {
        let path = dir.join(output::snapshot_name(snap.t, config.format));
        output::write_snapshot(snap, mesh, &path, config.format).map_err(|e| Failure::new("io", e))?;
    }
    let diag = dir.join("diagnostics.csv");
    write_atomic(&diag, output::diagnostics_csv(&run.diagnostics).as_bytes()).map_err(|e| Failure::new("io", e))?;
    let extra = [
        ("exec", format!("{exec:?}")),
        ("k0", format!("{}", stepper.k0())),
        ("warnings", config.params.survivability_warnings().join("; ")),
    ];
    let manifest = output::manifest(&config.to_toml(), &extra);
    write_atomic(&dir.join("manifest.toml"), manifest.as_bytes()).map_err(|e| Failure::new("io", e))?;

    let last = run.diagnostics.last().expect("initial row");
    let mins = run.global_minima();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "wrote {} snapshot(s) to {} ({} steps)",
        run.snapshots.len(),
        dir.display(),
        config.time_grid().n_steps()
    );
    let _ = writeln!(
        s,
        "t = {}: biomass {:.6} (envelope {:.6}), bound_ok = {}, min (u, v, w) = ({:.3e}, {:.3e}, {:.3e}), nonnegative = {}",
        last.t,
        last.total_biomass,
        last.envelope,
        run.bound_ok(),
        mins[0],
        mins[1],
        mins[2],
        run.nonnegative()
    );
    Ok(s)
}

fn equilibria_cmd(source: &str, k: &str) -> Result<String, Failure> {
    let p = load(source)?.params;
    let mut s = String::from("K,label,u*,v*,w*,exists,max_re_lambda,classification\n");
    for k in parse_k_values(k)? {
        let pts = equilibria::compute_equilibria(&p, k).map_err(|e| Failure::new("equilibria", e))?;
        for pt in pts {
            let _ = writeln!(
                s,
                "{k},{},{},{},{},{},{},{}",
                pt.label, pt.coords[0], pt.coords[1], pt.coords[2], pt.exists, pt.max_re, pt.classification
            );
        }
        let p3 = equilibria::equilibrium(&p, k, Label::P3);
        if p3.exists {
            let claim = equilibria::closed_form_p3_stable(&p, k);
            let agree = claim == (p3.classification == equilibria::Stability::Stable);
            let _ = writeln!(s, "# K = {k}: closed-form P3 condition says stable = {claim}; spectrum agrees = {agree}");
        }
    }
    Ok(s)
}

fn table1(source: &str, kmin: f64, kmax: f64, points: usize, csv: Option<PathBuf>, exec: ExecPolicy) -> Result<String, Failure> {
    let p = load(source)?.params;
    if !(kmin > 0.0 && kmax > kmin && points >= 2) {
        return Err(Failure::new("usage", "need 0 < kmin < kmax and points >= 2"));
    }
    let grid = equilibria::linspace(kmin, kmax, points);
    let rep = equilibria::scan_table1(&p, &grid, exec).map_err(|e| Failure::new("equilibria", e))?;
    if let Some(path) = csv {
        let mut body = String::from("K,label,u*,v*,w*,exists,max_re_lambda,classification\n");
        for row in &rep.rows {
            for pt in &row.points {
                let _ = writeln!(
                    body,
                    "{},{},{},{},{},{},{},{}",
                    row.k, pt.label, pt.coords[0], pt.coords[1], pt.coords[2], pt.exists, pt.max_re, pt.classification
                );
            }
        }
        write_atomic(&path, body.as_bytes()).map_err(|e| Failure::new("io", e))?;
    }
    let mut s = String::new();
    let _ = writeln!(s, "scanned {points} values of K in [{kmin}, {kmax}]");
    let _ = writeln!(s, "{:<6} {:>14}  {:<10} -> {:<10}", "point", "K", "before", "after");
    for t in &rep.thresholds {
        let _ = writeln!(s, "{:<6} {:>14.8}  {:<10} -> {:<10}", t.label.to_string(), t.k, t.before.to_string(), t.after.to_string());
    }
    Ok(s)
}

fn mms(levels: usize, start: usize, mu: f64, exec: ExecPolicy) -> Result<String, Failure> {
    if levels == 0 || start == 0 {
        return Err(Failure::new("usage", "--levels and --start must be >= 1"));
    }
    let rep = mms_study(start, levels, mu, exec).map_err(|e| Failure::new("solver", e))?;
    let orders = rep.orders();
    let mut s = String::from("cells,h,l2_error,order,cg_iterations\n");
    for (i, l) in rep.levels.iter().enumerate() {
        let order = if i == 0 { String::from("-") } else { format!("{:.4}", orders[i - 1]) };
        let _ = writeln!(s, "{},{:.6},{:.6e},{},{}", l.cells, l.h, l.l2_error, order, l.iterations);
    }
    Ok(s)
}

fn ode(source: &str, k: f64, t_final: Option<f64>, dt: Option<f64>, stride: usize, exec: ExecPolicy) -> Result<String, Failure> {
    let config = load(source)?;
    if !(k > 0.0) {
        return Err(Failure::new("usage", "--K must be positive"));
    }
    let mesh = build_rect_mesh(config.nx, config.ny, config.rect).map_err(|e| Failure::new("mesh", e))?;
    let ops = AssembledOperators::new(&mesh, exec);
    let area = ops.domain_area();
    let mut x0 = [0.0; 3];
    for (slot, f) in x0.iter_mut().zip([&config.u0, &config.v0, &config.w0]) {
        let vals = f.expr.sample(&mesh.nodes).map_err(|e| Failure::new("expression", e))?;
        *slot = integral(&vals, &ops.mass) / area;
    }
    let dt = dt.unwrap_or(config.dt);
    let t_final = t_final.unwrap_or(config.t_final);
    if !(dt > 0.0 && t_final >= 0.0) {
        return Err(Failure::new("usage", "need dt > 0 and t_final >= 0"));
    }
    let traj = stepper::ode_midpoint(&config.params, k, x0, dt, t_final, stride);
    let mut s = String::from("t,u,v,w\n");
    for (t, x) in traj {
        let _ = writeln!(s, "{t},{},{},{}", x[0], x[1], x[2]);
    }
    Ok(s)
}

fn presets(name: Option<String>) -> Result<String, Failure> {
    match name {
        None => Ok(PRESETS.iter().map(|(n, _)| format!("{n}\n")).collect()),
        Some(n) => igp_core::config::preset(&n).map(str::to_string).map_err(|e| Failure::new("config", e)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { ExecPolicy::Sequential } else { ExecPolicy::default() };
    let result = match cli.command {
        Command::Simulate { config, out } => simulate(&config, out, exec),
        Command::Equilibria { config, k } => equilibria_cmd(&config, &k),
        Command::Table1 {
            config,
            kmin,
            kmax,
            points,
            csv,
        } => table1(&config, kmin, kmax, points, csv, exec),
        Command::Mms { levels, start, mu } => mms(levels, start, mu, exec),
        Command::Ode {
            config,
            k,
            t_final,
            dt,
            stride,
        } => ode(&config, k, t_final, dt, stride, exec),
        Command::Presets { name } => presets(name),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, f.message);
            ExitCode::from(1)
        }
    }
}


//! Time integration of the coupled system and runtime diagnostics.
//!
//! Both schemes treat diffusion implicitly and reaction plus chemotaxis
//! explicitly, one linear solve per species and stage:
//!
//! ```text
//! lagged Euler:  (M + dt d_i S) x1 = M (x0 + dt R(x0)) + dt T(x0)
//! IMEX midpoint: (M + dt/2 d_i S) xh = M (x0 + dt/2 R(x0)) + dt/2 T(x0)
//!                (M + dt d_i S)   x1 = M (x0 + dt R(xh))  + dt T(xh)
//! ```
//!
//! `R` is the nodal reaction vector and `T` the chemotaxis load, which only
//! enters the `w` equation.

use thiserror::Error;

use crate::config::SimConfig;
use crate::dynamics::{reaction_unchecked, FieldState, Params};
use crate::exec::ExecPolicy;
use crate::fem::{chemotaxis_rhs_with, AssembledOperators};
use crate::mesh::{build_rect_mesh, TriMesh};
use crate::sparse::{solve_cg_from, SolveError, SolverOptions, SolverReport, SparseMatrix};

const SPECIES: [&str; 3] = ["u", "v", "w"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("invalid time grid: {0}")]
    BadTimeGrid(String),
    #[error("K field has {got} values for {expected} nodes")]
    FieldLength { expected: usize, got: usize },
    #[error("linear solve for {species} failed at t = {t}: {source}")]
    Solver {
        species: &'static str,
        t: f64,
        source: SolveError,
    },
    #[error("linear solve for {species} did not converge at t = {t} (residual {:.3e} after {} iterations)", report.final_residual, report.iterations)]
    NotConverged {
        species: &'static str,
        t: f64,
        report: SolverReport,
    },
    #[error("non-finite value in {species} at t = {t}")]
    NonFinite { species: &'static str, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    ImexRk2,
    ImplicitEuler,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ImexRk2 => "imex_rk2",
            Scheme::ImplicitEuler => "implicit_euler",
        }
    }

    pub fn from_name(s: &str) -> Option<Scheme> {
        match s {
            "imex_rk2" => Some(Scheme::ImexRk2),
            "implicit_euler" => Some(Scheme::ImplicitEuler),
            _ => None,
        }
    }
}

/// Constant step on `[0, T]`; `T` must be a whole number of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub t_final: f64,
    /// Sorted, deduplicated, within `[0, T]`.
    pub snapshot_times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(dt: f64, t_final: f64, snapshot_times: &[f64]) -> Result<TimeGrid, StepError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(StepError::BadTimeGrid(format!("dt = {dt} must be finite and > 0")));
        }
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(StepError::BadTimeGrid(format!("T = {t_final} must be finite and >= 0")));
        }
        let n = (t_final / dt).round();
        if (n * dt - t_final).abs() > 1e-9 * t_final.max(dt) {
            return Err(StepError::BadTimeGrid(format!("T = {t_final} is not a multiple of dt = {dt}")));
        }
        let mut snaps = snapshot_times.to_vec();
        if let Some(&bad) = snaps.iter().find(|&&s| !(s >= 0.0 && s <= t_final * (1.0 + 1e-12))) {
            return Err(StepError::BadTimeGrid(format!("snapshot time {bad} outside [0, {t_final}]")));
        }
        snaps.sort_by(f64::total_cmp);
        snaps.dedup_by(|a, b| (*a - *b).abs() < 0.5 * dt);
        Ok(TimeGrid {
            dt,
            t_final,
            snapshot_times: snaps,
        })
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Step index nearest to each snapshot time.
    pub fn snapshot_steps(&self) -> Vec<usize> {
        self.snapshot_times.iter().map(|t| (t / self.dt).round() as usize).collect()
    }
}

/// `1^T M (u + v/gamma + w/(gamma beta))`.
pub fn total_biomass(state: &FieldState, mass: &SparseMatrix, p: &Params) -> f64 {
    let g = 1.0 / p.gamma;
    let gb = 1.0 / (p.gamma * p.beta);
    let weighted: Vec<f64> = (0..state.len()).map(|i| state.u[i] + g * state.v[i] + gb * state.w[i]).collect();
    integral(&weighted, mass)
}

/// `1^T M f`.
pub fn integral(f: &[f64], mass: &SparseMatrix) -> f64 {
    mass.row_sums().iter().zip(f).map(|(m, x)| m * x).sum()
}

/// `K0 = K (alpha + mu0)^2 / (4 alpha) |Omega|`, with `K` the largest
/// carrying capacity on the domain.
pub fn k0_bound(p: &Params, k_max: f64, area: f64) -> f64 {
    let s = p.alpha + p.mu0();
    0.25 * k_max * s * s / p.alpha * area
}

/// Grönwall envelope `max(W(0), K0/mu0)` for the total biomass.
pub fn biomass_envelope(w0: f64, k0: f64, p: &Params) -> f64 {
    w0.max(k0 / p.mu0())
}

/// Absolute slack allowed above the envelope.
pub const ENVELOPE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub total_biomass: f64,
    pub min: [f64; 3],
    pub linf: [f64; 3],
    pub bound_k0: f64,
    pub envelope: f64,
    pub bound_ok: bool,
    /// `|sum r| / ||r||_1` of the chemotaxis loads of the last step (0 if `r = 0`).
    pub taxis_imbalance: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str =
        "t,total_biomass,min_u,min_v,min_w,linf_u,linf_v,linf_w,bound_k0,envelope,bound_ok,taxis_imbalance";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.total_biomass,
            self.min[0],
            self.min[1],
            self.min[2],
            self.linf[0],
            self.linf[1],
            self.linf[2],
            self.bound_k0,
            self.envelope,
            self.bound_ok,
            self.taxis_imbalance
        )
    }

    pub fn nonnegative(&self) -> bool {
        self.min.iter().all(|&m| m >= crate::dynamics::NEGATIVITY_THRESHOLD)
    }
}

/// Per-step bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepInfo {
    /// Solver iterations summed over stages, per species.
    pub iterations: [usize; 3],
    pub taxis_imbalance: f64,
}

fn imbalance(r: &[f64]) -> f64 {
    let l1: f64 = r.iter().map(|x| x.abs()).sum();
    if l1 == 0.0 {
        0.0
    } else {
        r.iter().sum::<f64>().abs() / l1
    }
}

/// Stage matrices `M + tau d_i S` for one mesh, model and step size.
pub struct Stepper {
    mesh: TriMesh,
    ops: AssembledOperators,
    params: Params,
    k_field: Vec<f64>,
    dt: f64,
    scheme: Scheme,
    solver: SolverOptions,
    half: Option<[SparseMatrix; 3]>,
    full: [SparseMatrix; 3],
}

impl Stepper {
    pub fn new(
        mesh: TriMesh,
        params: Params,
        k_field: Vec<f64>,
        dt: f64,
        scheme: Scheme,
        solver: SolverOptions,
    ) -> Result<Stepper, StepError> {
        if k_field.len() != mesh.n_nodes() {
            return Err(StepError::FieldLength {
                expected: mesh.n_nodes(),
                got: k_field.len(),
            });
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(StepError::BadTimeGrid(format!("dt = {dt} must be finite and > 0")));
        }
        let ops = AssembledOperators::new(&mesh, solver.exec);
        let system = |tau: f64| params.diffusivities().map(|d| ops.mass.linear_combination(1.0, &ops.stiffness, tau * d));
        let half = (scheme == Scheme::ImexRk2).then(|| system(0.5 * dt));
        let full = system(dt);
        Ok(Stepper {
            mesh,
            ops,
            params,
            k_field,
            dt,
            scheme,
            solver,
            half,
            full,
        })
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    pub fn operators(&self) -> &AssembledOperators {
        &self.ops
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn k_field(&self) -> &[f64] {
        &self.k_field
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Chemotaxis load for `state` (entries sum to zero up to rounding).
    pub fn taxis(&self, state: &FieldState) -> Vec<f64> {
        chemotaxis_rhs_with(&self.mesh, &self.ops.geometry, &self.params, state, self.solver.exec)
    }

    /// Nodal `(F, G, H)` evaluated at `state`.
    pub fn reactions(&self, state: &FieldState) -> [Vec<f64>; 3] {
        let n = state.len();
        let exec = self.solver.exec;
        let rates = exec.map_indexed(n, |i| {
            reaction_unchecked(&self.params, self.k_field[i], state.u[i], state.v[i], state.w[i])
        });
        [0, 1, 2].map(|s| rates.iter().map(|r| r[s]).collect())
    }

    /// One stage: solves `(M + tau d_i S) x = M (base + tau R(at)) + tau T(at)`.
    fn stage(
        &self,
        systems: &[SparseMatrix; 3],
        base: &FieldState,
        at: &FieldState,
        tau: f64,
        t_new: f64,
        info: &mut StepInfo,
    ) -> Result<FieldState, StepError> {
        let exec = self.solver.exec;
        let rates = self.reactions(at);
        let taxis = self.taxis(at);
        info.taxis_imbalance = info.taxis_imbalance.max(imbalance(&taxis));
        let bases = base.fields();
        let rhs = |s: usize| -> Result<Vec<f64>, StepError> {
            let y: Vec<f64> = bases[s].iter().zip(&rates[s]).map(|(x, r)| x + tau * r).collect();
            let mut b = self.ops.mass.matvec_with(&y, exec).map_err(|e| StepError::Solver {
                species: SPECIES[s],
                t: t_new,
                source: e,
            })?;
            if s == 2 {
                for (bi, ri) in b.iter_mut().zip(&taxis) {
                    *bi += tau * ri;
                }
            }
            Ok(b)
        };
        let solve = |s: usize| -> Result<(Vec<f64>, SolverReport), StepError> {
            let b = rhs(s)?;
            if b.iter().any(|x| !x.is_finite()) {
                return Err(StepError::NonFinite { species: SPECIES[s], t: t_new });
            }
            let (x, rep) = solve_cg_from(&systems[s], &b, Some(bases[s]), &self.solver).map_err(|e| StepError::Solver {
                species: SPECIES[s],
                t: t_new,
                source: e,
            })?;
            if !rep.converged {
                return Err(StepError::NotConverged {
                    species: SPECIES[s],
                    t: t_new,
                    report: rep,
                });
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(StepError::NonFinite { species: SPECIES[s], t: t_new });
            }
            Ok((x, rep))
        };
        let (ru, rv, rw) = exec.join3(|| solve(0), || solve(1), || solve(2));
        let (u, iu) = ru?;
        let (v, iv) = rv?;
        let (w, iw) = rw?;
        for (acc, rep) in info.iterations.iter_mut().zip([iu, iv, iw]) {
            *acc += rep.iterations;
        }
        Ok(FieldState::new(t_new, u, v, w))
    }

    pub fn step_imex_rk2(&self, state: &FieldState) -> Result<(FieldState, StepInfo), StepError> {
        let mut info = StepInfo::default();
        let half_sys = match &self.half {
            Some(h) => h,
            None => {
                let h = self.params.diffusivities().map(|d| {
                    self.ops.mass.linear_combination(1.0, &self.ops.stiffness, 0.5 * self.dt * d)
                });
                return self.rk2_with(&h, state, &mut info).map(|s| (s, info));
            }
        };
        self.rk2_with(half_sys, state, &mut info).map(|s| (s, info))
    }

    fn rk2_with(&self, half: &[SparseMatrix; 3], state: &FieldState, info: &mut StepInfo) -> Result<FieldState, StepError> {
        let mid = self.stage(half, state, state, 0.5 * self.dt, state.t + 0.5 * self.dt, info)?;
        self.stage(&self.full, state, &mid, self.dt, state.t + self.dt, info)
    }

    /// Picard-lagged backward Euler: rates at the old level, diffusion implicit.
    pub fn step_implicit_euler(&self, state: &FieldState) -> Result<(FieldState, StepInfo), StepError> {
        let mut info = StepInfo::default();
        let next = self.stage(&self.full, state, state, self.dt, state.t + self.dt, &mut info)?;
        Ok((next, info))
    }

    pub fn step(&self, state: &FieldState) -> Result<(FieldState, StepInfo), StepError> {
        match self.scheme {
            Scheme::ImexRk2 => self.step_imex_rk2(state),
            Scheme::ImplicitEuler => self.step_implicit_euler(state),
        }
    }

    pub fn diagnostics(&self, state: &FieldState, envelope: f64, k0: f64, taxis_imbalance: f64) -> DiagnosticsRecord {
        let w = total_biomass(state, &self.ops.mass, &self.params);
        DiagnosticsRecord {
            t: state.t,
            total_biomass: w,
            min: state.minima(),
            linf: state.linf(),
            bound_k0: k0,
            envelope,
            bound_ok: w <= envelope + ENVELOPE_SLACK,
            taxis_imbalance,
        }
    }

    /// `K0` for this mesh and carrying capacity.
    pub fn k0(&self) -> f64 {
        let k_max = self.k_field.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        k0_bound(&self.params, k_max, self.ops.domain_area())
    }

    /// Integrates `initial` over `grid`, recording snapshots at the grid's
    /// snapshot steps and diagnostics every `stride` steps (and at the end).
    pub fn integrate(&self, initial: FieldState, grid: &TimeGrid, stride: usize) -> Result<RunOutput, StepError> {
        if (grid.dt - self.dt).abs() > 1e-15 * self.dt {
            return Err(StepError::BadTimeGrid(format!("grid dt {} differs from stepper dt {}", grid.dt, self.dt)));
        }
        if initial.len() != self.mesh.n_nodes() {
            return Err(StepError::FieldLength {
                expected: self.mesh.n_nodes(),
                got: initial.len(),
            });
        }
        let stride = stride.max(1);
        let n = grid.n_steps();
        let snap_steps = grid.snapshot_steps();
        let k0 = self.k0();
        let envelope = biomass_envelope(total_biomass(&initial, &self.ops.mass, &self.params), k0, &self.params);

        let mut out = RunOutput {
            snapshots: Vec::new(),
            diagnostics: vec![self.diagnostics(&initial, envelope, k0, imbalance(&self.taxis(&initial)))],
            iterations: [0; 3],
            max_taxis_imbalance: 0.0,
        };
        let mut next_snap = 0;
        let mut state = initial;
        let take_snaps = |step: usize, st: &FieldState, out: &mut RunOutput, next: &mut usize| {
            while *next < snap_steps.len() && snap_steps[*next] == step {
                out.snapshots.push(st.clone());
                *next += 1;
            }
        };
        take_snaps(0, &state, &mut out, &mut next_snap);
        for m in 1..=n {
            let (mut next, info) = self.step(&state)?;
            // avoid drift of t from repeated addition
            next.t = m as f64 * grid.dt;
            for (a, b) in out.iterations.iter_mut().zip(info.iterations) {
                *a += b;
            }
            out.max_taxis_imbalance = out.max_taxis_imbalance.max(info.taxis_imbalance);
            state = next;
            if m % stride == 0 || m == n {
                out.diagnostics.push(self.diagnostics(&state, envelope, k0, info.taxis_imbalance));
            }
            take_snaps(m, &state, &mut out, &mut next_snap);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub snapshots: Vec<FieldState>,
    pub diagnostics: Vec<DiagnosticsRecord>,
    pub iterations: [usize; 3],
    pub max_taxis_imbalance: f64,
}

impl RunOutput {
    pub fn bound_ok(&self) -> bool {
        self.diagnostics.iter().all(|d| d.bound_ok)
    }

    pub fn nonnegative(&self) -> bool {
        self.diagnostics.iter().all(DiagnosticsRecord::nonnegative)
    }

    /// Smallest nodal value of each species over all recorded rows.
    pub fn global_minima(&self) -> [f64; 3] {
        let mut m = [f64::INFINITY; 3];
        for d in &self.diagnostics {
            for s in 0..3 {
                m[s] = m[s].min(d.min[s]);
            }
        }
        m
    }
}

/// Explicit midpoint RK2 for the homogeneous system; returns `(t, x)` every
/// `stride` steps, always including both ends.
pub fn ode_midpoint(p: &Params, k: f64, x0: [f64; 3], dt: f64, t_final: f64, stride: usize) -> Vec<(f64, [f64; 3])> {
    let f = |x: [f64; 3]| reaction_unchecked(p, k, x[0], x[1], x[2]);
    let n = (t_final / dt).round() as usize;
    let stride = stride.max(1);
    let mut x = x0;
    let mut out = vec![(0.0, x)];
    for m in 1..=n {
        let r = f(x);
        let h = [0, 1, 2].map(|i| x[i] + 0.5 * dt * r[i]);
        let rh = f(h);
        x = [0, 1, 2].map(|i| x[i] + dt * rh[i]);
        if m % stride == 0 || m == n {
            out.push((m as f64 * dt, x));
        }
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
    #[error("cannot evaluate {key}: {source}")]
    Field { key: &'static str, source: crate::expr::EvalError },
    #[error("carrying capacity {value} at ({x}, {y}) must be positive")]
    NonPositiveK { x: f64, y: f64, value: f64 },
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Mesh, operators and sampled initial data for one configuration.
pub fn prepare(config: &SimConfig, exec: ExecPolicy) -> Result<(Stepper, FieldState), RunError> {
    let mesh = build_rect_mesh(config.nx, config.ny, config.rect)?;
    let sample = |key: &'static str, f: &crate::config::FieldExpr| {
        f.expr.sample(&mesh.nodes).map_err(|source| RunError::Field { key, source })
    };
    let k = sample("K", &config.k)?;
    if let Some(i) = k.iter().position(|&v| !(v > 0.0)) {
        return Err(RunError::NonPositiveK {
            x: mesh.nodes[i][0],
            y: mesh.nodes[i][1],
            value: k[i],
        });
    }
    let initial = FieldState::new(0.0, sample("u0", &config.u0)?, sample("v0", &config.v0)?, sample("w0", &config.w0)?);
    let solver = SolverOptions {
        exec,
        ..config.solver_options()
    };
    let stepper = Stepper::new(mesh, config.params, k, config.dt, config.scheme, solver)?;
    Ok((stepper, initial))
}

/// Integrates a configuration from 0 to `T`.
pub fn run(config: &SimConfig, exec: ExecPolicy) -> Result<(Stepper, RunOutput), RunError> {
    let (stepper, initial) = prepare(config, exec)?;
    let out = stepper.integrate(initial, &config.time_grid(), config.stride)?;
    Ok((stepper, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    fn stepper(nx: usize, p: Params, k: f64, dt: f64, scheme: Scheme) -> Stepper {
        let mesh = build_rect_mesh(nx, nx, Rect::UNIT_SQUARE).unwrap();
        let n = mesh.n_nodes();
        let solver = SolverOptions {
            tol: 1e-12,
            ..Default::default()
        };
        Stepper::new(mesh, p, vec![k; n], dt, scheme, solver).unwrap()
    }

    fn taxis_params() -> Params {
        Params {
            e1: 1.0,
            e2: 10.0,
            ..Params::reference()
        }
    }

    #[test]
    fn time_grid_validation() {
        assert!(TimeGrid::new(0.0, 1.0, &[]).is_err());
        assert!(TimeGrid::new(0.3, 1.0, &[]).is_err());
        assert!(TimeGrid::new(0.1, 1.0, &[1.5]).is_err());
        let g = TimeGrid::new(1e-3, 20.0, &[20.0, 0.0, 0.1, 0.5, 0.1]).unwrap();
        assert_eq!(g.n_steps(), 20000);
        assert_eq!(g.snapshot_steps(), vec![0, 100, 500, 20000]);
        assert_eq!(TimeGrid::new(1e-3, 0.0, &[0.0]).unwrap().n_steps(), 0);
    }

    #[test]
    fn zero_state_stays_zero() {
        for scheme in [Scheme::ImexRk2, Scheme::ImplicitEuler] {
            let s = stepper(4, taxis_params(), 1.0, 1e-2, scheme);
            let z = FieldState::zeros(s.mesh().n_nodes());
            let (next, _) = s.step(&z).unwrap();
            assert!(next.fields().iter().all(|f| f.iter().all(|&x| x == 0.0)));
        }
    }

    #[test]
    fn uniform_state_follows_ode_midpoint() {
        let p = taxis_params();
        let dt = 1e-3;
        let s = stepper(4, p, 1.0, dt, Scheme::ImexRk2);
        let n = s.mesh().n_nodes();
        let x0 = [0.7, 0.4, 1.5];
        let grid = TimeGrid::new(dt, 1.0, &[1.0]).unwrap();
        let out = s.integrate(FieldState::uniform(n, x0[0], x0[1], x0[2]), &grid, 100).unwrap();
        let ode = ode_midpoint(&p, 1.0, x0, dt, 1.0, 1000);
        let xe = ode.last().unwrap().1;
        let last = out.snapshots.last().unwrap();
        for (f, want) in last.fields().iter().zip(xe) {
            for &x in f.iter() {
                assert!((x - want).abs() <= 1e-8 * want.abs(), "{x} vs {want}");
            }
        }
    }

    #[test]
    fn pure_decay() {
        let p = Params::reference();
        let dt = 1e-3;
        let exact = 1.5 * (-p.nu).exp();
        for (scheme, tol) in [(Scheme::ImexRk2, 1e-6), (Scheme::ImplicitEuler, 2e-3)] {
            let s = stepper(3, p, 1.0, dt, scheme);
            let n = s.mesh().n_nodes();
            let grid = TimeGrid::new(dt, 1.0, &[1.0]).unwrap();
            let out = s.integrate(FieldState::uniform(n, 0.0, 0.0, 1.5), &grid, 1000).unwrap();
            let w = &out.snapshots[0].w;
            for &x in w {
                assert!(((x - exact) / exact).abs() < tol, "{scheme:?}: {x} vs {exact}");
            }
            if scheme == Scheme::ImplicitEuler {
                // rates lagged at the old level: w_{m+1} = (1 - nu dt) w_m
                let lagged = 1.5 * (1.0 - p.nu * dt).powi(1000);
                assert!(((w[0] - lagged) / lagged).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn logistic_matches_lagged_recurrence() {
        let p = Params::reference();
        let dt = 1e-2;
        let k = 1.3;
        let s = stepper(2, p, k, dt, Scheme::ImplicitEuler);
        let n = s.mesh().n_nodes();
        let mut st = FieldState::uniform(n, 0.2, 0.0, 0.0);
        let mut u = 0.2f64;
        for _ in 0..200 {
            st = s.step(&st).unwrap().0;
            u += dt * p.alpha * u * (1.0 - u / k);
        }
        for &x in &st.u {
            assert!((x - u).abs() <= 1e-12 * u, "{x} vs {u}");
        }
    }

    #[test]
    fn convergence_orders_on_uniform_problem() {
        let p = taxis_params();
        let x0 = [0.5, 0.5, 1.5];
        let t_final = 1.0;
        let run = |scheme: Scheme, dt: f64| {
            let s = stepper(2, p, 1.0, dt, scheme);
            let n = s.mesh().n_nodes();
            let grid = TimeGrid::new(dt, t_final, &[t_final]).unwrap();
            let out = s.integrate(FieldState::uniform(n, x0[0], x0[1], x0[2]), &grid, 1_000_000).unwrap();
            out.snapshots.into_iter().last().unwrap()
        };
        for (scheme, nominal) in [(Scheme::ImplicitEuler, 2.0), (Scheme::ImexRk2, 4.0)] {
            let dt = 0.02;
            let reference = run(scheme, dt / 16.0);
            let err = |st: &FieldState| {
                st.fields()
                    .iter()
                    .zip(reference.fields())
                    .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
                    .fold(0.0f64, f64::max)
            };
            let e1 = err(&run(scheme, dt));
            let e2 = err(&run(scheme, dt / 2.0));
            let ratio = e1 / e2;
            assert!((ratio - nominal).abs() <= 0.2 * nominal, "{scheme:?}: ratio {ratio}");
        }
    }

    #[test]
    fn biomass_and_k0() {
        let mesh = build_rect_mesh(5, 5, Rect::UNIT_SQUARE).unwrap();
        let ops = AssembledOperators::new(&mesh, ExecPolicy::Sequential);
        let p = Params {
            gamma: 0.5,
            beta: 2.0,
            ..Params::reference()
        };
        let n = mesh.n_nodes();
        let st = FieldState::uniform(n, 1.0, p.gamma, p.gamma * p.beta);
        assert!((total_biomass(&st, &ops.mass, &p) - 12.0).abs() < 1e-12);
        assert_eq!(total_biomass(&FieldState::zeros(n), &ops.mass, &p), 0.0);
        let k0 = k0_bound(&Params::reference(), 2.0, 4.0);
        assert!((k0 - 10.201).abs() < 1e-12, "{k0}");
    }

    #[test]
    fn taxis_does_not_change_total_w() {
        // same step with and without taxis: the integral of w must agree
        let mesh = build_rect_mesh(8, 8, Rect::UNIT_SQUARE).unwrap();
        let n = mesh.n_nodes();
        let v: Vec<f64> = mesh.nodes.iter().map(|q| 1.0 + 0.5 * (2.0 * q[0]).sin() * q[1]).collect();
        let w: Vec<f64> = mesh.nodes.iter().map(|q| 1.5 + 0.3 * q[0]).collect();
        let st = FieldState::new(0.0, vec![0.3; n], v, w);
        let solver = SolverOptions {
            tol: 1e-13,
            ..Default::default()
        };
        let with = Stepper::new(mesh.clone(), taxis_params(), vec![1.0; n], 1e-2, Scheme::ImexRk2, solver).unwrap();
        let without = Stepper::new(mesh, Params::reference(), vec![1.0; n], 1e-2, Scheme::ImexRk2, solver).unwrap();
        let r = with.taxis(&st);
        assert!(r.iter().map(|x| x.abs()).sum::<f64>() > 1e-3);
        let (a, info) = with.step(&st).unwrap();
        let (b, _) = without.step(&st).unwrap();
        assert!(info.taxis_imbalance < 1e-12);
        let m = &with.operators().mass;
        let (ia, ib) = (integral(&a.w, m), integral(&b.w, m));
        // stage-1 taxis differs between the runs, so the reaction at the midpoint differs slightly
        assert!((ia - ib).abs() < 1e-4 * ia, "{ia} vs {ib}");
        let (a, _) = with.step_implicit_euler(&st).unwrap();
        let (b, _) = without.step_implicit_euler(&st).unwrap();
        assert!((integral(&a.w, m) - integral(&b.w, m)).abs() < 1e-10 * ia);
    }

    #[test]
    fn policies_step_identically() {
        let mesh = build_rect_mesh(70, 70, Rect::UNIT_SQUARE).unwrap();
        let n = mesh.n_nodes();
        let v: Vec<f64> = mesh.nodes.iter().map(|q| 1.0 + 0.5 * (2.0 * q[0]).sin() * q[1]).collect();
        let st = FieldState::new(0.0, vec![0.3; n], v, vec![1.5; n]);
        let mk = |exec| {
            let solver = SolverOptions {
                exec,
                ..Default::default()
            };
            Stepper::new(mesh.clone(), taxis_params(), vec![1.0; n], 1e-3, Scheme::ImexRk2, solver).unwrap()
        };
        let a = mk(ExecPolicy::Sequential).step(&st).unwrap();
        let b = mk(ExecPolicy::Parallel).step(&st).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn diagnostics_flag_envelope() {
        let s = stepper(3, Params::reference(), 2.0, 1e-3, Scheme::ImexRk2);
        let n = s.mesh().n_nodes();
        let st = FieldState::uniform(n, 1.0, 1.0, 1.0);
        let k0 = s.k0();
        assert!((k0 - 10.201).abs() < 1e-10);
        let d = s.diagnostics(&st, 5.0, k0, 0.0);
        assert!(!d.bound_ok);
        assert!(s.diagnostics(&st, 12.0, k0, 0.0).bound_ok);
        assert_eq!(DiagnosticsRecord::CSV_HEADER.split(',').count(), d.csv_row().split(',').count());
    }

    #[test]
    fn ode_midpoint_decay() {
        let p = Params::reference();
        let traj = ode_midpoint(&p, 1.0, [0.0, 0.0, 2.0], 1e-3, 1.0, 100);
        assert_eq!(traj.len(), 11);
        let (t, x) = traj.last().unwrap();
        assert!((t - 1.0).abs() < 1e-12);
        assert!((x[2] - 2.0 * (-p.nu).exp()).abs() < 1e-9);
    }
}

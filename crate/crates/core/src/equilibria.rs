//! Steady states of the spatially homogeneous system
//!
//! ```text
//! u' = alpha u (1 - u/K) - b u v / (u + a)
//! v' = gamma b u v / (u + a) - c v w / (v + d) - mu v
//! w' = beta c v w / (v + d) - nu w
//! ```
//!
//! with their Jacobian spectra, the existence/stability scan over constant
//! carrying capacities `K`, and the stability of Neumann Laplacian modes
//! around the resource-only state `(K, 0, 0)`.
//!
//! Points are labelled `P1..P5`: extinction, resource only, predator-free
//! `(a mu/(b gamma - mu), v*, 0)`, and the two roots of the interior
//! quadratic sharing `v* = d nu / (c beta - nu)`.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::{reaction_unchecked, Params};
use crate::exec::ExecPolicy;

/// Half-width of the dead zone around zero for the largest real part.
pub const MARGINAL_BAND: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriaError {
    #[error("carrying capacity must be finite and positive (got {0})")]
    BadCapacity(f64),
    #[error("K grid must be positive and strictly ascending")]
    BadGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    P1,
    P2,
    P3,
    P4,
    P5,
}

impl Label {
    pub const ALL: [Label; 5] = [Label::P1, Label::P2, Label::P3, Label::P4, Label::P5];

    pub fn is_interior(self) -> bool {
        matches!(self, Label::P4 | Label::P5)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", *self as u8 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn from_max_re(max_re: f64) -> Stability {
        if max_re < -MARGINAL_BAND {
            Stability::Stable
        } else if max_re > MARGINAL_BAND {
            Stability::Unstable
        } else {
            Stability::Marginal
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPoint {
    pub label: Label,
    /// `(u*, v*, w*)`; NaN when the formula is undefined.
    pub coords: [f64; 3],
    pub exists: bool,
    pub eigenvalues: [Complex64; 3],
    pub max_re: f64,
    pub classification: Stability,
}

impl EquilibriumPoint {
    fn new(p: &Params, k: f64, label: Label, coords: [f64; 3]) -> EquilibriumPoint {
        let finite = coords.iter().all(|c| c.is_finite());
        let exists = finite && coords.iter().all(|&c| c >= 0.0);
        let eigenvalues = if finite {
            eigen3(&jacobian(p, k, coords))
        } else {
            [Complex64::new(f64::NAN, 0.0); 3]
        };
        let max_re = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        EquilibriumPoint {
            label,
            coords,
            exists,
            eigenvalues,
            max_re,
            classification: Stability::from_max_re(max_re),
        }
    }

    /// Existence plus the sign of the largest real part; thresholds are
    /// located where this changes.
    fn scan_key(&self) -> (bool, Option<bool>) {
        (self.exists, self.exists.then_some(self.max_re > 0.0))
    }

    /// Existence plus, for existing points, the stability class.
    pub fn state(&self) -> PointState {
        PointState {
            exists: self.exists,
            stability: self.exists.then_some(self.classification),
        }
    }
}

/// Vector field of the homogeneous system at constant `k`.
pub fn ode_rhs(p: &Params, k: f64, x: [f64; 3]) -> [f64; 3] {
    reaction_unchecked(p, k, x[0], x[1], x[2])
}

/// `||rhs||_inf / (1 + ||x||_inf)`.
pub fn nullcline_residual(p: &Params, k: f64, x: [f64; 3]) -> f64 {
    let r = ode_rhs(p, k, x);
    let rn = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    rn / (1.0 + xn)
}

/// Analytic Jacobian of [`ode_rhs`].
pub fn jacobian(p: &Params, k: f64, x: [f64; 3]) -> [[f64; 3]; 3] {
    let [u, v, w] = x;
    let ua = u + p.a;
    let vd = v + p.d;
    [
        [
            p.alpha * (1.0 - 2.0 * u / k) - p.b * v * p.a / (ua * ua),
            -p.b * u / ua,
            0.0,
        ],
        [
            p.gamma * p.b * v * p.a / (ua * ua),
            p.gamma * p.b * u / ua - p.c * w * p.d / (vd * vd) - p.mu,
            -p.c * v / vd,
        ],
        [0.0, p.beta * p.c * w * p.d / (vd * vd), p.beta * p.c * v / vd - p.nu],
    ]
}

/// All five candidate equilibria at constant carrying capacity `k`.
pub fn compute_equilibria(p: &Params, k: f64) -> Result<Vec<EquilibriumPoint>, EquilibriaError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(EquilibriaError::BadCapacity(k));
    }
    Ok(Label::ALL.iter().map(|&l| equilibrium(p, k, l)).collect())
}

/// Coordinates of one labelled equilibrium.
pub fn equilibrium_coords(p: &Params, k: f64, label: Label) -> [f64; 3] {
    match label {
        Label::P1 => [0.0, 0.0, 0.0],
        Label::P2 => [k, 0.0, 0.0],
        Label::P3 => {
            let growth = p.b * p.gamma - p.mu;
            if growth == 0.0 {
                return [f64::NAN; 3];
            }
            let u = p.a * p.mu / growth;
            let v = p.a * p.alpha * p.gamma * (p.b * p.gamma * k - p.mu * (p.a + k)) / (k * growth * growth);
            [u, v, 0.0]
        }
        Label::P4 | Label::P5 => {
            let net = p.c * p.beta - p.nu;
            if net == 0.0 {
                return [f64::NAN; 3];
            }
            let v = p.d * p.nu / net;
            let apk = p.a + k;
            let disc = apk * apk - 4.0 * p.b * p.d * k * p.nu / (net * p.alpha);
            if disc < 0.0 {
                return [f64::NAN; 3];
            }
            let sign = if label == Label::P4 { -1.0 } else { 1.0 };
            let u = 0.5 * (k - p.a + sign * disc.sqrt());
            // v-nullcline: gamma b u/(u+a) - c w/(v+d) - mu = 0
            let w = (p.d + v) * (p.b * p.gamma * u - (p.a + u) * p.mu) / (p.c * (p.a + u));
            [u, v, w]
        }
    }
}

pub fn equilibrium(p: &Params, k: f64, label: Label) -> EquilibriumPoint {
    EquilibriumPoint::new(p, k, label, equilibrium_coords(p, k, label))
}

fn quadratic_roots(b: f64, c: f64) -> [Complex64; 2] {
    // roots of x^2 + b x + c
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + if b >= 0.0 { s } else { -s });
        if q == 0.0 {
            return [Complex64::new(0.0, 0.0); 2];
        }
        [Complex64::new(q, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn eigen2(m: [[f64; 2]; 2]) -> [Complex64; 2] {
    if m[0][1] == 0.0 || m[1][0] == 0.0 {
        return [Complex64::new(m[0][0], 0.0), Complex64::new(m[1][1], 0.0)];
    }
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    quadratic_roots(-tr, det)
}

fn cubic_eval(c2: f64, c1: f64, c0: f64, z: Complex64) -> (Complex64, Complex64) {
    let p = ((z + c2) * z + c1) * z + c0;
    let dp = (3.0 * z + 2.0 * c2) * z + c1;
    (p, dp)
}

/// Newton steps on the cubic, kept only while they reduce `|p|`.
fn polish(c2: f64, c1: f64, c0: f64, mut z: Complex64) -> Complex64 {
    let (mut pz, mut dpz) = cubic_eval(c2, c1, c0, z);
    for _ in 0..4 {
        if pz.norm() == 0.0 || dpz.norm() == 0.0 {
            break;
        }
        let cand = z - pz / dpz;
        let (pc, dpc) = cubic_eval(c2, c1, c0, cand);
        if pc.norm() >= pz.norm() {
            break;
        }
        z = cand;
        pz = pc;
        dpz = dpc;
    }
    z
}

/// Eigenvalues of a real 3x3 matrix.
///
/// A row or column that is zero off the diagonal is deflated exactly first;
/// otherwise one real root of the characteristic cubic is found by Cardano's
/// formula, polished by Newton, and the remaining quadratic is solved in the
/// cancellation-free form. Returned in descending order of real part.
pub fn eigen3(m: &[[f64; 3]; 3]) -> [Complex64; 3] {
    let mut out = eigen3_unsorted(m);
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    out
}

fn eigen3_unsorted(m: &[[f64; 3]; 3]) -> [Complex64; 3] {
    for k in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&j| j != k).collect();
        let row_free = others.iter().all(|&j| m[k][j] == 0.0);
        let col_free = others.iter().all(|&j| m[j][k] == 0.0);
        if row_free || col_free {
            let (i, j) = (others[0], others[1]);
            let [a, b] = eigen2([[m[i][i], m[i][j]], [m[j][i], m[j][j]]]);
            return [Complex64::new(m[k][k], 0.0), a, b];
        }
    }

    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = (m[0][0] * m[1][1] - m[0][1] * m[1][0])
        + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
        + (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let (c2, c1, c0) = (-tr, minors, -det);

    // depressed cubic t^3 + pp t + qq with lambda = t - c2/3
    let shift = c2 / 3.0;
    let pp = c1 - c2 * c2 / 3.0;
    let qq = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let delta = (qq / 2.0).powi(2) + (pp / 3.0).powi(3);
    let t = if delta > 0.0 {
        let s = delta.sqrt();
        let a = -qq / 2.0 + if qq <= 0.0 { s } else { -s };
        let ca = a.cbrt();
        if ca == 0.0 {
            0.0
        } else {
            ca - pp / (3.0 * ca)
        }
    } else if pp == 0.0 {
        0.0
    } else {
        // three real roots; take the one of largest magnitude for stable deflation
        let r = 2.0 * (-pp / 3.0).sqrt();
        let arg = (3.0 * qq / (pp * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let cands = [0, 1, 2].map(|k| r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos());
        cands.into_iter().max_by(|a, b| (a - shift).abs().total_cmp(&(b - shift).abs())).unwrap()
    };
    let root = polish(c2, c1, c0, Complex64::new(t - shift, 0.0)).re;

    // deflate: (lambda - root)(lambda^2 + bq lambda + cq)
    let bq = c2 + root;
    let cq = if root.abs() > 1.0 && root != 0.0 { -c0 / root } else { c1 + root * bq };
    let [z1, z2] = quadratic_roots(bq, cq);
    [
        Complex64::new(root, 0.0),
        polish(c2, c1, c0, z1),
        polish(c2, c1, c0, z2),
    ]
}

/// Existence and stability of a point, as compared across a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PointState {
    pub exists: bool,
    pub stability: Option<Stability>,
}

impl fmt::Display for PointState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stability {
            _ if !self.exists => f.write_str("absent"),
            Some(s) => write!(f, "{s}"),
            None => f.write_str("present"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub label: Label,
    pub k: f64,
    pub before: PointState,
    pub after: PointState,
}

impl Threshold {
    pub fn is_existence_onset(&self) -> bool {
        !self.before.exists && self.after.exists
    }

    /// An existing point turns unstable (possibly through the marginal band).
    pub fn is_stability_loss(&self) -> bool {
        self.before.exists && self.before.stability != Some(Stability::Unstable) && self.after.stability == Some(Stability::Unstable)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {} at K = {:.8}", self.label, self.before, self.after, self.k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub k: f64,
    pub points: Vec<EquilibriumPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Report {
    pub rows: Vec<ScanRow>,
    pub thresholds: Vec<Threshold>,
}

impl Table1Report {
    pub fn find(&self, label: Label, pred: impl Fn(&Threshold) -> bool) -> Option<&Threshold> {
        self.thresholds.iter().find(|t| t.label == label && pred(t))
    }
}

/// Bisection tolerance in `K` for reported thresholds.
pub const THRESHOLD_TOL: f64 = 1e-9;

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

/// Classifies every point on `k_grid` and bisects each change of existence
/// or of the sign of the largest real part between neighbouring grid values.
/// The reported `before`/`after` states are those at the bracketing grid
/// values, so `after` may read `marginal` when a grid value lands in the
/// dead zone.
pub fn scan_table1(p: &Params, k_grid: &[f64], exec: ExecPolicy) -> Result<Table1Report, EquilibriaError> {
    if k_grid.iter().any(|&k| !(k > 0.0 && k.is_finite())) || k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EquilibriaError::BadGrid);
    }
    let rows: Vec<ScanRow> = exec.map_indexed(k_grid.len(), |i| ScanRow {
        k: k_grid[i],
        points: Label::ALL.iter().map(|&l| equilibrium(p, k_grid[i], l)).collect(),
    });

    let mut jobs = Vec::new();
    for w in rows.windows(2) {
        for (a, b) in w[0].points.iter().zip(&w[1].points) {
            if a.scan_key() != b.scan_key() {
                jobs.push((a.label, w[0].k, w[1].k, a.state(), b.state()));
            }
        }
    }
    let thresholds = exec.map_indexed(jobs.len(), |j| {
        let (label, mut lo, mut hi, before, after) = jobs[j];
        let key = equilibrium(p, lo, label).scan_key();
        while hi - lo > THRESHOLD_TOL {
            let mid = 0.5 * (lo + hi);
            if equilibrium(p, mid, label).scan_key() == key {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Threshold {
            label,
            k: 0.5 * (lo + hi),
            before,
            after,
        }
    });
    Ok(Table1Report { rows, thresholds })
}

/// Stability condition for the predator-free point as stated in closed
/// form (`b gamma K - a mu - K mu > 0` and `b gamma a > b K gamma - a mu - K mu`).
/// It only covers the `(u, v)` block; compare with the full spectrum.
pub fn closed_form_p3_stable(p: &Params, k: f64) -> bool {
    let s = p.b * k * p.gamma - p.a * p.mu - k * p.mu;
    s > 0.0 && p.b * p.gamma * p.a > s
}

/// Which diffusivity each species carries in the mode analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDiffusivities {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl ModeDiffusivities {
    /// `u <-> d0`, `v <-> d1`, `w <-> d2`.
    pub fn from_params(p: &Params) -> ModeDiffusivities {
        ModeDiffusivities {
            u: p.d0,
            v: p.d1,
            w: p.d2,
        }
    }
}

/// Linearisation at `(K, 0, 0)` restricted to the Neumann eigenmode with
/// Laplacian eigenvalue `-mode`; `taxis` is the sensitivity entering the
/// `(w, v)` slot (it does not move the spectrum).
pub fn pde_mode_matrix(p: &Params, k: f64, mode: f64, diff: ModeDiffusivities, taxis: f64) -> [[f64; 3]; 3] {
    let mut j = jacobian(p, k, [k, 0.0, 0.0]);
    j[0][0] -= mode * diff.u;
    j[1][1] -= mode * diff.v;
    j[2][2] -= mode * diff.w;
    j[2][1] += mode * taxis;
    j
}

/// Closed-form roots for mode `mode >= 0` at `(K, 0, 0)`:
/// `-mode d_u - alpha`, `-mode d_v + b K gamma/(a+K) - mu`, `-mode d_w - nu`.
pub fn pde_mode_stability(p: &Params, k: f64, mode: f64, diff: ModeDiffusivities) -> [f64; 3] {
    [
        -mode * diff.u - p.alpha,
        -mode * diff.v + p.b * k * p.gamma / (p.a + k) - p.mu,
        -mode * diff.w - p.nu,
    ]
}

//! Model constants and pointwise kinetics shared by the ODE and PDE paths.
//!
//! Reaction parts of the three equations:
//!
//! ```text
//! F = alpha u (1 - u/K) - b u v / (u + a)
//! G = gamma b u v / (u + a) - c v w / (v + d) - mu v
//! H = beta c v w / (v + d) - nu w
//! ```
//!
//! Model 1 moves `w` along `chi1(v, w) = e1 w - e2 v` times the gradient of
//! `v`; model 2 along `chi2(u, w) = q u w` times the gradient of `u`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("parameter `{name}` = {value} must be {bound}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        bound: &'static str,
    },
    #[error("non-finite state (u, v, w) = ({u}, {v}, {w}) with K = {k}")]
    NonFinite { u: f64, v: f64, w: f64, k: f64 },
    #[error("kinetics undefined: {0}")]
    Singular(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    /// Top predator follows the mesopredator gradient with `chi1`.
    ActiveSearch,
    /// Top predator follows the resource gradient with `chi2`.
    ResourceAttraction,
}

impl ModelId {
    pub fn from_number(n: i64) -> Option<ModelId> {
        match n {
            1 => Some(ModelId::ActiveSearch),
            2 => Some(ModelId::ResourceAttraction),
            _ => None,
        }
    }

    pub fn number(self) -> i64 {
        match self {
            ModelId::ActiveSearch => 1,
            ModelId::ResourceAttraction => 2,
        }
    }
}

/// Which species' field the top predator climbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attractant {
    Resource,
    Mesopredator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub gamma: f64,
    pub beta: f64,
    pub mu: f64,
    pub nu: f64,
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub e1: f64,
    pub e2: f64,
    pub q: f64,
    pub model: ModelId,
}

impl Params {
    /// Parameter set of the numerical experiments (with `c = 0.1`), no taxis.
    pub fn reference() -> Params {
        Params {
            alpha: 5.0,
            a: 2.0,
            b: 5.0,
            c: 0.1,
            d: 2.0,
            gamma: 1.0,
            beta: 1.0,
            mu: 0.05,
            nu: 0.05,
            d0: 0.1,
            d1: 1.0,
            d2: 1.0,
            e1: 0.0,
            e2: 0.0,
            q: 0.0,
            model: ModelId::ActiveSearch,
        }
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let positive = [
            ("alpha", self.alpha),
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("mu", self.mu),
            ("nu", self.nu),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(DynamicsError::OutOfRange {
                    name,
                    value,
                    bound: "finite and > 0",
                });
            }
        }
        let nonneg = [
            ("d0", self.d0),
            ("d1", self.d1),
            ("d2", self.d2),
            ("e1", self.e1),
            ("e2", self.e2),
            ("q", self.q),
        ];
        for (name, value) in nonneg {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(DynamicsError::OutOfRange {
                    name,
                    value,
                    bound: "finite and >= 0",
                });
            }
        }
        Ok(())
    }

    /// Human-readable notes for violated survivability preconditions
    /// (`gamma b > mu` for the mesopredator, `beta c > nu` for the top predator).
    pub fn survivability_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.gamma * self.b <= self.mu {
            out.push(format!(
                "gamma*b = {} <= mu = {}: mesopredator cannot persist",
                self.gamma * self.b,
                self.mu
            ));
        }
        if self.beta * self.c <= self.nu {
            out.push(format!(
                "beta*c = {} <= nu = {}: top predator cannot persist",
                self.beta * self.c,
                self.nu
            ));
        }
        out
    }

    pub fn attractant(&self) -> Attractant {
        match self.model {
            ModelId::ActiveSearch => Attractant::Mesopredator,
            ModelId::ResourceAttraction => Attractant::Resource,
        }
    }

    /// Diffusivities of `(u, v, w)`.
    pub fn diffusivities(&self) -> [f64; 3] {
        [self.d0, self.d1, self.d2]
    }

    /// `min(mu, nu)`.
    pub fn mu0(&self) -> f64 {
        self.mu.min(self.nu)
    }

    /// Sensitivity of the active model at one point.
    #[inline]
    pub fn sensitivity(&self, u: f64, v: f64, w: f64) -> f64 {
        match self.model {
            ModelId::ActiveSearch => chi1(self, v, w),
            ModelId::ResourceAttraction => chi2(self, u, w),
        }
    }
}

/// `e1 w - e2 v`; negative values repel.
#[inline]
pub fn chi1(p: &Params, v: f64, w: f64) -> f64 {
    p.e1 * w - p.e2 * v
}

/// `q u w`.
#[inline]
pub fn chi2(p: &Params, u: f64, w: f64) -> f64 {
    p.q * u * w
}

/// Reaction terms without input checks, for inner loops.
#[inline]
pub fn reaction_unchecked(p: &Params, k: f64, u: f64, v: f64, w: f64) -> [f64; 3] {
    let pred_u = p.b * u * v / (u + p.a);
    let pred_v = p.c * v * w / (v + p.d);
    [
        p.alpha * u * (1.0 - u / k) - pred_u,
        p.gamma * pred_u - pred_v - p.mu * v,
        p.beta * pred_v - p.nu * w,
    ]
}

/// Pointwise `(F, G, H)` at local carrying capacity `k`.
pub fn reaction(p: &Params, k: f64, u: f64, v: f64, w: f64) -> Result<[f64; 3], DynamicsError> {
    if !(u.is_finite() && v.is_finite() && w.is_finite() && k.is_finite()) {
        return Err(DynamicsError::NonFinite { u, v, w, k });
    }
    if k <= 0.0 {
        return Err(DynamicsError::Singular("carrying capacity must be positive"));
    }
    if u + p.a <= 0.0 {
        return Err(DynamicsError::Singular("u + a must be positive"));
    }
    if v + p.d <= 0.0 {
        return Err(DynamicsError::Singular("v + d must be positive"));
    }
    Ok(reaction_unchecked(p, k, u, v, w))
}

/// Nodal densities at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

/// Values below this are reported as a positivity violation.
pub const NEGATIVITY_THRESHOLD: f64 = -1e-8;

impl FieldState {
    pub fn new(t: f64, u: Vec<f64>, v: Vec<f64>, w: Vec<f64>) -> FieldState {
        assert!(u.len() == v.len() && v.len() == w.len(), "field lengths differ");
        FieldState { t, u, v, w }
    }

    pub fn uniform(n: usize, u: f64, v: f64, w: f64) -> FieldState {
        FieldState::new(0.0, vec![u; n], vec![v; n], vec![w; n])
    }

    pub fn zeros(n: usize) -> FieldState {
        FieldState::uniform(n, 0.0, 0.0, 0.0)
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn fields(&self) -> [&[f64]; 3] {
        [&self.u, &self.v, &self.w]
    }

    /// Per-species minima.
    pub fn minima(&self) -> [f64; 3] {
        self.fields().map(|f| f.iter().copied().fold(f64::INFINITY, f64::min))
    }

    /// Per-species maxima of absolute values.
    pub fn linf(&self) -> [f64; 3] {
        self.fields().map(|f| f.iter().fold(0.0f64, |m, x| m.max(x.abs())))
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.iter().all(|x| x.is_finite()))
    }

    pub fn has_negative(&self) -> bool {
        self.minima().iter().any(|&m| m < NEGATIVITY_THRESHOLD)
    }
}

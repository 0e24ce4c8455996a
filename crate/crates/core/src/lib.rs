//! Finite-element simulator and ODE analyzer for a three-species
//! intraguild-predation system (resource `u`, mesopredator `v`, top
//! predator `w`) in which the random dispersal of `w` is biased by a
//! chemotactic sensitivity function.
//!
//! The crate is organised bottom-up:
//!
//! - [`expr`]: closed-form scalar fields of `(x, y)` read from config text.
//! - [`mesh`]: structured P1 triangulation of an axis-aligned rectangle.
//! - [`sparse`]: CSR storage plus Jacobi-preconditioned CG and BiCGStab.
//! - [`dynamics`]: model constants, reaction kinetics, sensitivity functions.
//! - [`fem`]: mass/stiffness/chemotaxis assembly and a manufactured-solution study.
//! - [`equilibria`]: closed-form steady states, Jacobians, eigenvalues, threshold scans.
//! - [`stepper`]: IMEX midpoint and lagged implicit-Euler time stepping with diagnostics.
//! - [`config`], [`output`]: TOML configuration, presets, VTK/CSV snapshots.
//!
//! Data-parallel loops (element assembly, matvec, threshold scans, the three
//! per-species solves) go through [`exec::ExecPolicy`]. With the `parallel`
//! feature disabled every policy runs sequentially; results are bit-identical
//! either way because every reduction is merged in a fixed order.

pub mod config;
pub mod dynamics;
pub mod equilibria;
pub mod exec;
pub mod expr;
pub mod fem;
pub mod mesh;
pub mod output;
pub mod sparse;
pub mod stepper;

pub use dynamics::{FieldState, ModelId, Params};
pub use exec::ExecPolicy;
pub use mesh::TriMesh;
pub use sparse::{SolverReport, SparseMatrix};

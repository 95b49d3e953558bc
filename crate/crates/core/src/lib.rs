//! Numerical toolkit for the nonlocal one-phase Stefan problem
//!
//! ```text
//! u_t = ε⁻² (J_ε ∗ v − v),   v = (u − 1)_+
//! ```
//!
//! on the real line, with a compactly supported, radially symmetric, unit-mass
//! kernel `J`. The crate provides
//!
//! * kernels and their rescaling ([`kernel`]),
//! * uniform grids, sampled fields and the discrete convolution ([`grid`], [`conv`]),
//! * three interchangeable time integrators with runtime structural checks ([`solver`]),
//! * discrete supports, mushy regions and water components ([`geometry`]),
//! * the local Stefan problem and the ε → 0 study ([`local_limit`]),
//! * the Baiocchi variable, the nonlocal obstacle problem and the mesa projection ([`asymptotics`]),
//! * the spectral nonlocal heat semigroup and its decay estimate ([`nonlocal_heat`]),
//! * presets, configuration files, CSV and SVG output ([`io`]).
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below are what the command-line front end uses.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod conv;
pub mod datum;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod local_limit;
pub mod nonlocal_heat;
mod scalar;
pub mod solver;

pub use datum::{Datum, Piece, Shape};
pub use error::{Error, Result};
pub use grid::{Field, Grid};
pub use kernel::{Kernel, Profile};
pub use scalar::Scalar;

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type Kernel64 = Kernel<f64>;
pub type Trajectory64 = solver::Trajectory<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type SupportSet64 = geometry::SupportSet<f64>;
pub type ObstacleSolution64 = asymptotics::ObstacleSolution<f64>;

pub type Grid32 = Grid<f32>;
pub type Field32 = Field<f32>;
pub type Kernel32 = Kernel<f32>;
pub type Trajectory32 = solver::Trajectory<f32>;

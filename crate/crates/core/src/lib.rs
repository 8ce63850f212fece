//! Tuning-free stochastic first-order optimization.
//!
//! The crate bundles four layers:
//!
//! * [`problems`] and [`oracles`]: objective families (quadratics, absolute
//!   losses, the adversarial two-branch families, a smooth nonconvex bump) and
//!   stochastic first-order oracles layered on top of them.
//! * [`optimizers`] and [`estimation`]: fixed-step SGD, adaptive Polyak,
//!   DoG/DoWG and their log-damped T-variants, plus the variance-estimating
//!   T-DoG/T-DoWG.
//! * [`nonconvex`]: leader finding by subsampling and restarted SGD with a
//!   stepsize doubling ladder.
//! * [`harness`]: baseline tuning, rate fitting, lower-bound experiments and
//!   the INI/CSV/JSON experiment pipeline used by the `tunefree` binary.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimation;
pub mod harness;
pub mod hints;
pub mod linalg;
pub mod nonconvex;
pub mod optimizers;
pub mod oracles;
pub mod problems;
pub mod rng;

pub use error::{Error, Result};
pub use hints::{Hints, Interval};
pub use oracles::{NoiseKind, NoiseModel, Oracle, OracleSample};
pub use problems::{Ball, Domain, FamilyKind, LowerBoundFamily, Problem};
pub use rng::RngStream;

/// `log_+ x = ln x + 1`.
#[inline]
pub fn log_plus(x: f64) -> f64 {
    x.ln() + 1.0
}

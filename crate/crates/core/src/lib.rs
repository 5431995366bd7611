//! Support vector machine forecasters for noisy observations of ergodic
//! dynamical systems.
//!
//! The crate covers the whole experimental loop:
//!
//! - [`dynamics`]: concrete test maps with exact invariant-measure samplers,
//! - [`noise`]: bounded stationary observation-noise processes,
//! - [`losses`]: distance-based losses and their Lipschitz bookkeeping,
//! - [`rkhs`]: Gaussian kernels, the explicit orthonormal basis of the
//!   Gaussian RKHS and the concentration machinery built on it,
//! - [`svm`]: regularized empirical risk minimization over the RKHS,
//! - [`forecaster`]: one-step-ahead forecasters, risk evaluation, Bayes
//!   oracles and consistency sweeps,
//! - [`analysis`]: correlation estimation, decay fitting and the checkers
//!   for regularization schedules.

pub mod analysis;
pub mod dynamics;
mod error;
pub mod forecaster;
pub mod losses;
pub mod noise;
pub mod quadrature;
pub mod rkhs;
pub mod rng;
mod series;
pub mod svm;

pub use error::{Error, Result};
pub use series::Series;

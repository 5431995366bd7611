//! The Gaussian RBF kernel and its reproducing kernel Hilbert space.

mod concentration;
mod embedding;
mod kernel;
pub mod onb;

pub use concentration::{scan_tail_comparison, concentration_bound, tail_comparison_holds, ConcentrationReport, TailComparisonScan};
pub use embedding::{embedding_distance, mean_embedding_gap, EmbeddingGap, WeightedSample};
pub use kernel::{cholesky_with_jitter, cross_gram, gram, kernel, quadratic_form, KernelExpansion};

use crate::{Error, Result};

/// The cube `[−a, a]^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDomain {
    a: f64,
    d: usize,
}

impl BoxDomain {
    pub fn new(a: f64, d: usize) -> Result<Self> {
        if !(a >= 1.0 && a.is_finite()) {
            return Err(Error::Config(format!("box half-width {a} must be at least 1")));
        }
        if d == 0 {
            return Err(Error::Config("box dimension must be positive".into()));
        }
        Ok(BoxDomain { a, d })
    }

    pub fn half_width(&self) -> f64 {
        self.a
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.d && x.iter().all(|v| v.abs() <= self.a)
    }
}

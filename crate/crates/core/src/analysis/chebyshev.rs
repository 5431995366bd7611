//! Deviation probabilities of empirical means of stationary processes
//! against the second-moment bound `(2/(nδ²)) Σ_{i<n} cor_i(f, f)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::correlation::{Observable, StationaryProcess};
use crate::{rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevReport {
    pub n: usize,
    pub delta: f64,
    /// Fraction of replicates with `|n^{−1} Σ f(Z_i) − E f| ≥ δ`.
    pub empirical: f64,
    /// Binomial standard error of `empirical`.
    pub stderr: f64,
    /// Analytic bound, clipped at 1.
    pub bound: f64,
    pub holds: bool,
}

/// `min(1, (2/(nδ²)) Σ_{i<n} cor_i)`.
pub fn deviation_bound(n: usize, delta: f64, cor: &[f64]) -> Result<f64> {
    if cor.len() < n {
        return Err(Error::Config(format!("need {n} correlations, got {}", cor.len())));
    }
    if !(delta > 0.0) {
        return Err(Error::Config(format!("δ = {delta} must be positive")));
    }
    let s: f64 = cor[..n].iter().sum();
    Ok((2.0 * s / (n as f64 * delta * delta)).min(1.0))
}

/// Empirical deviation frequency over `replicates` independent stationary
/// paths of length `n`, against the bound built from the exact
/// correlations `cor[0..n]` of `f`.
pub fn chebyshev_check(
    process: &dyn StationaryProcess,
    f: &Observable,
    mean: f64,
    cor: &[f64],
    n: usize,
    delta: f64,
    replicates: usize,
    seed: u64,
) -> Result<ChebyshevReport> {
    if n == 0 || replicates == 0 {
        return Err(Error::Config("n and the replicate count must be positive".into()));
    }
    let bound = deviation_bound(n, delta, cor)?;
    let hits: Vec<bool> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut g = rng::stream(seed, r as u64);
            let path = process.sample_path(n, &mut g);
            let avg = path.rows().map(|z| f.eval(z)).sum::<f64>() / n as f64;
            (avg - mean).abs() >= delta
        })
        .collect();
    let k = hits.iter().filter(|&&h| h).count();
    let p = k as f64 / replicates as f64;
    let stderr = (p * (1.0 - p) / replicates as f64).sqrt();
    Ok(ChebyshevReport {
        n,
        delta,
        empirical: p,
        stderr,
        bound,
        holds: p <= bound + 3.0 * stderr,
    })
}

use rayon::prelude::*;
use serde::Serialize;

use super::Predictor;
use crate::dynamics::DynamicalSystem;
use crate::losses::LossSpec;
use crate::noise::NoiseProcess;
use crate::{rng, Error, Result};

/// Monte Carlo estimates of the risks of a predictor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskReport {
    /// Training pairs behind the predictor; 0 for injected predictors.
    pub n: usize,
    pub lambda: f64,
    pub sigma: f64,
    /// Monte Carlo sample size.
    pub m: usize,
    /// `E L(F(x) + ε_1 − f(x + ε_0))` with `L(r) = Σ_j ψ(r_j)`, raw loss.
    pub risk_l: f64,
    pub risk_l_stderr: f64,
    /// `E Σ_j (F(x)_j − f_j(x + ε_0))²`; least squares only.
    pub denoised_risk: Option<f64>,
    pub denoised_stderr: Option<f64>,
    /// Standard error of the per-draw difference `risk_L − denoised`, the
    /// scale on which `risk_L − denoised − E‖ε_1‖²` is judged.
    pub decomposition_stderr: Option<f64>,
    pub bayes_risk: Option<f64>,
    /// `E ‖ε_1‖² = d · E ε²`.
    pub noise_second_moment: f64,
    pub hnorm_max: f64,
    pub wall_seconds: f64,
    pub seed: u64,
}

impl RiskReport {
    /// `risk_L − denoised_risk − E‖ε‖²`, when the denoised risk exists.
    pub fn decomposition_gap(&self) -> Option<f64> {
        self.denoised_risk.map(|d| self.risk_l - d - self.noise_second_moment)
    }

    /// Whether the gap is within `k` decomposition standard errors of zero.
    pub fn decomposition_holds(&self, k: f64) -> Option<bool> {
        Some(self.decomposition_gap()?.abs() <= k * self.decomposition_stderr?)
    }
}

fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let m = v.len() as f64;
    let mean = v.iter().sum::<f64>() / m;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var.max(0.0) / m).sqrt())
}

/// Estimates the risks of `predictor` from `m` independent draws
/// `x ~ μ`, `(ε_0, ε_1)` from the stationary pair law.
///
/// Draws come from one stream seeded by `seed` in index order; predictions
/// run in parallel and are summed in draw order, so the result does not
/// depend on the thread count. `loss` is applied unscaled, in the original
/// output units.
pub fn monte_carlo_risk(
    predictor: &dyn Predictor,
    system: &DynamicalSystem,
    noise: &NoiseProcess,
    loss: &LossSpec,
    m: usize,
    seed: u64,
) -> Result<RiskReport> {
    let d = system.dim();
    if noise.dim() != d || predictor.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: if noise.dim() != d { noise.dim() } else { predictor.dim() },
        });
    }
    if m < 1000 {
        return Err(Error::Config(format!("Monte Carlo risk needs m ≥ 1000, got {m}")));
    }
    let mut g = rng::seeded(seed);
    // per draw: noisy input, true next state, observed next state
    let mut inputs = Vec::with_capacity(m * d);
    let mut truth = Vec::with_capacity(m * d);
    let mut observed = Vec::with_capacity(m * d);
    let mut e0 = vec![0.0; d];
    let mut e1 = vec![0.0; d];
    for _ in 0..m {
        let x = system.sample_invariant(&mut g);
        noise.sample_pair(&mut g, &mut e0, &mut e1);
        let fx = system.step(&x)?;
        for j in 0..d {
            inputs.push(x[j] + e0[j]);
            truth.push(fx[j]);
            observed.push(fx[j] + e1[j]);
        }
    }
    let ls = loss.is_least_squares();
    let per: Vec<(f64, f64)> = (0..m)
        .into_par_iter()
        .map(|k| {
            let mut out = vec![0.0; d];
            predictor.predict_into(&inputs[k * d..(k + 1) * d], &mut out);
            let mut l = 0.0;
            let mut den = 0.0;
            for j in 0..d {
                l += loss.psi_raw(observed[k * d + j] - out[j]);
                let r = truth[k * d + j] - out[j];
                den += r * r;
            }
            (l, den)
        })
        .collect();
    let losses: Vec<f64> = per.iter().map(|p| p.0).collect();
    let (risk_l, risk_l_stderr) = mean_stderr(&losses);
    let (denoised_risk, denoised_stderr, decomposition_stderr) = if ls {
        let den: Vec<f64> = per.iter().map(|p| p.1).collect();
        let diff: Vec<f64> = per.iter().map(|p| p.0 - p.1).collect();
        let (dm, ds) = mean_stderr(&den);
        (Some(dm), Some(ds), Some(mean_stderr(&diff).1))
    } else {
        (None, None, None)
    };
    Ok(RiskReport {
        n: 0,
        lambda: f64::NAN,
        sigma: f64::NAN,
        m,
        risk_l,
        risk_l_stderr,
        denoised_risk,
        denoised_stderr,
        decomposition_stderr,
        bayes_risk: None,
        noise_second_moment: d as f64 * noise.second_moment(),
        hnorm_max: f64::NAN,
        wall_seconds: 0.0,
        seed,
    })
}

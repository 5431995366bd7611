//! Estimators of `cor_i(ψ, φ) = E ψ(Z_0)φ(Z_i) − Eψ(Z_0) Eφ(Z_0)` for
//! stationary processes, and summaries of how fast they decay.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::dynamics::{DecayModel, DynamicalSystem};
use crate::noise::NoiseProcess;
use crate::{rng, Series};

/// A process with stationary initial draws.
pub trait StationaryProcess: Sync {
    fn dim(&self) -> usize;
    /// `Z_0, …, Z_{len−1}` with `Z_0` drawn from the stationary law.
    fn sample_path(&self, len: usize, rng: &mut rng::Rng) -> Series;
}

impl StationaryProcess for DynamicalSystem {
    fn dim(&self) -> usize {
        DynamicalSystem::dim(self)
    }

    fn sample_path(&self, len: usize, rng: &mut rng::Rng) -> Series {
        self.sample_orbit(len, rng)
    }
}

impl StationaryProcess for NoiseProcess {
    fn dim(&self) -> usize {
        NoiseProcess::dim(self)
    }

    fn sample_path(&self, len: usize, rng: &mut rng::Rng) -> Series {
        let p = NoiseProcess::sample_path(self, len.saturating_sub(1), rng);
        if len == 0 {
            Series::new(p.dim())
        } else {
            p
        }
    }
}

type ObsFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A named real test function on states.
#[derive(Clone)]
pub struct Observable {
    pub name: String,
    /// Lipschitz constant, when known.
    pub lipschitz: Option<f64>,
    /// Sup-norm on the state space, when known.
    pub sup: Option<f64>,
    f: ObsFn,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable")
            .field("name", &self.name)
            .field("lipschitz", &self.lipschitz)
            .field("sup", &self.sup)
            .finish()
    }
}

impl Observable {
    pub fn new(
        name: impl Into<String>,
        lipschitz: Option<f64>,
        sup: Option<f64>,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Observable {
            name: name.into(),
            lipschitz,
            sup,
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    /// `x ↦ x_j`.
    pub fn coordinate(j: usize) -> Self {
        Observable::new(format!("x{j}"), Some(1.0), None, move |x| x[j])
    }

    /// `x ↦ x_j²`.
    pub fn square(j: usize) -> Self {
        Observable::new(format!("x{j}^2"), None, None, move |x| x[j] * x[j])
    }

    pub fn constant(c: f64) -> Self {
        Observable::new(format!("const({c})"), Some(0.0), Some(c.abs()), move |_| c)
    }

    /// `c · self`, with norms scaled accordingly.
    pub fn scaled(&self, c: f64) -> Self {
        let f = self.f.clone();
        Observable {
            name: format!("{c}*{}", self.name),
            lipschitz: self.lipschitz.map(|l| l * c.abs()),
            sup: self.sup.map(|s| s * c.abs()),
            f: Arc::new(move |x| c * f(x)),
        }
    }

    pub fn with_sup(mut self, sup: f64) -> Self {
        self.sup = Some(sup);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Independent stationary runs.
    Ensemble,
    /// Birkhoff averages along one trajectory.
    Trajectory,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Ensemble => "ensemble",
            Estimator::Trajectory => "trajectory",
        })
    }
}

/// `ĉor_i` for `i = 0 … i_max`.
#[derive(Debug, Clone)]
pub struct CorrelationSequence {
    pub estimates: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub estimator: Estimator,
    pub psi: Observable,
    pub phi: Observable,
}

impl CorrelationSequence {
    /// A sequence given directly, e.g. an exact one.
    pub fn from_values(estimates: Vec<f64>, stderrs: Vec<f64>) -> Self {
        assert_eq!(estimates.len(), stderrs.len(), "one stderr per lag");
        CorrelationSequence {
            estimates,
            stderrs,
            estimator: Estimator::Ensemble,
            psi: Observable::constant(0.0),
            phi: Observable::constant(0.0),
        }
    }

    pub fn max_lag(&self) -> usize {
        self.estimates.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }
}

/// Default largest lag.
pub const DEFAULT_MAX_LAG: usize = 40;
/// Batches used for batch-means standard errors.
pub const BATCHES: usize = 50;

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let k = v.len() as f64;
    let m = v.iter().sum::<f64>() / k;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (k - 1.0);
    (m, var.max(0.0).sqrt())
}

/// Ensemble estimates at lags `0 … max_lag` from `replicates` independent
/// runs of length `max_lag + 1`.
///
/// Each lag is estimated as `mean(ψ(Z_0)φ(Z_i)) − mean(ψ(Z_0)) mean(φ(Z_i))`.
/// The standard error is the spread of the same estimator over
/// [`BATCHES`] disjoint batches of runs, divided by `√BATCHES`.
pub fn ensemble_correlation_sequence(
    process: &dyn StationaryProcess,
    psi: &Observable,
    phi: &Observable,
    max_lag: usize,
    replicates: usize,
    seed: u64,
) -> CorrelationSequence {
    assert!(replicates >= 2 * BATCHES, "need at least {} replicates", 2 * BATCHES);
    let len = max_lag + 1;
    // per run: ψ(Z_0) and φ(Z_i) for every lag
    let runs: Vec<(f64, Vec<f64>)> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut g = rng::stream(seed, r as u64);
            let path = process.sample_path(len, &mut g);
            let p0 = psi.eval(path.row(0));
            let ph: Vec<f64> = (0..len).map(|i| phi.eval(path.row(i))).collect();
            (p0, ph)
        })
        .collect();

    let estimate = |runs: &[(f64, Vec<f64>)], lag: usize| -> f64 {
        let k = runs.len() as f64;
        let (mut sp, mut sf, mut spf) = (0.0, 0.0, 0.0);
        for (p, ph) in runs {
            sp += p;
            sf += ph[lag];
            spf += p * ph[lag];
        }
        spf / k - (sp / k) * (sf / k)
    };
    let batch = replicates / BATCHES;
    let mut estimates = Vec::with_capacity(len);
    let mut stderrs = Vec::with_capacity(len);
    for lag in 0..len {
        estimates.push(estimate(&runs, lag));
        let per: Vec<f64> = (0..BATCHES)
            .map(|b| estimate(&runs[b * batch..(b + 1) * batch], lag))
            .collect();
        stderrs.push(mean_sd(&per).1 / (BATCHES as f64).sqrt());
    }
    CorrelationSequence {
        estimates,
        stderrs,
        estimator: Estimator::Ensemble,
        psi: psi.clone(),
        phi: phi.clone(),
    }
}

/// Ensemble estimate at a single lag, with its standard error.
pub fn ensemble_correlation(
    process: &dyn StationaryProcess,
    psi: &Observable,
    phi: &Observable,
    lag: usize,
    replicates: usize,
    seed: u64,
) -> (f64, f64) {
    let s = ensemble_correlation_sequence(process, psi, phi, lag, replicates, seed);
    (s.estimates[lag], s.stderrs[lag])
}

/// Birkhoff estimates along one trajectory:
/// `ĉor_i = (1/(n−i)) Σ_t ψ(z_t)φ(z_{t+i}) − mean(ψ) mean(φ)` with both
/// means over the whole trajectory.
///
/// Standard errors come from the same estimator on [`BATCHES`] contiguous
/// blocks; blocks much longer than the correlation time are close to
/// independent.
pub fn trajectory_correlation(traj: &Series, psi: &Observable, phi: &Observable, max_lag: usize) -> CorrelationSequence {
    let n = traj.len();
    let p: Vec<f64> = traj.rows().map(|z| psi.eval(z)).collect();
    let f: Vec<f64> = traj.rows().map(|z| phi.eval(z)).collect();
    let estimates = birkhoff(&p, &f, max_lag);
    let block = n / BATCHES;
    let stderrs = if block > max_lag + 1 {
        let per: Vec<Vec<f64>> = (0..BATCHES)
            .map(|b| birkhoff(&p[b * block..(b + 1) * block], &f[b * block..(b + 1) * block], max_lag))
            .collect();
        (0..=max_lag)
            .map(|i| {
                let col: Vec<f64> = per.iter().map(|v| v[i]).collect();
                mean_sd(&col).1 / (BATCHES as f64).sqrt()
            })
            .collect()
    } else {
        vec![f64::NAN; max_lag + 1]
    };
    CorrelationSequence {
        estimates,
        stderrs,
        estimator: Estimator::Trajectory,
        psi: psi.clone(),
        phi: phi.clone(),
    }
}

fn birkhoff(p: &[f64], f: &[f64], max_lag: usize) -> Vec<f64> {
    let n = p.len();
    let mp = p.iter().sum::<f64>() / n as f64;
    let mf = f.iter().sum::<f64>() / n as f64;
    (0..=max_lag)
        .map(|i| {
            if i >= n {
                return f64::NAN;
            }
            let s: f64 = (0..n - i).map(|t| p[t] * f[t + i]).sum();
            s / (n - i) as f64 - mp * mf
        })
        .collect()
}

/// `sup_{i ≤ i_max} |ĉor_i| / γ_i`; infinite when some `γ_i` vanishes or
/// no decay is claimed.
pub fn lambda_gamma_norm(seq: &CorrelationSequence, gamma: &DecayModel) -> f64 {
    let mut best = 0.0_f64;
    for (i, c) in seq.estimates.iter().enumerate() {
        match gamma.gamma(i) {
            Some(g) if g > 0.0 => best = best.max(c.abs() / g),
            _ => return f64::INFINITY,
        }
    }
    best
}

/// Result of fitting a decay envelope to an estimated sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayCertificate {
    /// `DecayModel::None` when no monotone envelope fits.
    pub model: DecayModel,
    pub kappa: f64,
    /// `‖ĉor‖_{Λ(γ)}` against the fitted model; infinite for `None`.
    pub lambda_gamma_norm: f64,
    /// Fewer than [`MIN_SIGNIFICANT_LAGS`] lags rise above 3 stderr.
    pub below_noise: bool,
    /// RMS residual of the chosen log-linear fit.
    pub residual_rms: f64,
}

pub const MIN_SIGNIFICANT_LAGS: usize = 5;
/// Largest RMS residual (in natural-log units) of an accepted fit.
pub const RESIDUAL_GATE: f64 = 0.35;

fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - icept - slope * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    (slope, icept, rms)
}

/// Fits `|ĉor_i| ≈ κ ρ^i` and `|ĉor_i| ≈ κ (1+i)^{−p}` by least squares
/// on the logarithm, keeping lags with `|ĉor_i| ≥ 2·stderr_i`, and returns
/// the better of the two if it decays and passes [`RESIDUAL_GATE`].
pub fn fit_decay(seq: &CorrelationSequence) -> DecayCertificate {
    let none = |below_noise: bool, residual_rms: f64| DecayCertificate {
        model: DecayModel::None,
        kappa: f64::NAN,
        lambda_gamma_norm: f64::INFINITY,
        below_noise,
        residual_rms,
    };
    let significant = seq
        .estimates
        .iter()
        .zip(&seq.stderrs)
        .filter(|(c, s)| c.abs() > 3.0 * **s && **c != 0.0)
        .count();
    if significant < MIN_SIGNIFICANT_LAGS {
        return none(true, f64::NAN);
    }
    let kept: Vec<(f64, f64)> = seq
        .estimates
        .iter()
        .zip(&seq.stderrs)
        .enumerate()
        .filter(|(_, (c, s))| c.abs() >= 2.0 * **s && **c != 0.0)
        .map(|(i, (c, _))| (i as f64, c.abs().ln()))
        .collect();
    let is: Vec<f64> = kept.iter().map(|k| k.0).collect();
    let logs: Vec<f64> = kept.iter().map(|k| (1.0 + k.0).ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|k| k.1).collect();
    let (se, ie, re) = line_fit(&is, &ys);
    let (sp, ip, rp) = line_fit(&logs, &ys);

    let exp_ok = se < 0.0;
    let poly_ok = sp < 0.0;
    let (model, residual) = match (exp_ok, poly_ok) {
        (true, true) if re <= rp => (DecayModel::Exponential { rate: se.exp(), kappa: ie.exp() }, re),
        (_, true) => (DecayModel::Polynomial { power: -sp, kappa: ip.exp() }, rp),
        (true, false) => (DecayModel::Exponential { rate: se.exp(), kappa: ie.exp() }, re),
        (false, false) => return none(false, re.min(rp)),
    };
    if residual > RESIDUAL_GATE {
        return none(false, residual);
    }
    let kappa = match model {
        DecayModel::Exponential { kappa, .. } | DecayModel::Polynomial { kappa, .. } => kappa,
        DecayModel::None => unreachable!(),
    };
    DecayCertificate {
        model,
        kappa,
        lambda_gamma_norm: lambda_gamma_norm(seq, &model),
        below_noise: false,
        residual_rms: residual,
    }
}

/// Per-lag comparison against the α-mixing correlation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingRow {
    pub lag: usize,
    pub estimate: f64,
    /// `2π ‖ψ‖_∞ ‖φ‖_∞ α_i + 3·stderr_i`.
    pub bound: f64,
    pub holds: bool,
}

/// Checks `|ĉor_i| ≤ 2π‖ψ‖_∞‖φ‖_∞ α_i + 3·stderr_i` for `i ≥ 1`.
pub fn mixing_bound_check(psi_sup: f64, phi_sup: f64, alpha: impl Fn(usize) -> f64, seq: &CorrelationSequence) -> Vec<MixingRow> {
    (1..seq.len())
        .map(|i| {
            let bound = 2.0 * std::f64::consts::PI * psi_sup * phi_sup * alpha(i) + 3.0 * seq.stderrs[i];
            MixingRow {
                lag: i,
                estimate: seq.estimates[i],
                bound,
                holds: seq.estimates[i].abs() <= bound,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_observable_has_zero_correlation() {
        let tent = DynamicalSystem::tent();
        let c = Observable::constant(2.0);
        let s = ensemble_correlation_sequence(&tent, &c, &Observable::coordinate(0), 3, 1000, 1);
        assert!(s.estimates.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn constant_trajectory_has_zero_correlation() {
        let traj = Series::from_scalars(&[0.3; 500]);
        let x = Observable::coordinate(0);
        let s = trajectory_correlation(&traj, &x, &x, 5);
        assert!(s.estimates.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn lambda_gamma_norm_examples() {
        let g = DecayModel::Exponential { rate: 0.6, kappa: 1.0 };
        let vals: Vec<f64> = (0..10).map(|i| g.gamma(i).unwrap()).collect();
        let seq = CorrelationSequence::from_values(vals, vec![0.0; 10]);
        assert!((lambda_gamma_norm(&seq, &g) - 1.0).abs() < 1e-15);
        let zero = CorrelationSequence::from_values(vec![0.0; 10], vec![0.0; 10]);
        assert_eq!(lambda_gamma_norm(&zero, &g), 0.0);
        assert_eq!(lambda_gamma_norm(&zero, &DecayModel::None), f64::INFINITY);
    }

    #[test]
    fn fit_recovers_synthetic_exponential() {
        let vals: Vec<f64> = (0..20).map(|i| 0.5 * 0.7f64.powi(i)).collect();
        let seq = CorrelationSequence::from_values(vals, vec![1e-6; 20]);
        let cert = fit_decay(&seq);
        match cert.model {
            DecayModel::Exponential { rate, kappa } => {
                assert!((0.65..=0.75).contains(&rate), "{rate}");
                assert!((0.4..=0.6).contains(&kappa), "{kappa}");
            }
            other => panic!("expected exponential, got {other}"),
        }
    }

    #[test]
    fn fit_rejects_oscillation_and_noise() {
        let a = crate::dynamics::golden_rotation();
        let vals: Vec<f64> = (0..40)
            .map(|i| 0.5 * (2.0 * std::f64::consts::PI * i as f64 * a).cos())
            .collect();
        let cert = fit_decay(&CorrelationSequence::from_values(vals, vec![1e-4; 40]));
        assert_eq!(cert.model, DecayModel::None);
        assert!(!cert.below_noise);
        let flat = CorrelationSequence::from_values(vec![1e-3; 40], vec![1e-2; 40]);
        assert!(fit_decay(&flat).below_noise);
    }
}

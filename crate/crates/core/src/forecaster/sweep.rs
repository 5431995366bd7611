use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{bayes_oracle_1d, ForecastModel, monte_carlo_risk, output_ranges, train_forecaster, RiskReport, TrainingPairs};
use crate::analysis::schedule::{gate, schedule_eval, RegionVerdict, ScheduleSpec};
use crate::dynamics::{DecayModel, DynamicalSystem};
use crate::losses::LossSpec;
use crate::noise::NoiseProcess;
use crate::{rng, Error, Result, Series};

/// A consistency experiment: for each `n`, fresh series, a trained
/// forecaster with `(λ_n, σ_n)` from the schedule, and its Monte Carlo risks.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub system: DynamicalSystem,
    pub noise: NoiseProcess,
    pub loss: LossSpec,
    pub schedule: ScheduleSpec,
    pub ns: Vec<usize>,
    pub replicates: usize,
    pub mc_m: usize,
    pub seed: u64,
    /// Run even when no schedule region is certified.
    pub force: bool,
    /// Record wall times; off keeps outputs byte-reproducible.
    pub timing: bool,
    /// Return the trained models alongside the reports.
    pub keep_models: bool,
}

impl SweepConfig {
    /// The correlation envelope assumed for the observation process: the
    /// slower of the system's and the noise's.
    pub fn gamma(&self) -> DecayModel {
        DecayModel::dominating(self.system.decay(), self.noise.mixing())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// One report per `(n, replicate)`, ordered by `n` then replicate.
    pub reports: Vec<(usize, RiskReport)>,
    /// Trained models in report order; empty unless `keep_models` is set.
    pub models: Vec<ForecastModel>,
    pub gate_passed: bool,
    pub verdicts: Vec<RegionVerdict>,
    pub gamma: DecayModel,
    pub bayes_risk: Option<f64>,
}

/// Median and spread over replicates at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub n: usize,
    pub lambda: f64,
    pub sigma: f64,
    pub median_risk: f64,
    pub min_risk: f64,
    pub max_risk: f64,
    pub median_denoised: Option<f64>,
    pub bayes_risk: Option<f64>,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

pub fn summarize(result: &SweepResult) -> Vec<SweepSummary> {
    let mut ns: Vec<usize> = result.reports.iter().map(|r| r.1.n).collect();
    ns.dedup();
    ns.iter()
        .map(|&n| {
            let rs: Vec<&RiskReport> = result.reports.iter().filter(|r| r.1.n == n).map(|r| &r.1).collect();
            let mut risks: Vec<f64> = rs.iter().map(|r| r.risk_l).collect();
            let mut den: Vec<f64> = rs.iter().filter_map(|r| r.denoised_risk).collect();
            let median_denoised = (!den.is_empty()).then(|| median(&mut den));
            SweepSummary {
                n,
                lambda: rs[0].lambda,
                sigma: rs[0].sigma,
                min_risk: risks.iter().copied().fold(f64::INFINITY, f64::min),
                max_risk: risks.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                median_risk: median(&mut risks),
                median_denoised,
                bayes_risk: result.bayes_risk,
            }
        })
        .collect()
}

/// Runs the experiment. Refuses with a schedule-gate error when no region
/// statement certifies `(schedule, loss, γ)`, unless `force` is set.
///
/// Tasks run in parallel; task `k` (the `k`-th `(n, replicate)` pair)
/// derives its seeds from `(seed, k)`.
pub fn consistency_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    if cfg.ns.is_empty() || cfg.replicates == 0 {
        return Err(Error::Config("a sweep needs at least one n and one replicate".into()));
    }
    let d = cfg.system.dim();
    if cfg.noise.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: cfg.noise.dim(),
        });
    }
    let gamma = cfg.gamma();
    let (gate_passed, verdicts) = gate(&cfg.schedule, d, &cfg.loss, &gamma);
    if !gate_passed && !cfg.force {
        let why: Vec<String> = verdicts
            .iter()
            .map(|v| match &v.note {
                Some(note) => format!("{}: {note}", v.variant),
                None => {
                    let failed: Vec<&str> = v.clauses.iter().filter(|c| !c.holds).map(|c| c.statement.as_str()).collect();
                    format!("{}: fails {}", v.variant, failed.join(", "))
                }
            })
            .collect();
        return Err(Error::ScheduleGate(format!(
            "schedule {} α={} β={} is not certified for loss {} with γ = {gamma} ({}); pass --force to run anyway",
            cfg.schedule.form,
            cfg.schedule.alpha,
            cfg.schedule.beta,
            cfg.loss,
            why.join("; ")
        )));
    }

    let bayes_risk = if cfg.loss.is_least_squares() && d == 1 {
        bayes_oracle_1d(&cfg.system, &cfg.noise, 2).ok().map(|o| o.risk)
    } else {
        None
    };
    let ranges = output_ranges(&cfg.system, cfg.noise.bound());
    let tasks = cfg.ns.len() * cfg.replicates;
    let runs: Vec<Result<(usize, RiskReport, Option<ForecastModel>)>> = (0..tasks)
        .into_par_iter()
        .map(|k| {
            let n = cfg.ns[k / cfg.replicates];
            let replicate = k % cfg.replicates;
            let task_seed = rng::derive_seed(cfg.seed, k as u64);
            let start = Instant::now();
            let (lambda, sigma) = schedule_eval(&cfg.schedule, n)?;
            let obs = super::generate_observations(
                &cfg.system,
                &cfg.noise,
                n,
                rng::derive_seed(task_seed, 0),
                rng::derive_seed(task_seed, 1),
            )?;
            let pairs = super::build_training_pairs(&obs.values)?;
            let model = train_forecaster(&pairs, &cfg.loss, lambda, sigma, &ranges)?;
            let mut report = monte_carlo_risk(
                &model,
                &cfg.system,
                &cfg.noise,
                &cfg.loss,
                cfg.mc_m,
                rng::derive_seed(task_seed, 2),
            )?;
            report.n = n;
            report.lambda = lambda;
            report.sigma = sigma;
            report.hnorm_max = model.hnorm_max();
            report.bayes_risk = bayes_risk;
            report.seed = task_seed;
            report.wall_seconds = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
            Ok((replicate, report, cfg.keep_models.then_some(model)))
        })
        .collect();
    let mut reports = Vec::with_capacity(tasks);
    let mut models = Vec::new();
    for run in runs {
        let (replicate, report, model) = run?;
        reports.push((replicate, report));
        models.extend(model);
    }
    Ok(SweepResult {
        reports,
        models,
        gate_passed,
        verdicts,
        gamma,
        bayes_risk,
    })
}

/// One point of the regularized approximation curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxPoint {
    pub lambda: f64,
    pub sigma: f64,
    /// Regularized objective on the proxy sample.
    pub value: f64,
    /// Monte Carlo standard error of the risk part of `value`.
    pub stderr: f64,
}

/// `inf_f λ‖f‖² + R_{L,P}(f)` approximated by training on `big_m`
/// independent draws from `P` for each `(λ, σ)`.
///
/// For least squares the value is reported in the original output units,
/// `Σ_j w_j² · objective_j` with `w_j` the half-width of coordinate `j`'s
/// output range, which makes it directly comparable to the Bayes risk. For
/// other losses it is `Σ_j objective_j` in the scaled units.
pub fn regularized_approx_curve(
    system: &DynamicalSystem,
    noise: &NoiseProcess,
    loss: &LossSpec,
    params: &[(f64, f64)],
    big_m: usize,
    seed: u64,
) -> Result<Vec<ApproxPoint>> {
    if big_m < 10_000 {
        return Err(Error::Config(format!("the proxy sample needs at least 10⁴ draws, got {big_m}")));
    }
    let d = system.dim();
    let mut g = rng::seeded(seed);
    let mut inputs = Series::with_capacity(d, big_m);
    let mut outputs = Series::with_capacity(d, big_m);
    let mut e0 = vec![0.0; d];
    let mut e1 = vec![0.0; d];
    let mut xin = vec![0.0; d];
    let mut yout = vec![0.0; d];
    for _ in 0..big_m {
        let x = system.sample_invariant(&mut g);
        noise.sample_pair(&mut g, &mut e0, &mut e1);
        let fx = system.step(&x)?;
        for j in 0..d {
            xin[j] = x[j] + e0[j];
            yout[j] = fx[j] + e1[j];
        }
        inputs.push(&xin);
        outputs.push(&yout);
    }
    let pairs = TrainingPairs { inputs, outputs };
    let ranges = output_ranges(system, noise.bound());
    params
        .iter()
        .map(|&(lambda, sigma)| {
            let model = train_forecaster(&pairs, loss, lambda, sigma, &ranges)?;
            let mut value = 0.0;
            let mut per = vec![0.0; big_m];
            for (j, (sol, sc)) in model.coordinates.iter().zip(&model.scaling).enumerate() {
                let w = if loss.is_least_squares() { sc.half_width * sc.half_width } else { 1.0 };
                value += w * sol.objective;
                let f = sol.expansion.eval_many(&pairs.inputs);
                for (k, fk) in f.iter().enumerate() {
                    per[k] += w * sol.loss.value(sc.forward(pairs.outputs.row(k)[j]) - fk);
                }
            }
            let m = big_m as f64;
            let mean = per.iter().sum::<f64>() / m;
            let var = per.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
            Ok(ApproxPoint {
                lambda,
                sigma,
                value,
                stderr: (var / m).sqrt(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ScheduleForm;

    fn config(system: DynamicalSystem, noise: NoiseProcess) -> SweepConfig {
        SweepConfig {
            system,
            noise,
            loss: LossSpec::least_squares(),
            schedule: ScheduleSpec::with_scales(ScheduleForm::Power, 0.1, 0.0, 1e-4, 4.0).unwrap(),
            ns: vec![64, 128],
            replicates: 2,
            mc_m: 2000,
            seed: 11,
            force: false,
            timing: false,
            keep_models: true,
        }
    }

    #[test]
    fn sweep_is_reproducible_and_ordered() {
        let cfg = config(DynamicalSystem::tent(), NoiseProcess::uniform(0.05, 1).unwrap());
        let a = consistency_sweep(&cfg).unwrap();
        let b = consistency_sweep(&cfg).unwrap();
        assert_eq!(a, b);
        let ns: Vec<(usize, usize)> = a.reports.iter().map(|(r, rep)| (rep.n, *r)).collect();
        assert_eq!(ns, vec![(64, 0), (64, 1), (128, 0), (128, 1)]);
        assert_eq!(a.models.len(), 4);
        assert!(a.gate_passed);
        assert!(a.bayes_risk.is_some());
        assert!(a.reports.iter().all(|(_, r)| r.wall_seconds == 0.0));
        let s = summarize(&a);
        assert_eq!(s.len(), 2);
        assert!(s[0].min_risk <= s[0].median_risk && s[0].median_risk <= s[0].max_risk);
    }

    #[test]
    fn rotation_needs_force() {
        let mut cfg = config(DynamicalSystem::rotation(0.3), NoiseProcess::uniform(0.05, 2).unwrap());
        cfg.ns = vec![32];
        cfg.replicates = 1;
        assert!(matches!(consistency_sweep(&cfg), Err(Error::ScheduleGate(_))));
        cfg.force = true;
        let r = consistency_sweep(&cfg).unwrap();
        assert!(!r.gate_passed);
        assert_eq!(r.reports.len(), 1);
        assert!(r.bayes_risk.is_none());
    }

    #[test]
    fn approximation_curve_is_close_to_the_bayes_risk() {
        let tent = DynamicalSystem::tent();
        let noise = NoiseProcess::uniform(0.05, 1).unwrap();
        let r_star = bayes_oracle_1d(&tent, &noise, 2).unwrap().risk;
        let pts = regularized_approx_curve(&tent, &noise, &LossSpec::least_squares(), &[(1e-4, 4.0)], 10_000, 5).unwrap();
        assert!((pts[0].value - r_star).abs() <= 0.1 * r_star, "{} vs {r_star}", pts[0].value);
    }

    #[test]
    fn approximation_curve_falls_with_lambda() {
        let tent = DynamicalSystem::tent();
        let noise = NoiseProcess::uniform(0.05, 1).unwrap();
        let params: Vec<(f64, f64)> = (1..=6).map(|k| (0.5f64.powi(k), 1.0)).collect();
        let pts = regularized_approx_curve(&tent, &noise, &LossSpec::least_squares(), &params, 10_000, 6).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].value <= w[0].value + 2.0 * w[0].stderr, "{w:?}");
        }
    }
}

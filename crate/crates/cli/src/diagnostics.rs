//! `diagnostics` suites: numeric checks of the inequalities the forecaster's
//! guarantees rest on, each written as a CSV with a provenance sidecar.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rand::Rng;
use serde_json::json;

use ergocast::analysis::{
    chebyshev_check, ensemble_correlation_sequence, joint_decomposition_check, FiniteChain, Observable,
    StationaryProcess,
};
use ergocast::dynamics::{DecayModel, DynamicalSystem};
use ergocast::losses::{Interval, LossSpec};
use ergocast::noise::NoiseProcess;
use ergocast::rkhs::{concentration_bound, onb};
use ergocast::svm::stability_check;
use ergocast::{rng, Series};

use crate::commands::Globals;
use crate::output::{self, fmt_f64};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Sup-norms of the one-dimensional basis functions against their bounds.
    Onb,
    /// Ensemble correlation estimates against the decay envelope.
    Correlations,
    /// Distance of solutions on a sample and a subsample against the
    /// mean-embedding gap.
    Stability,
    /// Probability lower bound for the empirical mean embedding.
    Concentration,
    /// Deviation frequencies of empirical means against the correlation bound.
    Chebyshev,
    /// Joint-correlation decomposition on finite-state chains.
    Joint,
}

#[derive(Debug, Args)]
pub struct DiagnosticsArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Kernel width (onb, concentration).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Half-width of the input box (onb, concentration).
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Largest basis index (onb).
    #[arg(long, default_value_t = 200)]
    pub max_n: usize,
    /// System whose orbit is correlated (correlations).
    #[arg(long)]
    pub system: Option<String>,
    /// Noise process (correlations, chebyshev).
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub max_lag: usize,
    /// Independent runs (correlations, chebyshev).
    #[arg(long, default_value_t = 20_000)]
    pub replicates: usize,
    /// Decay envelope; defaults to the process's own.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Trials or cases (stability, joint).
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Sample size (stability, chebyshev).
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Input dimension (concentration).
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Accuracy ε; defaults to the largest admissible value (concentration).
    #[arg(long)]
    pub epsilon: Option<f64>,
}

type Table = (Vec<&'static str>, Vec<Vec<String>>);

pub fn run(g: &Globals, a: DiagnosticsArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let (header, rows) = match a.suite {
        Suite::Onb => onb_suite(&a),
        Suite::Correlations => correlations(g, &a)?,
        Suite::Stability => stability(g, &a)?,
        Suite::Concentration => concentration(&a)?,
        Suite::Chebyshev => chebyshev(g, &a)?,
        Suite::Joint => joint(g, &a)?,
    };
    let out = a.out.as_deref();
    let mut w = csv::Writer::from_writer(output::sink(out)?);
    w.write_record(&header)?;
    for r in &rows {
        w.write_record(r)?;
    }
    w.flush()?;
    let config = json!({
        "suite": format!("{:?}", a.suite).to_lowercase(),
        "sigma": a.sigma, "a": a.a, "max_n": a.max_n, "system": a.system, "noise": a.noise,
        "max_lag": a.max_lag, "replicates": a.replicates, "gamma": a.gamma, "trials": a.trials,
        "n": a.n, "d": a.d, "epsilon": a.epsilon,
    });
    output::write_sidecar(out, &output::meta("diagnostics", config, g.seed, g.wall(start)))
}

const GRID: usize = 20_001;

fn onb_suite(a: &DiagnosticsArgs) -> Table {
    let mut rows = Vec::with_capacity(a.max_n + 1);
    let mut partial = 0.0;
    for n in 0..=a.max_n {
        let sup = onb::sup_norm(n, a.sigma, a.a);
        partial += sup * sup;
        let bound = onb::supnorm_bound(n).map(fmt_f64).unwrap_or_default();
        rows.push(vec![
            n.to_string(),
            fmt_f64(sup),
            fmt_f64(onb::grid_sup_norm(n, a.sigma, a.a, GRID)),
            bound,
            fmt_f64(partial),
            fmt_f64(6.0 * a.a * a.sigma),
        ]);
    }
    (vec!["n", "sup_norm", "grid_sup_norm", "bound", "partial_sum_sq", "partial_sum_limit"], rows)
}

fn correlations(g: &Globals, a: &DiagnosticsArgs) -> Result<Table, CliError> {
    let (process, own): (Box<dyn StationaryProcess>, DecayModel) = match (&a.system, &a.noise) {
        (Some(s), None) => {
            let sys: DynamicalSystem = s.parse()?;
            let decay = sys.decay();
            (Box::new(sys), decay)
        }
        (None, Some(s)) => {
            let noise = NoiseProcess::parse(s, 1)?;
            let decay = noise.mixing();
            (Box::new(noise), decay)
        }
        _ => return Err(CliError::Validation("give exactly one of --system and --noise".into())),
    };
    let gamma = match &a.gamma {
        Some(s) => s.parse()?,
        None => own,
    };
    if a.replicates < 20 {
        return Err(CliError::Validation("correlations need at least 20 replicates".into()));
    }
    let x = Observable::coordinate(0);
    let seq = ensemble_correlation_sequence(process.as_ref(), &x, &x, a.max_lag, a.replicates, g.seed);
    let rows = (0..=a.max_lag)
        .map(|i| {
            let gi = gamma.gamma(i);
            vec![
                i.to_string(),
                fmt_f64(seq.estimates[i]),
                fmt_f64(seq.stderrs[i]),
                gi.map(fmt_f64).unwrap_or_default(),
                gi.map(|v| fmt_f64(seq.estimates[i].abs() / v)).unwrap_or_default(),
            ]
        })
        .collect();
    Ok((vec!["lag", "estimate", "stderr", "gamma", "ratio"], rows))
}

fn stability(g: &Globals, a: &DiagnosticsArgs) -> Result<Table, CliError> {
    let big = a.n.max(200);
    let small = (big / 100).max(10);
    let losses = [LossSpec::least_squares(), LossSpec::huber(), LossSpec::logdist()];
    let unit = Interval::symmetric(1.0);
    let mut rows = Vec::with_capacity(a.trials);
    for trial in 0..a.trials {
        let mut r = rng::stream(g.seed, trial as u64);
        let mut x = Series::with_capacity(1, big);
        let freq = 1.0 + 3.0 * r.random::<f64>();
        let mut y = Vec::with_capacity(big);
        for _ in 0..big {
            let xi = 2.0 * r.random::<f64>() - 1.0;
            x.push(&[xi]);
            y.push(0.8 * (2.0 * PI * freq * xi).sin() + 0.2 * (2.0 * r.random::<f64>() - 1.0));
        }
        let idx: Vec<usize> = rand::seq::index::sample(&mut r, big, small).into_vec();
        let xs = x.select(&idx);
        let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        let loss = losses[trial % 3].rescale_to_unit(unit);
        let lambda = 10f64.powf(-1.0 - 2.0 * r.random::<f64>());
        let sigma = 1.0 + 2.0 * r.random::<f64>();
        let (rep, _, _) = stability_check(&x, &y, &xs, &ys, loss, lambda, sigma)?;
        rows.push(vec![
            trial.to_string(),
            loss.to_string(),
            fmt_f64(lambda),
            fmt_f64(sigma),
            fmt_f64(rep.lhs),
            fmt_f64(rep.rhs),
            rep.holds.to_string(),
        ]);
    }
    Ok((vec!["trial", "loss", "lambda", "sigma", "lhs", "rhs", "holds"], rows))
}

fn concentration(a: &DiagnosticsArgs) -> Result<Table, CliError> {
    let gamma: DecayModel = a.gamma.as_deref().unwrap_or("exp:0.5:1").parse()?;
    let s = 8.0 * std::f64::consts::E * a.a * a.a * a.sigma * a.sigma;
    let epsilon = a.epsilon.unwrap_or_else(|| (1.0 + s).powf(-2.0 * a.d as f64));
    let mut rows = Vec::new();
    for k in 3..=15 {
        let n = 10usize.pow(k);
        let rep = concentration_bound(n, epsilon, a.a, a.sigma, a.d, 1.0, 1.0, gamma)?;
        rows.push(vec![
            n.to_string(),
            fmt_f64(rep.epsilon),
            fmt_f64(rep.delta),
            rep.m.to_string(),
            fmt_f64(rep.constant),
            fmt_f64(rep.gamma_sum),
            fmt_f64(rep.probability),
        ]);
    }
    Ok((vec!["n", "epsilon", "delta", "m", "constant", "gamma_sum", "probability"], rows))
}

fn chebyshev(g: &Globals, a: &DiagnosticsArgs) -> Result<Table, CliError> {
    let noise = NoiseProcess::parse(a.noise.as_deref().unwrap_or("markov2:0.1:0.2"), 1)?;
    let cor: Vec<f64> = (0..a.n).map(|i| noise.autocovariance(i)).collect();
    let f = Observable::coordinate(0);
    let mut rows = Vec::new();
    for k in 1..=40u64 {
        let delta = 0.0025 * k as f64;
        let rep = chebyshev_check(&noise, &f, noise.mean(), &cor, a.n, delta, a.replicates, rng::derive_seed(g.seed, k))?;
        rows.push(vec![
            rep.n.to_string(),
            fmt_f64(rep.delta),
            fmt_f64(rep.empirical),
            fmt_f64(rep.stderr),
            fmt_f64(rep.bound),
            rep.holds.to_string(),
        ]);
    }
    Ok((vec!["n", "delta", "empirical", "stderr", "bound", "holds"], rows))
}

fn joint(g: &Globals, a: &DiagnosticsArgs) -> Result<Table, CliError> {
    let mut r = rng::seeded(g.seed);
    let mut rows = Vec::with_capacity(a.trials);
    for case in 0..a.trials {
        let x = FiniteChain::two_state(
            2.0 * r.random::<f64>() - 1.0,
            2.0 * r.random::<f64>() - 1.0,
            0.05 + 0.9 * r.random::<f64>(),
        )?;
        let y = match case % 3 {
            0 => FiniteChain::constant(r.random::<f64>()),
            1 => FiniteChain::iid(vec![-1.0, 0.5, 2.0], vec![0.2, 0.5, 0.3])?,
            _ => FiniteChain::two_state(-0.3, 0.7, 0.1 + 0.8 * r.random::<f64>())?,
        };
        let c: Vec<f64> = (0..4).map(|_| 2.0 * r.random::<f64>() - 1.0).collect();
        let psi = |u: f64, v: f64| c[0] + c[1] * u * v + v.sin();
        let phi = |u: f64, v: f64| c[2] * u.cos() + c[3] * v * v + u * v;
        let lag = r.random_range(0..=6);
        let j = joint_decomposition_check(&x, &y, psi, phi, lag);
        rows.push(vec![
            case.to_string(),
            lag.to_string(),
            fmt_f64(j.lhs),
            fmt_f64(j.x_term),
            fmt_f64(j.y_term),
            fmt_f64(j.rhs),
            fmt_f64(j.gap),
        ]);
    }
    Ok((vec!["case", "lag", "lhs", "x_term", "y_term", "rhs", "gap"], rows))
}

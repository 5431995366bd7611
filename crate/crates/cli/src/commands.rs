//! Command dispatch. Each command resolves its parameters (flag, then config
//! file, then default), runs, and writes its artifact plus provenance.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use ergocast::analysis::schedule::DEFAULT_SIGMA_EXPONENT;
use ergocast::analysis::{check_assumptions, gate, ScheduleForm, ScheduleSpec, Variant};
use ergocast::dynamics::{DecayModel, DynamicalSystem};
use ergocast::forecaster::{
    bayes_oracle_1d, build_training_pairs, consistency_sweep, generate_observations, monte_carlo_risk,
    output_ranges, read_model, summarize, train_forecaster, write_model, SweepConfig,
};
use ergocast::losses::LossSpec;
use ergocast::noise::NoiseProcess;
use ergocast::{rng, Series};

use crate::config::{pick, require, ExperimentConfig};
use crate::output::{self, fmt_f64, fmt_opt};
use crate::{
    CheckScheduleArgs, Cli, CliError, Command, EvaluateArgs, PlotDataArgs, ScheduleArgs, SimulateArgs, SweepArgs,
    SystemArgs, TrainArgs,
};

const DEFAULT_MC_M: usize = 100_000;
const DEFAULT_REPLICATES: usize = 5;
const DEFAULT_NS: [usize; 3] = [256, 1024, 4096];
const SWEEP_HEADER: [&str; 12] = [
    "n",
    "lambda",
    "sigma",
    "replicate",
    "risk_L",
    "risk_L_stderr",
    "denoised_risk",
    "denoised_stderr",
    "bayes_risk",
    "hnorm_max",
    "wall_seconds",
    "seed",
];

/// Options shared by every command after merging flags and the config file.
pub struct Globals {
    pub file: ExperimentConfig,
    pub seed: u64,
    pub force: bool,
    pub timing: bool,
}

impl Globals {
    pub fn wall(&self, start: Instant) -> f64 {
        if self.timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let g = Globals {
        seed: pick(cli.seed, file.seed, 0),
        force: cli.force || file.force.unwrap_or(false),
        timing: cli.timing || file.timing.unwrap_or(false),
        file,
    };
    match cli.command {
        Command::Simulate(a) => simulate(&g, a),
        Command::Train(a) => train(&g, a),
        Command::Evaluate(a) => evaluate(&g, a),
        Command::Sweep(a) => sweep(&g, a),
        Command::CheckSchedule(a) => check_schedule(&g, a),
        Command::Diagnostics(a) => crate::diagnostics::run(&g, a),
        Command::PlotData(a) => plot_data(&g, a),
    }
}

fn parse<T>(s: &str) -> Result<T, CliError>
where
    T: std::str::FromStr<Err = ergocast::Error>,
{
    s.parse::<T>().map_err(CliError::from)
}

fn system_and_noise(g: &Globals, a: &SystemArgs) -> Result<(String, String, DynamicalSystem, NoiseProcess), CliError> {
    let sys_s = require(a.system.clone(), g.file.system.clone(), "system")?;
    let noise_s = pick(a.noise.clone(), g.file.noise.clone(), "none".to_string());
    let system: DynamicalSystem = parse(&sys_s)?;
    let noise = NoiseProcess::parse(&noise_s, system.dim())?;
    Ok((sys_s, noise_s, system, noise))
}

fn write_series_csv(path: Option<&Path>, values: &Series) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(output::sink(path)?);
    let mut header = vec!["t".to_string()];
    header.extend((0..values.dim()).map(|j| format!("x_{j}")));
    w.write_record(&header)?;
    for (t, row) in values.rows().enumerate() {
        let mut rec = vec![t.to_string()];
        rec.extend(row.iter().map(|v| fmt_f64(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a series written by `simulate`: a `t` column followed by
/// `x_0 … x_{d−1}`.
fn read_series_csv(path: &Path) -> Result<Series, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let cols: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("x_"))
        .map(|(i, _)| i)
        .collect();
    if cols.is_empty() {
        return Err(CliError::Validation(format!("{}: no x_j columns", path.display())));
    }
    let mut s = Series::new(cols.len());
    let mut row = vec![0.0; cols.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        for (k, &c) in cols.iter().enumerate() {
            let field = rec.get(c).unwrap_or("");
            row[k] = field.parse().map_err(|_| {
                CliError::Validation(format!("{} row {}: bad value `{field}`", path.display(), line + 1))
            })?;
        }
        s.push(&row);
    }
    Ok(s)
}

fn simulate(g: &Globals, a: SimulateArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let (sys_s, noise_s, system, noise) = system_and_noise(g, &a.sys)?;
    let n = require(a.n, g.file.n, "n")?;
    let obs = generate_observations(&system, &noise, n, rng::derive_seed(g.seed, 0), rng::derive_seed(g.seed, 1))?;
    let out = a.out.as_deref();
    write_series_csv(out, &obs.values)?;
    let config = json!({"system": sys_s, "noise": noise_s, "n": n, "x0_seed": obs.x0_seed, "noise_seed": obs.noise_seed});
    output::write_sidecar(out, &output::meta("simulate", config, g.seed, g.wall(start)))
}

fn train(g: &Globals, a: TrainArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let (sys_s, noise_s, system, noise) = system_and_noise(g, &a.sys)?;
    let loss_s = pick(a.loss.clone(), g.file.loss.clone(), "ls".to_string());
    let loss: LossSpec = parse(&loss_s)?;
    let lambda = require(a.lambda, g.file.lambda, "lambda")?;
    let sigma = require(a.sigma, g.file.sigma, "sigma")?;
    let (values, source) = match &a.data {
        Some(p) => (read_series_csv(p)?, json!({"data": p.display().to_string()})),
        None => {
            let n = require(a.n, g.file.n, "n")?;
            let obs =
                generate_observations(&system, &noise, n, rng::derive_seed(g.seed, 0), rng::derive_seed(g.seed, 1))?;
            (obs.values, json!({"n": n}))
        }
    };
    if values.dim() != system.dim() {
        return Err(CliError::Validation(format!(
            "data has {} columns but {sys_s} is {}-dimensional",
            values.dim(),
            system.dim()
        )));
    }
    let pairs = build_training_pairs(&values)?;
    let model = train_forecaster(&pairs, &loss, lambda, sigma, &output_ranges(&system, noise.bound()))?;
    let mut w = output::sink(Some(&a.out))?;
    write_model(&model, &mut w)?;
    w.flush()?;
    let config = json!({
        "system": sys_s, "noise": noise_s, "loss": loss_s, "lambda": lambda, "sigma": sigma,
        "source": source, "pairs": pairs.len(), "hnorm_max": model.hnorm_max(),
    });
    output::write_sidecar(Some(&a.out), &output::meta("train", config, g.seed, g.wall(start)))
}

fn evaluate(g: &Globals, a: EvaluateArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let (sys_s, noise_s, system, noise) = system_and_noise(g, &a.sys)?;
    let file = File::open(&a.model)
        .map_err(|e| CliError::Validation(format!("cannot open {}: {e}", a.model.display())))?;
    let model = read_model(BufReader::new(file))?;
    let loss = match a.loss.clone().or(g.file.loss.clone()) {
        Some(s) => parse::<LossSpec>(&s)?,
        None => LossSpec::new(model.loss().kind()),
    };
    let mc_m = pick(a.mc_m, g.file.mc_m, DEFAULT_MC_M);
    let mut report = monte_carlo_risk(&model, &system, &noise, &loss, mc_m, rng::derive_seed(g.seed, 2))?;
    report.n = model.n;
    report.lambda = model.lambda;
    report.sigma = model.sigma;
    report.hnorm_max = model.hnorm_max();
    report.seed = g.seed;
    if loss.is_least_squares() && system.dim() == 1 {
        report.bayes_risk = bayes_oracle_1d(&system, &noise, 2).ok().map(|o| o.risk);
    }
    report.wall_seconds = g.wall(start);
    let config = json!({
        "system": sys_s, "noise": noise_s, "loss": loss.to_string(), "mc_m": mc_m,
        "model": a.model.display().to_string(),
    });
    let doc = json!({
        "meta": output::meta("evaluate", config, g.seed, report.wall_seconds),
        "report": report,
    });
    output::write_json(a.out.as_deref(), &doc)
}

/// Schedule from flags over the config file's `[schedule]` table.
fn schedule(g: &Globals, a: &ScheduleArgs) -> Result<ScheduleSpec, CliError> {
    let f = g.file.schedule();
    let form: ScheduleForm = parse(&pick(a.form.clone(), f.form, "power".to_string()))?;
    let alpha = require(a.alpha, f.alpha, "alpha")?;
    let beta = pick(a.beta, f.beta, 0.0);
    let ls = pick(a.lambda_scale, f.lambda_scale, 1.0);
    let ss = pick(a.sigma_scale, f.sigma_scale, 1.0);
    Ok(ScheduleSpec::with_scales(form, alpha, beta, ls, ss)?)
}

fn sweep(g: &Globals, a: SweepArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let (sys_s, noise_s, system, noise) = system_and_noise(g, &a.sys)?;
    let loss_s = pick(a.loss.clone(), g.file.loss.clone(), "ls".to_string());
    let cfg = SweepConfig {
        system,
        noise,
        loss: parse(&loss_s)?,
        schedule: schedule(g, &a.schedule)?,
        ns: pick(a.ns.clone(), g.file.ns.clone(), DEFAULT_NS.to_vec()),
        replicates: pick(a.replicates, g.file.replicates, DEFAULT_REPLICATES),
        mc_m: pick(a.mc_m, g.file.mc_m, DEFAULT_MC_M),
        seed: g.seed,
        force: g.force,
        timing: g.timing,
        keep_models: false,
    };
    let result = consistency_sweep(&cfg)?;

    let out = a.out.as_deref();
    let mut w = csv::Writer::from_writer(output::sink(out)?);
    w.write_record(SWEEP_HEADER)?;
    for (replicate, r) in &result.reports {
        w.write_record([
            r.n.to_string(),
            fmt_f64(r.lambda),
            fmt_f64(r.sigma),
            replicate.to_string(),
            fmt_f64(r.risk_l),
            fmt_f64(r.risk_l_stderr),
            fmt_opt(r.denoised_risk),
            fmt_opt(r.denoised_stderr),
            fmt_opt(r.bayes_risk),
            fmt_f64(r.hnorm_max),
            fmt_f64(r.wall_seconds),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;

    let config = json!({
        "system": sys_s, "noise": noise_s, "loss": loss_s, "schedule": cfg.schedule,
        "ns": cfg.ns, "replicates": cfg.replicates, "mc_m": cfg.mc_m, "force": cfg.force,
    });
    let mut meta = output::meta("sweep", config, g.seed, g.wall(start));
    meta["gamma"] = json!(result.gamma.to_string());
    meta["gate_passed"] = json!(result.gate_passed);
    meta["verdicts"] = json!(result.verdicts);
    meta["summaries"] = json!(summarize(&result));
    output::write_sidecar(out, &meta)
}

fn check_schedule(g: &Globals, a: CheckScheduleArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let spec = schedule(g, &a.schedule)?;
    let d = a.d.unwrap_or(1);
    let loss_s = pick(a.loss.clone(), g.file.loss.clone(), "ls".to_string());
    let loss: LossSpec = parse(&loss_s)?;
    let gamma_s = a.gamma.clone().unwrap_or_else(|| "exp:0.5:1".to_string());
    let gamma: DecayModel = parse(&gamma_s)?;
    let k = a.sigma_exponent.unwrap_or(DEFAULT_SIGMA_EXPONENT);
    let variants: Vec<Variant> = match &a.variant {
        Some(v) => vec![parse(v)?],
        None => Variant::for_loss(&loss).to_vec(),
    };
    let checks = variants
        .iter()
        .map(|&v| check_assumptions(&spec, v, d, &loss, &gamma, k))
        .collect::<Result<Vec<_>, _>>()?;
    let satisfied: Vec<String> = checks
        .iter()
        .filter(|c| c.region.satisfied)
        .map(|c| c.region.variant.to_string())
        .collect();
    let (gate_passed, _) = gate(&spec, d, &loss, &gamma);
    let config = json!({
        "schedule": spec, "d": d, "loss": loss_s, "gamma": gamma_s, "sigma_exponent": k,
        "variant": a.variant,
    });
    let doc = json!({
        "meta": output::meta("check-schedule", config, g.seed, g.wall(start)),
        "satisfied": satisfied,
        "gate_passed": gate_passed,
        "checks": checks,
    });
    output::write_json(a.out.as_deref(), &doc)
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

/// Per-`n` medians of the sweep columns, in long format.
pub fn plot_rows(path: &Path) -> Result<Vec<(usize, &'static str, f64)>, CliError> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Validation(format!("{}: missing column `{name}`", path.display())))
    };
    let (cn, cr, cd, cb) = (col("n")?, col("risk_L")?, col("denoised_risk")?, col("bayes_risk")?);
    let num = |s: &str, line: usize| -> Result<Option<f64>, CliError> {
        if s.is_empty() {
            return Ok(None);
        }
        s.parse()
            .map(Some)
            .map_err(|_| CliError::Validation(format!("{} row {line}: bad value `{s}`", path.display())))
    };
    // (n, risks, denoised, bayes) in order of first appearance
    let mut groups: Vec<(usize, Vec<f64>, Vec<f64>, Vec<f64>)> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let n: usize = rec[cn]
            .parse()
            .map_err(|_| CliError::Validation(format!("{} row {}: bad n `{}`", path.display(), line + 1, &rec[cn])))?;
        let idx = match groups.iter().position(|gr| gr.0 == n) {
            Some(i) => i,
            None => {
                groups.push((n, Vec::new(), Vec::new(), Vec::new()));
                groups.len() - 1
            }
        };
        let gr = &mut groups[idx];
        gr.1.extend(num(&rec[cr], line + 1)?);
        gr.2.extend(num(&rec[cd], line + 1)?);
        gr.3.extend(num(&rec[cb], line + 1)?);
    }
    let mut rows = Vec::new();
    for (n, mut risk, mut den, mut bayes) in groups {
        if risk.is_empty() {
            return Err(CliError::Validation(format!("{}: no risk_L values at n = {n}", path.display())));
        }
        let r = median(&mut risk);
        rows.push((n, "risk_L", r));
        if !den.is_empty() {
            rows.push((n, "denoised_risk", median(&mut den)));
        }
        if !bayes.is_empty() {
            let b = median(&mut bayes);
            rows.push((n, "bayes_risk", b));
            rows.push((n, "gap", r - b));
        }
    }
    Ok(rows)
}

fn plot_data(g: &Globals, a: PlotDataArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let rows = plot_rows(&a.sweep)?;
    let out = a.out.as_deref();
    let mut w = csv::Writer::from_writer(output::sink(out)?);
    w.write_record(["n", "series", "value"])?;
    for (n, series, value) in &rows {
        w.write_record([n.to_string(), series.to_string(), fmt_f64(*value)])?;
    }
    w.flush()?;
    let config = json!({"sweep": a.sweep.display().to_string(), "statistic": "median"});
    output::write_sidecar(out, &output::meta("plot-data", config, g.seed, g.wall(start)))
}

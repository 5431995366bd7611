//! One-step-ahead forecasting from noisy observations of a dynamical system.
//!
//! Observations are `x̃_i = F^i(x_0) + ε_i`. The forecaster is trained on
//! consecutive pairs `(x̃_i, x̃_{i+1})` with one regularized kernel machine
//! per output coordinate. Outputs are mapped affinely onto `[−1, 1]` before
//! training, using the analytic range of each coordinate, and mapped back
//! for prediction.

mod bayes;
mod io;
mod risk;
mod sweep;

pub use bayes::{bayes_oracle_1d, BayesOracle};
pub use io::{read_model, write_model};
pub use risk::{monte_carlo_risk, RiskReport};
pub use sweep::{consistency_sweep, regularized_approx_curve, summarize, ApproxPoint, SweepConfig, SweepResult, SweepSummary};

use crate::dynamics::{Domain, DynamicalSystem};
use crate::losses::{verify_assumption_l, Interval, LossSpec};
use crate::noise::NoiseProcess;
use crate::svm::{self, SvmProblem, SvmSolution};
use crate::{rng, Error, Result, Series};

/// Grid points per axis used when verifying the loss before training.
const LOSS_CHECK_RESOLUTION: usize = 24;

/// `x̃_0, …, x̃_n` with enough provenance to regenerate them.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSeries {
    pub values: Series,
    pub system: String,
    pub noise: String,
    pub x0_seed: u64,
    pub noise_seed: u64,
}

impl ObservationSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values.dim()
    }
}

/// Draws `x_0` from the invariant measure and a stationary noise path, and
/// returns `n + 1` observations.
pub fn generate_observations(
    system: &DynamicalSystem,
    noise: &NoiseProcess,
    n: usize,
    x0_seed: u64,
    noise_seed: u64,
) -> Result<ObservationSeries> {
    let d = system.dim();
    if noise.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: noise.dim(),
        });
    }
    let orbit = system.sample_orbit(n + 1, &mut rng::seeded(x0_seed));
    let eps = noise.sample_path(n, &mut rng::seeded(noise_seed));
    let data: Vec<f64> = orbit.as_flat().iter().zip(eps.as_flat()).map(|(x, e)| x + e).collect();
    Ok(ObservationSeries {
        values: Series::from_flat(d, data),
        system: system.name().to_string(),
        noise: noise.kind().to_string(),
        x0_seed,
        noise_seed,
    })
}

/// Inputs `x̃_0 … x̃_{n−1}` and outputs `x̃_1 … x̃_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPairs {
    pub inputs: Series,
    pub outputs: Series,
}

impl TrainingPairs {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

pub fn build_training_pairs(series: &Series) -> Result<TrainingPairs> {
    let n = series.len();
    if n < 2 {
        return Err(Error::Config("training pairs need at least two observations".into()));
    }
    Ok(TrainingPairs {
        inputs: series.slice(0, n - 1),
        outputs: series.slice(1, n),
    })
}

/// `y ↦ (y − center) / half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputScaling {
    pub center: f64,
    pub half_width: f64,
}

impl OutputScaling {
    pub fn onto_unit(range: Interval) -> Self {
        let half = 0.5 * range.width();
        OutputScaling {
            center: range.midpoint(),
            half_width: if half > 0.0 { half } else { 1.0 },
        }
    }

    pub fn identity() -> Self {
        OutputScaling {
            center: 0.0,
            half_width: 1.0,
        }
    }

    pub fn forward(&self, y: f64) -> f64 {
        (y - self.center) / self.half_width
    }

    pub fn inverse(&self, t: f64) -> f64 {
        self.center + self.half_width * t
    }
}

/// `π_j(M + [−B, B]^d)` for every coordinate `j`.
pub fn output_ranges(system: &DynamicalSystem, noise_bound: f64) -> Vec<Interval> {
    let (lo, hi) = match system.domain() {
        Domain::Box { lower, upper } => (lower, upper),
        Domain::UnitCircle => (vec![-1.0; 2], vec![1.0; 2]),
    };
    lo.iter()
        .zip(&hi)
        .map(|(l, h)| Interval::new(l - noise_bound, h + noise_bound))
        .collect()
}

/// Anything that maps a state to a predicted next state.
pub trait Predictor: Sync {
    fn dim(&self) -> usize;
    fn predict_into(&self, x: &[f64], out: &mut [f64]);

    fn predict(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.predict_into(x, &mut out);
        out
    }
}

/// Wraps a closure as a [`Predictor`].
pub struct FnPredictor<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64]) + Sync> FnPredictor<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnPredictor { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64]) + Sync> Predictor for FnPredictor<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn predict_into(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}

/// The true map `F` as a predictor.
pub fn oracle_predictor(system: &DynamicalSystem) -> FnPredictor<impl Fn(&[f64], &mut [f64]) + Sync + '_> {
    FnPredictor::new(system.dim(), move |x, out| {
        let y = system.step(x).expect("oracle evaluated inside the domain");
        out.copy_from_slice(&y);
    })
}

/// One solution per output coordinate, each trained on scaled outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastModel {
    pub coordinates: Vec<SvmSolution>,
    pub scaling: Vec<OutputScaling>,
    pub lambda: f64,
    pub sigma: f64,
    /// Number of training pairs.
    pub n: usize,
}

impl ForecastModel {
    pub fn input_dim(&self) -> usize {
        self.coordinates[0].expansion.dim()
    }

    /// `max_j ‖f_j‖_H`.
    pub fn hnorm_max(&self) -> f64 {
        self.coordinates.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// The loss every coordinate was trained with, rescaled.
    pub fn loss(&self) -> LossSpec {
        self.coordinates[0].loss
    }
}

impl Predictor for ForecastModel {
    fn dim(&self) -> usize {
        self.coordinates.len()
    }

    fn predict_into(&self, x: &[f64], out: &mut [f64]) {
        for (j, (c, s)) in self.coordinates.iter().zip(&self.scaling).enumerate() {
            out[j] = s.inverse(c.predict(x));
        }
    }
}

/// Trains one machine per output coordinate.
///
/// Coordinate `j` is fit to `(y_j − center_j) / half_width_j`, which maps
/// `ranges[j]` onto `[−1, 1]`; the loss is rescaled so that `L(y, 0) ≤ 1`
/// there and must pass the loss assumption check on that range.
pub fn train_forecaster(
    pairs: &TrainingPairs,
    loss: &LossSpec,
    lambda: f64,
    sigma: f64,
    ranges: &[Interval],
) -> Result<ForecastModel> {
    let d = pairs.outputs.dim();
    if ranges.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: ranges.len(),
        });
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Config(format!("λ = {lambda} not in (0, 1]")));
    }
    let unit = Interval::symmetric(1.0);
    let scaled_loss = loss.rescale_to_unit(unit);
    verify_assumption_l(&scaled_loss, unit, lambda.powf(-0.5), LOSS_CHECK_RESOLUTION)?;

    let mut coordinates = Vec::with_capacity(d);
    let mut scaling = Vec::with_capacity(d);
    for (j, range) in ranges.iter().enumerate() {
        let s = OutputScaling::onto_unit(*range);
        let y: Vec<f64> = pairs.outputs.rows().map(|r| s.forward(r[j])).collect();
        let wrap = |e: Error| Error::Coordinate {
            coordinate: j,
            source: Box::new(e),
        };
        let problem = SvmProblem::new(pairs.inputs.clone(), y, scaled_loss, lambda, sigma).map_err(wrap)?;
        coordinates.push(svm::solve(&problem).map_err(wrap)?);
        scaling.push(s);
    }
    Ok(ForecastModel {
        coordinates,
        scaling,
        lambda,
        sigma,
        n: pairs.len(),
    })
}

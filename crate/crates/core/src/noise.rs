//! Bounded stationary observation noise.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::dynamics::DecayModel;
use crate::{Error, Result, Series};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    /// i.i.d. uniform on [−B, B].
    Uniform { bound: f64 },
    /// i.i.d. two-point law: −B/3 with probability 3/4, +B with probability 1/4.
    Asymmetric { bound: f64 },
    /// Symmetric two-state chain on {−B, +B}, flipping with probability q.
    Markov2 { bound: f64, flip: f64 },
    /// Uniform on [−B/2, 3B/2]. Not centered; exists to exercise the
    /// centeredness check.
    ShiftedUniform { bound: f64 },
}

impl NoiseKind {
    pub fn bound(&self) -> f64 {
        match *self {
            NoiseKind::Uniform { bound }
            | NoiseKind::Asymmetric { bound }
            | NoiseKind::Markov2 { bound, .. }
            | NoiseKind::ShiftedUniform { bound } => bound,
        }
    }

    fn validate(&self) -> Result<()> {
        let b = self.bound();
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Config(format!("noise bound {b} must be finite and nonnegative")));
        }
        if let NoiseKind::Markov2 { flip, .. } = *self {
            if !(flip > 0.0 && flip < 1.0) {
                return Err(Error::Config(format!("markov2 flip probability {flip} not in (0,1)")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::Uniform { bound } => write!(f, "uniform:{bound}"),
            NoiseKind::Asymmetric { bound } => write!(f, "asym:{bound}"),
            NoiseKind::Markov2 { bound, flip } => write!(f, "markov2:{bound}:{flip}"),
            NoiseKind::ShiftedUniform { bound } => write!(f, "shifted:{bound}"),
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in noise `{s}`")))
        };
        let kind = match parts.as_slice() {
            ["none"] => NoiseKind::Uniform { bound: 0.0 },
            ["uniform", b] => NoiseKind::Uniform { bound: num(b)? },
            ["asym", b] => NoiseKind::Asymmetric { bound: num(b)? },
            ["markov2", b, q] => NoiseKind::Markov2 {
                bound: num(b)?,
                flip: num(q)?,
            },
            _ => {
                return Err(Error::Parse(format!(
                    "noise `{s}` not of the form uniform:B, asym:B or markov2:B:q"
                )))
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseProcess {
    kind: NoiseKind,
    dim: usize,
}

/// Per-coordinate sample means of the stationary law.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredReport {
    pub means: Vec<f64>,
    pub stderrs: Vec<f64>,
    /// True when centeredness is declared but some mean exceeds 3 stderr.
    pub flagged: bool,
}

impl NoiseProcess {
    pub fn new(kind: NoiseKind, dim: usize) -> Result<Self> {
        kind.validate()?;
        if dim == 0 {
            return Err(Error::Config("noise dimension must be positive".into()));
        }
        Ok(NoiseProcess { kind, dim })
    }

    pub fn uniform(bound: f64, dim: usize) -> Result<Self> {
        Self::new(NoiseKind::Uniform { bound }, dim)
    }

    pub fn asymmetric(bound: f64, dim: usize) -> Result<Self> {
        Self::new(NoiseKind::Asymmetric { bound }, dim)
    }

    pub fn markov2(bound: f64, flip: f64, dim: usize) -> Result<Self> {
        Self::new(NoiseKind::Markov2 { bound, flip }, dim)
    }

    pub fn none(dim: usize) -> Self {
        NoiseProcess {
            kind: NoiseKind::Uniform { bound: 0.0 },
            dim,
        }
    }

    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        Self::new(spec.parse()?, dim)
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> f64 {
        self.kind.bound()
    }

    pub fn is_iid(&self) -> bool {
        !matches!(self.kind, NoiseKind::Markov2 { .. })
    }

    /// Declared centeredness. The shifted control declares it falsely.
    pub fn centered(&self) -> bool {
        true
    }

    /// Declared decay of correlations of Lipschitz observables.
    ///
    /// i.i.d. kinds have zero correlation at every positive lag, so any
    /// envelope works; `exp:0.5:1` stands in for "any order".
    pub fn mixing(&self) -> DecayModel {
        match self.kind {
            NoiseKind::Markov2 { flip, .. } if (1.0 - 2.0 * flip).abs() > 0.0 => {
                DecayModel::Exponential {
                    rate: (1.0 - 2.0 * flip).abs(),
                    kappa: 0.25 * self.dim as f64,
                }
            }
            _ => DecayModel::Exponential { rate: 0.5, kappa: 1.0 },
        }
    }

    /// Declared α-mixing coefficient at lag `i ≥ 1`.
    pub fn alpha_mixing(&self, i: usize) -> f64 {
        if i == 0 {
            return 0.25 * self.dim as f64;
        }
        match self.kind {
            NoiseKind::Markov2 { flip, .. } => {
                0.25 * self.dim as f64 * (1.0 - 2.0 * flip).abs().powi(i as i32)
            }
            _ => 0.0,
        }
    }

    /// Stationary mean of each coordinate.
    pub fn mean(&self) -> f64 {
        match self.kind {
            NoiseKind::ShiftedUniform { bound } => 0.5 * bound,
            _ => 0.0,
        }
    }

    /// `E ε_j²` of each coordinate under the stationary law.
    pub fn second_moment(&self) -> f64 {
        let b = self.bound();
        match self.kind {
            NoiseKind::Uniform { .. } | NoiseKind::Asymmetric { .. } => b * b / 3.0,
            NoiseKind::Markov2 { .. } => b * b,
            // uniform on [−B/2, 3B/2]: variance B²/3 plus mean² B²/4
            NoiseKind::ShiftedUniform { .. } => b * b / 3.0 + b * b / 4.0,
        }
    }

    /// Exact per-coordinate autocovariance at lag `i`.
    pub fn autocovariance(&self, i: usize) -> f64 {
        let var = self.second_moment() - self.mean() * self.mean();
        match self.kind {
            NoiseKind::Markov2 { flip, .. } => var * (1.0 - 2.0 * flip).powi(i as i32),
            _ if i == 0 => var,
            _ => 0.0,
        }
    }

    fn draw_marginal<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let b = self.bound();
        match self.kind {
            NoiseKind::Uniform { .. } => b * (2.0 * rng.random::<f64>() - 1.0),
            NoiseKind::Asymmetric { .. } => {
                if rng.random::<f64>() < 0.75 {
                    -b / 3.0
                } else {
                    b
                }
            }
            NoiseKind::Markov2 { .. } => {
                if rng.random::<bool>() {
                    b
                } else {
                    -b
                }
            }
            NoiseKind::ShiftedUniform { .. } => b * (2.0 * rng.random::<f64>() - 0.5),
        }
    }

    fn draw_next<R: Rng + ?Sized>(&self, prev: f64, rng: &mut R) -> f64 {
        match self.kind {
            NoiseKind::Markov2 { flip, .. } => {
                if rng.random::<f64>() < flip {
                    -prev
                } else {
                    prev
                }
            }
            _ => self.draw_marginal(rng),
        }
    }

    /// Stationary path `ε_0, …, ε_n`.
    pub fn sample_path<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Series {
        let d = self.dim;
        let mut data = Vec::with_capacity(d * (n + 1));
        for _ in 0..d {
            data.push(self.draw_marginal(rng));
        }
        for t in 1..=n {
            for j in 0..d {
                let prev = data[(t - 1) * d + j];
                data.push(self.draw_next(prev, rng));
            }
        }
        Series::from_flat(d, data)
    }

    /// One draw of `(ε_0, ε_1)` from the stationary pair law.
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R, e0: &mut [f64], e1: &mut [f64]) {
        for j in 0..self.dim {
            e0[j] = self.draw_marginal(rng);
            e1[j] = self.draw_next(e0[j], rng);
        }
    }

    /// Sample means of `m` independent stationary draws.
    pub fn centered_check<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<CenteredReport> {
        if m < 100 {
            return Err(Error::Config(format!("centered check needs m ≥ 100, got {m}")));
        }
        let d = self.dim;
        let mut sum = vec![0.0; d];
        let mut sumsq = vec![0.0; d];
        for _ in 0..m {
            for j in 0..d {
                let v = self.draw_marginal(rng);
                sum[j] += v;
                sumsq[j] += v * v;
            }
        }
        let mf = m as f64;
        let means: Vec<f64> = sum.iter().map(|s| s / mf).collect();
        let stderrs: Vec<f64> = (0..d)
            .map(|j| {
                let var = (sumsq[j] - mf * means[j] * means[j]) / (mf - 1.0);
                (var.max(0.0) / mf).sqrt()
            })
            .collect();
        let flagged = self.centered()
            && means
                .iter()
                .zip(&stderrs)
                .any(|(mu, se)| mu.abs() > 3.0 * se);
        Ok(CenteredReport {
            means,
            stderrs,
            flagged,
        })
    }
}

/// `(ε_i, ε_{i+1})` as concatenated `2d`-vectors.
pub fn pair_process(path: &Series) -> Result<Series> {
    if path.len() < 2 {
        return Err(Error::Config("pair process needs a path of length at least 2".into()));
    }
    let d = path.dim();
    let mut out = Series::with_capacity(2 * d, path.len() - 1);
    let mut buf = vec![0.0; 2 * d];
    for i in 0..path.len() - 1 {
        buf[..d].copy_from_slice(path.row(i));
        buf[d..].copy_from_slice(path.row(i + 1));
        out.push(&buf);
    }
    Ok(out)
}

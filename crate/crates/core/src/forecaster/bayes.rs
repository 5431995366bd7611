//! Least-squares Bayes forecaster for one-dimensional maps observed through
//! i.i.d. uniform noise.
//!
//! Given `x̃ = x + ε_0` with `ε_0 ~ U[−B, B]`, the posterior of `x` is the
//! invariant density restricted to the window `|x̃ − x| ≤ B`, so
//! `f*(x̃) = E[F(x) | x̃]` is a window average. Both systems have an
//! invariant measure that is the image of `U[0, 1]` under a monotone map
//! `g`, and the averages are taken in that uniform coordinate.

use std::f64::consts::PI;

use crate::dynamics::{DynamicalSystem, SystemKind};
use crate::noise::{NoiseKind, NoiseProcess};
use crate::quadrature::{integrate, integrate_fixed};
use crate::{Error, Result};

/// Absolute tolerance of every adaptive integral.
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BayesOracle {
    kind: SystemKind,
    bound: f64,
    /// `(x̃, f*(x̃))` on an even grid over `[−B, 1 + B]`.
    pub grid: Vec<(f64, f64)>,
    /// `R̄* = E (F(x) − f*(x + ε_0))²`.
    pub denoised_risk: f64,
    /// Error estimate of `denoised_risk` from the outer quadrature.
    pub denoised_error: f64,
    /// `R* = R̄* + B²/3`.
    pub risk: f64,
}

/// Inverse of `g`, where `x = g(u)` pushes `U[0, 1]` to the invariant
/// measure: `g(u) = u` (tent) or `sin²(πu/2)` (logistic).
fn g_inv(kind: SystemKind, x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    match kind {
        SystemKind::Tent => x,
        _ => 2.0 / PI * x.sqrt().asin(),
    }
}

/// `F(g(u))`.
fn image(kind: SystemKind, u: f64) -> f64 {
    match kind {
        SystemKind::Tent => 1.0 - (1.0 - 2.0 * u).abs(),
        _ => {
            let s = (PI * u).sin();
            s * s
        }
    }
}

impl BayesOracle {
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// The window `[u_lo, u_hi]` in the uniform coordinate.
    fn window(&self, xt: f64) -> (f64, f64) {
        let b = self.bound;
        (g_inv(self.kind, xt - b), g_inv(self.kind, xt + b))
    }

    fn breaks(&self) -> &'static [f64] {
        match self.kind {
            SystemKind::Tent => &[0.5],
            _ => &[],
        }
    }

    /// `f*(x̃)`; `NaN` outside `[−B, 1 + B]`, where `x̃` cannot occur.
    pub fn f_star(&self, xt: f64) -> f64 {
        let b = self.bound;
        if b == 0.0 {
            return if (0.0..=1.0).contains(&xt) { image(self.kind, g_inv(self.kind, xt)) } else { f64::NAN };
        }
        if !(xt >= -b && xt <= 1.0 + b) {
            return f64::NAN;
        }
        let (lo, hi) = self.window(xt);
        if hi <= lo {
            return image(self.kind, lo);
        }
        let kind = self.kind;
        integrate(|u| image(kind, u), lo, hi, self.breaks(), ORACLE_TOL).value / (hi - lo)
    }

    /// `∫_{window} (F(g(u)) − f*(x̃))² du`, the conditional variance times
    /// the window's probability.
    fn window_variance(&self, xt: f64) -> f64 {
        let (lo, hi) = self.window(xt);
        if hi <= lo {
            return 0.0;
        }
        let c = self.f_star(xt);
        let kind = self.kind;
        integrate(|u| (image(kind, u) - c).powi(2), lo, hi, self.breaks(), ORACLE_TOL).value
    }

    /// Points where the window crosses `0`, `1` or a kink of `F ∘ g`.
    fn outer_breaks(&self) -> Vec<f64> {
        let b = self.bound;
        let mut v = vec![b, 1.0 - b];
        if self.kind == SystemKind::Tent {
            v.extend([0.5 - b, 0.5 + b]);
        }
        v.retain(|x| *x > -b && *x < 1.0 + b);
        v.sort_by(|a, c| a.partial_cmp(c).unwrap());
        v
    }

    /// `R̄*` by a fixed composite rule with `panels` panels per piece.
    pub fn denoised_risk_fixed(&self, panels: usize) -> f64 {
        let b = self.bound;
        if b == 0.0 {
            return 0.0;
        }
        integrate_fixed(|xt| self.window_variance(xt), -b, 1.0 + b, &self.outer_breaks(), panels) / (2.0 * b)
    }
}

/// Builds the Bayes forecaster for the tent or logistic map under i.i.d.
/// uniform noise and the least-squares loss.
pub fn bayes_oracle_1d(system: &DynamicalSystem, noise: &NoiseProcess, grid_points: usize) -> Result<BayesOracle> {
    let kind = system.kind();
    if !matches!(kind, SystemKind::Tent | SystemKind::Logistic4) {
        return Err(Error::Unsupported(format!("no Bayes oracle for the {} system", system.name())));
    }
    let bound = match noise.kind() {
        NoiseKind::Uniform { bound } if noise.dim() == 1 => bound,
        other => return Err(Error::Unsupported(format!("no Bayes oracle for {other} noise"))),
    };
    let mut oracle = BayesOracle {
        kind,
        bound,
        grid: Vec::new(),
        denoised_risk: 0.0,
        denoised_error: 0.0,
        risk: 0.0,
    };
    if bound > 0.0 {
        let b = bound;
        let breaks = oracle.outer_breaks();
        let r = integrate(|xt| oracle.window_variance(xt), -b, 1.0 + b, &breaks, ORACLE_TOL);
        oracle.denoised_risk = r.value / (2.0 * b);
        oracle.denoised_error = r.error / (2.0 * b);
    }
    oracle.risk = oracle.denoised_risk + bound * bound / 3.0;
    let k = grid_points.max(2);
    oracle.grid = (0..k)
        .map(|i| {
            let xt = -bound + (1.0 + 2.0 * bound) * i as f64 / (k - 1) as f64;
            (xt, oracle.f_star(xt))
        })
        .collect();
    Ok(oracle)
}

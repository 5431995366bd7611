use std::f64::consts::{E, LN_2};

use crate::dynamics::DecayModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationReport {
    pub epsilon: f64,
    /// `δ = (ε/C)^{5/4}`.
    pub delta: f64,
    /// Basis truncation level, `8ea²σ² ≤ m < δ^{−2/(5d)} ≤ m + 1`.
    pub m: usize,
    /// `C_{aσ,d,h}`.
    pub constant: f64,
    pub k_h: f64,
    pub gamma_sum: f64,
    /// Lower bound on `P(‖E_P hΦ − E_T hΦ‖ ≤ ε)`; may be negative.
    pub probability: f64,
}

impl ConcentrationReport {
    /// A lower bound at or below zero says nothing.
    pub fn is_vacuous(&self) -> bool {
        self.probability <= 0.0
    }
}

/// Probability lower bound for the empirical mean embedding of `h` over `n`
/// observations of a process whose correlations of `h e_η` are bounded by
/// `K_h γ_i`.
pub fn concentration_bound(
    n: usize,
    epsilon: f64,
    a: f64,
    sigma: f64,
    d: usize,
    k_h: f64,
    h_sup: f64,
    gamma: DecayModel,
) -> Result<ConcentrationReport> {
    if n == 0 || d == 0 {
        return Err(Error::Config("n and d must be positive".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("ε = {epsilon} must be positive")));
    }
    if a * sigma < 1.0 {
        return Err(Error::Regime {
            bound: "concentration bound",
            requirement: format!("aσ ≥ 1, got {}", a * sigma),
        });
    }
    if k_h < 1.0 {
        return Err(Error::Config(format!("K_h = {k_h} must be at least 1")));
    }
    let df = d as f64;
    let s = 8.0 * E * a * a * sigma * sigma;
    let cap1 = (1.0 + s).powf(-2.0 * df);
    if epsilon > cap1 {
        return Err(Error::Regime {
            bound: "concentration bound",
            requirement: format!("ε ≤ (1 + 8ea²σ²)^(−2d) = {cap1:e}"),
        });
    }
    // for d = 1 the comparison t^{−1/4} 2^{−t} ≤ t^{−2d} holds for all t > 0
    if d >= 2 {
        let cap2 = (18.0 * df * df.ln()).powf(-2.0 * df);
        if epsilon > cap2 {
            return Err(Error::Regime {
                bound: "concentration bound",
                requirement: format!("ε ≤ (18 d ln d)^(−2d) = {cap2:e}"),
            });
        }
    }
    let gamma_sum = gamma.partial_sum(n).ok_or_else(|| {
        Error::Config("the concentration bound needs a decaying correlation envelope".into())
    })?;

    let base = 1.0 + 1.0 / s;
    let constant = base.powf(df / 2.0)
        + 2.0 * df.sqrt() * (-a * a * sigma * sigma).exp() * (6.0 * a * sigma).powf((df - 1.0) / 2.0) * h_sup;
    let delta = (epsilon / constant).powf(1.25);
    let t = delta.powf(-2.0 / (5.0 * df));
    let m = (t.ceil() as usize).saturating_sub(1);
    let probability = 1.0 - 2.0 * base.powf(df) * k_h * constant.powi(3) * gamma_sum / (n as f64 * epsilon.powi(3));
    Ok(ConcentrationReport {
        epsilon,
        delta,
        m,
        constant,
        k_h,
        gamma_sum,
        probability,
    })
}

/// `t^{−1/4} 2^{−t} ≤ t^{−2d}`, compared in logarithms.
pub fn tail_comparison_holds(d: usize, t: f64) -> bool {
    t * LN_2 + (0.25 - 2.0 * d as f64) * t.ln() >= 0.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailComparisonScan {
    pub d: usize,
    pub threshold: f64,
    pub checked: usize,
    pub violations: Vec<f64>,
}

impl TailComparisonScan {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the inequality at `threshold + k·step` for `k ≥ 1` up to `t_max`,
/// with threshold `18 d ln d` (zero for `d = 1`).
pub fn scan_tail_comparison(d: usize, step: f64, t_max: f64) -> TailComparisonScan {
    assert!(d >= 1 && step > 0.0, "need d ≥ 1 and a positive step");
    let df = d as f64;
    let threshold = if d == 1 { 0.0 } else { 18.0 * df * df.ln() };
    let mut checked = 0;
    let mut violations = Vec::new();
    let mut k = 1;
    loop {
        let t = threshold + k as f64 * step;
        if t > t_max {
            break;
        }
        checked += 1;
        if !tail_comparison_holds(d, t) {
            violations.push(t);
        }
        k += 1;
    }
    TailComparisonScan {
        d,
        threshold,
        checked,
        violations,
    }
}

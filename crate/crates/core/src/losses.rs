//! Distance-based losses `L(x, y, t) = ρ ψ(y − t)`.

use std::f64::consts::{LN_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LossKind {
    /// `ψ(r) = r²`.
    LeastSquares,
    /// `ψ(r) = min{r², max{1, 2|r| − 1}}`.
    Huber,
    /// `ψ(r) = ln((1 + e^r)² e^{−r}) − ln 4`.
    LogDist,
    /// `ψ(r) = (|r| − ε)_+`. Not differentiable; a negative control only.
    EpsInsensitive { eps: f64 },
}

/// A closed interval of output values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn symmetric(b: f64) -> Self {
        Interval::new(-b, b)
    }

    pub fn sup_abs(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    kind: LossKind,
    rho: f64,
}

impl LossSpec {
    pub fn new(kind: LossKind) -> Self {
        LossSpec { kind, rho: 1.0 }
    }

    pub fn least_squares() -> Self {
        Self::new(LossKind::LeastSquares)
    }

    pub fn huber() -> Self {
        Self::new(LossKind::Huber)
    }

    pub fn logdist() -> Self {
        Self::new(LossKind::LogDist)
    }

    pub fn eps_insensitive(eps: f64) -> Self {
        Self::new(LossKind::EpsInsensitive { eps })
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            LossKind::LeastSquares => "ls",
            LossKind::Huber => "huber",
            LossKind::LogDist => "logdist",
            LossKind::EpsInsensitive { .. } => "eps",
        }
    }

    pub fn is_least_squares(&self) -> bool {
        self.kind == LossKind::LeastSquares
    }

    /// Lipschitz losses: `ψ` itself is globally Lipschitz.
    pub fn is_lipschitz(&self) -> bool {
        !self.is_least_squares()
    }

    pub fn rescale(&self) -> f64 {
        self.rho
    }

    pub fn with_rescale(mut self, rho: f64) -> Self {
        assert!(rho > 0.0 && rho.is_finite(), "rescale factor must be positive");
        self.rho = rho;
        self
    }

    /// `ψ(r)` before rescaling.
    pub fn psi_raw(&self, r: f64) -> f64 {
        match self.kind {
            LossKind::LeastSquares => r * r,
            LossKind::Huber => (r * r).min((2.0 * r.abs() - 1.0).max(1.0)),
            LossKind::LogDist => {
                let a = r.abs();
                a + 2.0 * (-a).exp().ln_1p() - 2.0 * LN_2
            }
            LossKind::EpsInsensitive { eps } => (r.abs() - eps).max(0.0),
        }
    }

    /// `ψ'(r)` before rescaling.
    pub fn dpsi_raw(&self, r: f64) -> f64 {
        match self.kind {
            LossKind::LeastSquares => 2.0 * r,
            LossKind::Huber => {
                if r.abs() <= 1.0 {
                    2.0 * r
                } else {
                    2.0 * r.signum()
                }
            }
            LossKind::LogDist => (0.5 * r).tanh(),
            LossKind::EpsInsensitive { eps } => {
                if r.abs() > eps {
                    r.signum()
                } else {
                    0.0
                }
            }
        }
    }

    /// `ψ''(r)` before rescaling, taking the one-sided value at kinks of `ψ'`.
    pub fn d2psi_raw(&self, r: f64) -> f64 {
        match self.kind {
            LossKind::LeastSquares => 2.0,
            LossKind::Huber => {
                if r.abs() <= 1.0 {
                    2.0
                } else {
                    0.0
                }
            }
            LossKind::LogDist => {
                let c = (0.5 * r).cosh();
                0.5 / (c * c)
            }
            LossKind::EpsInsensitive { .. } => 0.0,
        }
    }

    /// `(ψ(r), ψ'(r))` before rescaling.
    pub fn eval_raw(&self, r: f64) -> (f64, f64) {
        (self.psi_raw(r), self.dpsi_raw(r))
    }

    /// `(ρψ(r), ρψ'(r))`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        (self.rho * self.psi_raw(r), self.rho * self.dpsi_raw(r))
    }

    pub fn value(&self, r: f64) -> f64 {
        self.rho * self.psi_raw(r)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.rho * self.dpsi_raw(r)
    }

    pub fn second_derivative(&self, r: f64) -> f64 {
        self.rho * self.d2psi_raw(r)
    }

    /// Global Lipschitz constant of `ψ'` before rescaling, if any.
    pub fn dpsi_lipschitz_raw(&self) -> Option<f64> {
        match self.kind {
            LossKind::LeastSquares | LossKind::Huber => Some(2.0),
            LossKind::LogDist => Some(0.5),
            LossKind::EpsInsensitive { .. } => None,
        }
    }

    /// Copy with `ρ = 1 / max(1, sup_{y∈Y} ψ(y))`.
    pub fn rescale_to_unit(&self, range: Interval) -> LossSpec {
        // ψ is even and nondecreasing in |r|
        let sup = self.psi_raw(range.sup_abs());
        self.with_rescale(1.0 / sup.max(1.0))
    }

    /// The constant `c` of the loss assumption on output range `Y`.
    ///
    /// `L'(y, t) = −ρψ'(y − t)` must be `c`-Lipschitz jointly in `(y, t)`,
    /// which costs a factor `√2` over the Lipschitz constant of `ψ'`, and
    /// `|L'(y, 0)| ≤ c` must hold on `Y`. The larger of the two minimal
    /// constants is returned; `∞` if `ψ'` is not Lipschitz.
    pub fn assumption_c(&self, range: Interval) -> f64 {
        let slope = self.dpsi_raw(range.sup_abs()).abs();
        match self.dpsi_lipschitz_raw() {
            Some(lip) => self.rho * slope.max(SQRT_2 * lip),
            None => f64::INFINITY,
        }
    }

    /// Smallest Lipschitz constant of `t ↦ L(y, t)` on `[−a, a]`, uniform
    /// over `y ∈ Y`.
    pub fn local_lipschitz(&self, a: f64, range: Interval) -> f64 {
        assert!(a >= 0.0, "radius must be nonnegative");
        let reach = a + range.sup_abs();
        let raw = match self.kind {
            LossKind::LeastSquares => 2.0 * reach,
            LossKind::Huber => (2.0 * reach).min(2.0),
            LossKind::LogDist => (0.5 * reach).tanh(),
            LossKind::EpsInsensitive { eps } => {
                if reach > eps {
                    1.0
                } else {
                    0.0
                }
            }
        };
        self.rho * raw
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LossKind::EpsInsensitive { eps } => write!(f, "eps:{eps}"),
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for LossSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ls" => Ok(LossSpec::least_squares()),
            "huber" => Ok(LossSpec::huber()),
            "logdist" | "logistic_dist" => Ok(LossSpec::logdist()),
            other => match other.strip_prefix("eps:") {
                Some(e) => e
                    .parse::<f64>()
                    .map(LossSpec::eps_insensitive)
                    .map_err(|_| Error::Parse(format!("bad epsilon `{e}`"))),
                None => Err(Error::Parse(format!(
                    "unknown loss `{other}` (expected ls, huber or logdist)"
                ))),
            },
        }
    }
}

/// The clauses of the loss assumption, in the order they are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    Convexity,
    Differentiability,
    DerivativeLipschitz,
    BoundedAtZero,
    SlopeAtZero,
    LocalLipschitz,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Convexity => "convexity",
            Clause::Differentiability => "differentiability",
            Clause::DerivativeLipschitz => "derivative Lipschitz (|L'(y,t) − L'(y',t')| ≤ c‖·‖)",
            Clause::BoundedAtZero => "L(y, 0) ≤ 1",
            Clause::SlopeAtZero => "|L'(y, 0)| ≤ c",
            Clause::LocalLipschitz => "|L|_{a,1} ≤ c(1 + a)",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub c: f64,
    pub radius: f64,
    /// `max ψ(mid) − mean(ψ(r₁), ψ(r₂))` over grid pairs.
    pub convexity_violation: f64,
    /// Largest jump between one-sided difference quotients at two resolutions.
    pub slope_jump: (f64, f64),
    /// `max |L'(y,t) − L'(y',t')| / ‖(y,t) − (y',t')‖` over grid pairs.
    pub derivative_quotient: f64,
    pub max_loss_at_zero: f64,
    pub max_slope_at_zero: f64,
    pub local_lipschitz: f64,
    pub violations: Vec<Clause>,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Grid-based check of every clause of the loss assumption on `Y × [−a, a]`.
///
/// `resolution` is the number of grid points per axis.
pub fn assess_assumption_l(
    loss: &LossSpec,
    range: Interval,
    a: f64,
    resolution: usize,
) -> AssumptionReport {
    let resolution = resolution.max(3);
    let c = loss.assumption_c(range);
    let reach = a + range.sup_abs();
    let lin = |lo: f64, hi: f64, k: usize| -> Vec<f64> {
        (0..k)
            .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
            .collect()
    };

    let rs = lin(-reach, reach, 4 * resolution + 1);
    let mut convexity_violation = f64::NEG_INFINITY;
    for &r1 in &rs {
        for &r2 in &rs {
            let mid = loss.value(0.5 * (r1 + r2));
            let avg = 0.5 * (loss.value(r1) + loss.value(r2));
            convexity_violation = convexity_violation.max(mid - avg);
        }
    }

    let jump_at = |h: f64| -> f64 {
        let steps = (2.0 * reach / h).ceil() as usize;
        (0..=steps)
            .map(|k| -reach + k as f64 * h)
            .map(|r| {
                let right = (loss.value(r + h) - loss.value(r)) / h;
                let left = (loss.value(r) - loss.value(r - h)) / h;
                (right - left).abs()
            })
            .fold(0.0, f64::max)
    };
    let h = 2.0 * reach / (4 * resolution) as f64;
    let slope_jump = (jump_at(h), jump_at(h / 10.0));
    // a kink keeps the jump at O(1) under refinement, a derivative with
    // bounded variation lets it shrink linearly
    let differentiable = slope_jump.1 <= 0.5 * slope_jump.0 || slope_jump.1 < 1e-9;

    let ys = lin(range.lo, range.hi, resolution);
    let ts = lin(-a, a, resolution);
    let pts: Vec<(f64, f64, f64)> = ys
        .iter()
        .flat_map(|&y| ts.iter().map(move |&t| (y, t)))
        .map(|(y, t)| (y, t, -loss.derivative(y - t)))
        .collect();
    let mut derivative_quotient = 0.0_f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let dist = (p.0 - q.0).hypot(p.1 - q.1);
            if dist > 0.0 {
                derivative_quotient = derivative_quotient.max((p.2 - q.2).abs() / dist);
            }
        }
    }

    let max_loss_at_zero = ys.iter().map(|&y| loss.value(y)).fold(0.0, f64::max);
    let max_slope_at_zero = ys
        .iter()
        .map(|&y| loss.derivative(y).abs())
        .fold(0.0, f64::max);
    let local_lipschitz = loss.local_lipschitz(a, range);

    let mut violations = Vec::new();
    if convexity_violation > 1e-12 {
        violations.push(Clause::Convexity);
    }
    if !differentiable {
        violations.push(Clause::Differentiability);
    }
    if !(derivative_quotient <= c * (1.0 + 1e-12)) {
        violations.push(Clause::DerivativeLipschitz);
    }
    if max_loss_at_zero > 1.0 + 1e-12 {
        violations.push(Clause::BoundedAtZero);
    }
    if !(max_slope_at_zero <= c * (1.0 + 1e-12)) {
        violations.push(Clause::SlopeAtZero);
    }
    if !(local_lipschitz <= c * (1.0 + a) * (1.0 + 1e-12)) {
        violations.push(Clause::LocalLipschitz);
    }

    AssumptionReport {
        c,
        radius: a,
        convexity_violation,
        slope_jump,
        derivative_quotient,
        max_loss_at_zero,
        max_slope_at_zero,
        local_lipschitz,
        violations,
    }
}

/// As [`assess_assumption_l`], failing on the first violated clause.
pub fn verify_assumption_l(
    loss: &LossSpec,
    range: Interval,
    a: f64,
    resolution: usize,
) -> Result<AssumptionReport> {
    let report = assess_assumption_l(loss, range, a, resolution);
    match report.violations.first() {
        None => Ok(report),
        Some(clause) => Err(Error::Assumption(format!(
            "{} fails clause `{clause}` on Y = [{}, {}], a = {a}",
            loss, range.lo, range.hi
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        assert_eq!(LossSpec::least_squares().eval_raw(3.0), (9.0, 6.0));
        assert_eq!(LossSpec::huber().eval_raw(2.0), (3.0, 2.0));
        let (v, d) = LossSpec::logdist().eval_raw(0.0);
        assert!(v.abs() < 1e-15 && d == 0.0);
    }

    #[test]
    fn logdist_matches_direct_form_and_survives_overflow() {
        let l = LossSpec::logdist();
        for &r in &[-5.0, -0.3, 0.7, 4.0] {
            let direct = ((1.0 + f64::exp(r)).powi(2) * f64::exp(-r)).ln() - 4f64.ln();
            assert!((l.psi_raw(r) - direct).abs() < 1e-13);
        }
        let big = l.psi_raw(1e4);
        assert!((big - (1e4 - 4f64.ln())).abs() < 1e-9);
        assert!((l.dpsi_raw(1e4) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rescale_examples() {
        let ls = LossSpec::least_squares();
        assert_eq!(ls.rescale_to_unit(Interval::symmetric(2.0)).rescale(), 0.25);
        assert_eq!(ls.rescale_to_unit(Interval::symmetric(1.0)).rescale(), 1.0);
        let h = LossSpec::huber().rescale_to_unit(Interval::symmetric(3.0));
        assert!((h.rescale() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn local_lipschitz_examples() {
        let y = Interval::symmetric(1.0);
        assert_eq!(LossSpec::least_squares().local_lipschitz(1.0, y), 4.0);
        assert_eq!(LossSpec::huber().local_lipschitz(10.0, y), 2.0);
        let l = LossSpec::logdist();
        for a in [0.0, 0.5, 3.0, 100.0] {
            assert!(l.local_lipschitz(a, y) <= 1.0);
        }
    }

    #[test]
    fn local_lipschitz_dominates_grid_slopes() {
        let y = Interval::symmetric(1.0);
        for loss in [LossSpec::least_squares(), LossSpec::huber(), LossSpec::logdist()] {
            for a in [0.1, 1.0, 10.0] {
                let mut best = 0.0_f64;
                for i in 0..=200 {
                    for k in 0..=200 {
                        let yy = -1.0 + 2.0 * i as f64 / 200.0;
                        let t = -a + 2.0 * a * k as f64 / 200.0;
                        best = best.max(loss.dpsi_raw(yy - t).abs());
                    }
                }
                let l = loss.local_lipschitz(a, y);
                assert!(best <= l + 1e-12, "{loss} a={a}");
                assert!(best >= l - 1e-12, "{loss} a={a} not tight");
            }
        }
    }

    #[test]
    fn assumption_holds_for_smooth_losses() {
        let y = Interval::symmetric(1.0);
        let ls = verify_assumption_l(&LossSpec::least_squares().rescale_to_unit(y), y, 1.0, 41).unwrap();
        assert!((ls.c - 2.0 * SQRT_2).abs() < 1e-15);
        assert!(ls.derivative_quotient > 2.0);
        let ld = verify_assumption_l(&LossSpec::logdist().rescale_to_unit(y), y, 2.0, 41).unwrap();
        assert!(ld.derivative_quotient <= SQRT_2 * 0.5 + 1e-12);
        verify_assumption_l(&LossSpec::huber().rescale_to_unit(y), y, 3.0, 41).unwrap();
    }

    #[test]
    fn eps_insensitive_fails_differentiability() {
        let y = Interval::symmetric(1.0);
        let err = verify_assumption_l(&LossSpec::eps_insensitive(0.1), y, 1.0, 41).unwrap_err();
        assert!(err.to_string().contains("differentiability"), "{err}");
    }

    #[test]
    fn unscaled_loss_fails_bound_at_zero() {
        let y = Interval::symmetric(2.0);
        let rep = assess_assumption_l(&LossSpec::least_squares(), y, 1.0, 21);
        assert_eq!(rep.violations, vec![Clause::BoundedAtZero]);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for loss in [LossSpec::least_squares(), LossSpec::huber(), LossSpec::logdist()] {
            for k in 0..=400 {
                let r = -10.0 + 0.05 * k as f64 + 0.0123;
                let h = 1e-6;
                let fd = (loss.psi_raw(r + h) - loss.psi_raw(r - h)) / (2.0 * h);
                let d = loss.dpsi_raw(r);
                assert!((fd - d).abs() <= 1e-6 * d.abs().max(1.0), "{loss} r={r}");
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for s in ["ls", "huber", "logdist"] {
            assert_eq!(s.parse::<LossSpec>().unwrap().to_string(), s);
        }
        assert!("hinge".parse::<LossSpec>().is_err());
    }
}

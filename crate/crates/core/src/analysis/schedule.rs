//! Regularization schedules `(λ_n, σ_n)` and the sufficient conditions on
//! them under which the forecaster is consistent.
//!
//! Two layers are provided. The region verdict applies closed-form
//! inequalities in `(α, β, d)` for the pure power and log-power schedules
//! and is what gates experiments. The numeric trace evaluates each raw
//! condition on `n = 2^4 … 2^20` and classifies its trend; it is advisory.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dynamics::DecayModel;
use crate::losses::{Interval, LossSpec};
use crate::{Error, Result};

/// Slack used when comparing region inequalities.
pub const REGION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleForm {
    /// `λ_n = n^{−α}`, `σ_n = n^β`.
    Power,
    /// `λ_n = (1 + ln n)^{−α}`, `σ_n = (1 + ln n)^β`.
    LogPower,
}

impl fmt::Display for ScheduleForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleForm::Power => "power",
            ScheduleForm::LogPower => "logpower",
        })
    }
}

impl FromStr for ScheduleForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "power" => Ok(ScheduleForm::Power),
            "logpower" | "log-power" => Ok(ScheduleForm::LogPower),
            other => Err(Error::Parse(format!("unknown schedule form `{other}` (expected power or logpower)"))),
        }
    }
}

/// `λ_n = c_λ · base(n)^{−α}` and `σ_n = c_σ · base(n)^β`.
///
/// The prefactors default to 1. They leave every limit condition unchanged
/// and only move the point where the asymptotics take over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleSpec {
    pub form: ScheduleForm,
    pub alpha: f64,
    pub beta: f64,
    pub lambda_scale: f64,
    pub sigma_scale: f64,
}

impl ScheduleSpec {
    pub fn new(form: ScheduleForm, alpha: f64, beta: f64) -> Result<Self> {
        Self::with_scales(form, alpha, beta, 1.0, 1.0)
    }

    pub fn power(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(ScheduleForm::Power, alpha, beta)
    }

    pub fn log_power(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(ScheduleForm::LogPower, alpha, beta)
    }

    pub fn with_scales(form: ScheduleForm, alpha: f64, beta: f64, lambda_scale: f64, sigma_scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("α = {alpha} must be positive")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Config(format!("β = {beta} must be nonnegative")));
        }
        if !(lambda_scale > 0.0 && lambda_scale <= 1.0) {
            return Err(Error::Config(format!("λ prefactor {lambda_scale} not in (0, 1]")));
        }
        if !(sigma_scale >= 1.0 && sigma_scale.is_finite()) {
            return Err(Error::Config(format!("σ prefactor {sigma_scale} must be at least 1")));
        }
        Ok(ScheduleSpec {
            form,
            alpha,
            beta,
            lambda_scale,
            sigma_scale,
        })
    }

    fn base(&self, n: f64) -> f64 {
        match self.form {
            ScheduleForm::Power => n,
            ScheduleForm::LogPower => 1.0 + n.ln(),
        }
    }

    /// `(λ_n, σ_n)` at a real-valued `n ≥ 1`.
    pub fn eval_at(&self, n: f64) -> (f64, f64) {
        let b = self.base(n.max(1.0));
        (self.lambda_scale * b.powf(-self.alpha), self.sigma_scale * b.powf(self.beta))
    }
}

/// `(λ_n, σ_n)`.
pub fn schedule_eval(schedule: &ScheduleSpec, n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Config("schedules start at n = 1".into()));
    }
    Ok(schedule.eval_at(n as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    S1,
    S2,
    S3,
    S1LS,
    S2LS,
    S3LS,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::S1,
        Variant::S2,
        Variant::S3,
        Variant::S1LS,
        Variant::S2LS,
        Variant::S3LS,
    ];

    /// Variants stated for the least-squares loss.
    pub fn is_least_squares(&self) -> bool {
        matches!(self, Variant::S1LS | Variant::S2LS | Variant::S3LS)
    }

    /// The variants that can certify a run with `loss`.
    pub fn for_loss(loss: &LossSpec) -> [Variant; 3] {
        if loss.is_least_squares() {
            [Variant::S1LS, Variant::S2LS, Variant::S3LS]
        } else {
            [Variant::S1, Variant::S2, Variant::S3]
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::S1 => "S1",
            Variant::S2 => "S2",
            Variant::S3 => "S3",
            Variant::S1LS => "S1-LS",
            Variant::S2LS => "S2-LS",
            Variant::S3LS => "S3-LS",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.trim().to_ascii_uppercase().chars().filter(|c| *c != '-' && *c != '_').collect();
        match key.as_str() {
            "S1" => Ok(Variant::S1),
            "S2" => Ok(Variant::S2),
            "S3" => Ok(Variant::S3),
            "S1LS" => Ok(Variant::S1LS),
            "S2LS" => Ok(Variant::S2LS),
            "S3LS" => Ok(Variant::S3LS),
            _ => Err(Error::Parse(format!("unknown assumption variant `{s}`"))),
        }
    }
}

/// One inequality of a region statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionClause {
    pub statement: String,
    pub holds: bool,
}

/// Closed-form verdict for a variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub variant: Variant,
    pub satisfied: bool,
    pub clauses: Vec<RegionClause>,
    /// Why the region statement does not apply or fails outright.
    pub note: Option<String>,
}

fn clause(statement: impl Into<String>, holds: bool) -> RegionClause {
    RegionClause {
        statement: statement.into(),
        holds,
    }
}

/// Whether `γ` meets the decay requirement of the schedule form: summable
/// for power schedules, `n^{−1} Σ_{i<n} γ_i ≤ c / (1 + ln n)` for log-power.
pub fn decay_supports(form: ScheduleForm, gamma: &DecayModel) -> bool {
    match form {
        ScheduleForm::Power => gamma.summable(),
        // every decaying polynomial or exponential envelope qualifies
        ScheduleForm::LogPower => gamma.decays(),
    }
}

/// The region inequalities, evaluated exactly in `(α, β, d)`.
pub fn region_verdict(schedule: &ScheduleSpec, variant: Variant, d: usize, loss: &LossSpec, gamma: &DecayModel) -> RegionVerdict {
    let (a, b, df) = (schedule.alpha, schedule.beta, d as f64);
    let tol = REGION_TOL;
    let mut note = None;
    if variant.is_least_squares() != loss.is_least_squares() {
        note = Some(format!("{variant} is stated for {} losses, got {loss}", if variant.is_least_squares() { "the least-squares" } else { "Lipschitz" }));
    } else if !decay_supports(schedule.form, gamma) {
        note = Some(match schedule.form {
            ScheduleForm::Power => format!("power schedules need a summable correlation envelope, got {gamma}"),
            ScheduleForm::LogPower => format!("log-power schedules need a decaying correlation envelope, got {gamma}"),
        });
    }
    let clauses = match variant {
        Variant::S1 => vec![
            clause("α ≥ 4dβ", a >= 4.0 * df * b - tol),
            clause("4α + 2β < 1", 4.0 * a + 2.0 * b < 1.0 - tol),
        ],
        Variant::S2 => vec![
            clause("dβ < α", df * b < a - tol),
            clause("α < 4dβ", a < 4.0 * df * b - tol),
            clause("α + (2 + 12d)β < 1", a + (2.0 + 12.0 * df) * b < 1.0 - tol),
        ],
        Variant::S3 => {
            if note.is_none() {
                note = Some("cannot hold for Lipschitz losses: e^{−σ}|L|_{a,1} stays bounded".into());
            }
            vec![clause("e^{−σ_n}|L|_{λ_n^{−1/2},1} → ∞", false)]
        }
        Variant::S1LS => vec![
            clause("3α ≥ 8dβ", 3.0 * a >= 8.0 * df * b - tol),
            clause("8dβ > 0", 8.0 * df * b > tol),
            clause("11α + 4β < 2", 11.0 * a + 4.0 * b < 2.0 - tol),
        ],
        Variant::S2LS => vec![
            clause("α + (2 + 12d)β < 1", a + (2.0 + 12.0 * df) * b < 1.0 - tol),
            clause("dβ < α", df * b < a - tol),
            clause("α < (8/3)dβ", a < 8.0 / 3.0 * df * b - tol),
        ],
        Variant::S3LS => vec![
            clause("β = 0", b.abs() <= tol),
            clause("0 < α < 1/7", a > tol && a < 1.0 / 7.0 - tol),
        ],
    };
    let satisfied = note.is_none() && clauses.iter().all(|c| c.holds);
    RegionVerdict {
        variant,
        satisfied,
        clauses,
        note,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    ToZero,
    ToInfinity,
    Bounded,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::ToZero => "→0",
            Trend::ToInfinity => "→∞",
            Trend::Bounded => "bounded",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    /// `sup_n < ∞`.
    Bounded,
    /// `lim_n = 0`.
    ToZero,
    /// `lim_n = ∞`.
    ToInfinity,
}

impl Requirement {
    fn accepts(&self, t: Trend) -> bool {
        match self {
            Requirement::Bounded => t != Trend::ToInfinity,
            Requirement::ToZero => t == Trend::ToZero,
            Requirement::ToInfinity => t == Trend::ToInfinity,
        }
    }
}

/// One raw condition traced over `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub expression: String,
    pub requirement: Requirement,
    /// `(n, value)` for `n = 2^4 … 2^20`.
    pub values: Vec<(usize, f64)>,
    pub trend: Trend,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleCheck {
    pub schedule: ScheduleSpec,
    pub d: usize,
    pub loss: String,
    pub gamma: String,
    pub region: RegionVerdict,
    pub trace: Vec<TraceRow>,
    pub sigma_exponent: f64,
    /// Caveats the trace cannot resolve.
    pub remarks: Vec<String>,
}

/// Exponent of `σ_n` in the final condition of S1. The stated factor grows
/// with `n`, which no `σ_n > 1` survives; the region inequalities correspond
/// to exponent 2.
pub const DEFAULT_SIGMA_EXPONENT: f64 = 2.0;

/// Slope of `ln value` against the schedule's log base beyond which a
/// trace counts as diverging or vanishing.
const TREND_SLOPE: f64 = 1e-3;

fn classify(schedule: &ScheduleSpec, values: &[(usize, f64)]) -> Trend {
    let tail = &values[values.len() - 5..];
    let xs: Vec<f64> = tail
        .iter()
        .map(|&(n, _)| match schedule.form {
            ScheduleForm::Power => (n as f64).ln(),
            ScheduleForm::LogPower => (1.0 + (n as f64).ln()).ln(),
        })
        .collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, v)| v.max(f64::MIN_POSITIVE).ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    if slope < -TREND_SLOPE {
        Trend::ToZero
    } else if slope > TREND_SLOPE {
        Trend::ToInfinity
    } else {
        Trend::Bounded
    }
}

/// Region verdict plus the numeric trace of the raw conditions.
///
/// `|L|_{a,1}` is taken for the loss rescaled to outputs in `[−1, 1]`.
pub fn check_assumptions(
    schedule: &ScheduleSpec,
    variant: Variant,
    d: usize,
    loss: &LossSpec,
    gamma: &DecayModel,
    sigma_exponent: f64,
) -> Result<ScheduleCheck> {
    if d == 0 {
        return Err(Error::Config("dimension must be positive".into()));
    }
    let region = region_verdict(schedule, variant, d, loss, gamma);
    let range = Interval::symmetric(1.0);
    let scaled = loss.rescale_to_unit(range);
    let df = d as f64;
    let ns: Vec<usize> = (4..=20).map(|k| 1usize << k).collect();
    let lip = |lambda: f64| scaled.local_lipschitz(lambda.powf(-0.5), range);
    let gsum = |n: usize| gamma.partial_sum(n).unwrap_or(f64::NAN);

    type Expr<'a> = Box<dyn Fn(usize, f64, f64) -> f64 + 'a>;
    let mut rows: Vec<(String, Requirement, Expr)> = Vec::new();
    let k = sigma_exponent;
    match variant {
        Variant::S1 | Variant::S2 | Variant::S3 => {
            if variant == Variant::S2 {
                rows.push(("λ_n σ_n^d".into(), Requirement::ToZero, Box::new(move |_, l, s| l * s.powf(df))));
                rows.push((
                    "λ_n σ_n^{4d} / |L|".into(),
                    Requirement::ToInfinity,
                    Box::new(move |_, l, s| l * s.powf(4.0 * df) / lip(l)),
                ));
                rows.push((
                    "σ_n^{2+12d} Σγ / (n λ_n)".into(),
                    Requirement::ToZero,
                    Box::new(move |n, l, s| s.powf(2.0 + 12.0 * df) * gsum(n) / (n as f64 * l)),
                ));
            } else {
                rows.push(("λ_n".into(), Requirement::ToZero, Box::new(|_, l, _| l)));
                let req = if variant == Variant::S1 {
                    Requirement::Bounded
                } else {
                    Requirement::ToInfinity
                };
                rows.push(("e^{−σ_n} |L|".into(), req, Box::new(move |_, l, s| (-s).exp() * lip(l))));
                rows.push((
                    "λ_n σ_n^{4d} / |L|".into(),
                    Requirement::Bounded,
                    Box::new(move |_, l, s| l * s.powf(4.0 * df) / lip(l)),
                ));
                if variant == Variant::S1 {
                    rows.push((
                        format!("|L|³ σ_n^{k} Σγ / (n λ_n⁴)"),
                        Requirement::ToZero,
                        Box::new(move |n, l, s| lip(l).powi(3) * s.powf(k) * gsum(n) / (n as f64 * l.powi(4))),
                    ));
                } else {
                    rows.push((
                        "|L|⁶ e^{−2σ_n} Σγ / (n λ_n⁴)".into(),
                        Requirement::ToZero,
                        Box::new(move |n, l, s| lip(l).powi(6) * (-2.0 * s).exp() * gsum(n) / (n as f64 * l.powi(4))),
                    ));
                }
            }
        }
        Variant::S1LS | Variant::S3LS => {
            rows.push(("λ_n".into(), Requirement::ToZero, Box::new(|_, l, _| l)));
            let req = if variant == Variant::S1LS {
                Requirement::Bounded
            } else {
                Requirement::ToInfinity
            };
            rows.push(("e^{−σ_n} λ_n^{−1/2}".into(), req, Box::new(|_, l, s| (-s).exp() / l.sqrt())));
            rows.push((
                "λ_n σ_n^{8d/3}".into(),
                Requirement::Bounded,
                Box::new(move |_, l, s| l * s.powf(8.0 * df / 3.0)),
            ));
            if variant == Variant::S1LS {
                rows.push((
                    "σ_n² Σγ / (n λ_n^{11/2})".into(),
                    Requirement::ToZero,
                    Box::new(move |n, l, s| s * s * gsum(n) / (n as f64 * l.powf(5.5))),
                ));
            } else {
                rows.push((
                    "e^{−σ_n} Σγ / (n λ_n⁷)".into(),
                    Requirement::ToZero,
                    Box::new(move |n, l, s| (-s).exp() * gsum(n) / (n as f64 * l.powi(7))),
                ));
            }
        }
        Variant::S2LS => {
            rows.push(("λ_n σ_n^d".into(), Requirement::ToZero, Box::new(move |_, l, s| l * s.powf(df))));
            rows.push((
                "λ_n σ_n^{8d/3}".into(),
                Requirement::ToInfinity,
                Box::new(move |_, l, s| l * s.powf(8.0 * df / 3.0)),
            ));
            rows.push((
                "σ_n^{2+12d} Σγ / (n λ_n)".into(),
                Requirement::ToZero,
                Box::new(move |n, l, s| s.powf(2.0 + 12.0 * df) * gsum(n) / (n as f64 * l)),
            ));
        }
    }

    let trace = rows
        .into_iter()
        .map(|(expression, requirement, f)| {
            let values: Vec<(usize, f64)> = ns
                .iter()
                .map(|&n| {
                    let (l, s) = schedule.eval_at(n as f64);
                    (n, f(n, l, s))
                })
                .collect();
            let trend = classify(schedule, &values);
            TraceRow {
                expression,
                requirement,
                consistent: requirement.accepts(trend),
                values,
                trend,
            }
        })
        .collect();

    let mut remarks = Vec::new();
    if variant == Variant::S1 {
        remarks.push(format!(
            "the final S1 condition is typeset with σ_n^(2n−1); the trace uses σ_n^{k}, which matches the closed-form region 4α + 2β < 1 at k = 2"
        ));
    }
    if !gamma.decays() {
        remarks.push(format!("correlation envelope {gamma} does not decay; Σγ terms are undefined"));
    }
    Ok(ScheduleCheck {
        schedule: *schedule,
        d,
        loss: loss.to_string(),
        gamma: gamma.to_string(),
        region,
        trace,
        sigma_exponent,
        remarks,
    })
}

/// The region verdicts for every variant applicable to `loss`; the schedule
/// is certified when any of them is satisfied.
pub fn gate(schedule: &ScheduleSpec, d: usize, loss: &LossSpec, gamma: &DecayModel) -> (bool, Vec<RegionVerdict>) {
    let verdicts: Vec<RegionVerdict> = Variant::for_loss(loss)
        .iter()
        .map(|&v| region_verdict(schedule, v, d, loss, gamma))
        .collect();
    (verdicts.iter().any(|v| v.satisfied), verdicts)
}

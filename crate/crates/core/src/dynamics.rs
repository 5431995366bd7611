//! Test dynamical systems with known invariant measures.
//!
//! Long orbits of the tent and doubling maps collapse to a fixed point in
//! double precision after about 53 steps, so [`DynamicalSystem::sample_orbit`]
//! builds typical orbits from a symbolic bit stream instead of iterating
//! [`DynamicalSystem::step`]. Every produced state still satisfies
//! `x[i+1] = F(x[i])` up to rounding.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::{Error, Result, Series};

/// Tolerance for domain membership of box coordinates.
const BOX_TOL: f64 = 1e-12;
/// Tolerance on the radius of circle states.
const RADIUS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayModel {
    /// `γ_i = κ ρ^i`.
    Exponential { rate: f64, kappa: f64 },
    /// `γ_i = κ (1+i)^{-p}`.
    Polynomial { power: f64, kappa: f64 },
    None,
}

impl DecayModel {
    pub fn exponential(rate: f64, kappa: f64) -> Result<Self> {
        if !(rate > 0.0 && rate < 1.0) {
            return Err(Error::Config(format!("exponential rate {rate} not in (0,1)")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Config(format!("decay prefactor {kappa} must be positive")));
        }
        Ok(DecayModel::Exponential { rate, kappa })
    }

    pub fn polynomial(power: f64, kappa: f64) -> Result<Self> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::Config(format!("polynomial power {power} must be positive")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Config(format!("decay prefactor {kappa} must be positive")));
        }
        Ok(DecayModel::Polynomial { power, kappa })
    }

    /// `γ_i`, or `None` when no decay is claimed.
    pub fn gamma(&self, i: usize) -> Option<f64> {
        match *self {
            DecayModel::Exponential { rate, kappa } => Some(kappa * rate.powi(i as i32)),
            DecayModel::Polynomial { power, kappa } => Some(kappa * (1.0 + i as f64).powf(-power)),
            DecayModel::None => None,
        }
    }

    pub fn summable(&self) -> bool {
        match *self {
            DecayModel::Exponential { .. } => true,
            DecayModel::Polynomial { power, .. } => power > 1.0,
            DecayModel::None => false,
        }
    }

    pub fn decays(&self) -> bool {
        !matches!(self, DecayModel::None)
    }

    /// `Σ_{i<n} γ_i`.
    pub fn partial_sum(&self, n: usize) -> Option<f64> {
        match *self {
            DecayModel::Exponential { rate, kappa } => {
                Some(kappa * (1.0 - rate.powf(n as f64)) / (1.0 - rate))
            }
            DecayModel::Polynomial { .. } => Some((0..n).map(|i| self.gamma(i).unwrap()).sum()),
            DecayModel::None => None,
        }
    }

    /// The slower of two decay envelopes, scaled to dominate both.
    pub fn dominating(a: DecayModel, b: DecayModel) -> DecayModel {
        use DecayModel::*;
        match (a, b) {
            (None, _) | (_, None) => None,
            (Exponential { rate: r1, kappa: k1 }, Exponential { rate: r2, kappa: k2 }) => Exponential {
                rate: r1.max(r2),
                kappa: k1.max(k2),
            },
            (Polynomial { power: p1, kappa: k1 }, Polynomial { power: p2, kappa: k2 }) => Polynomial {
                power: p1.min(p2),
                kappa: k1.max(k2),
            },
            (Polynomial { power, kappa: kp }, Exponential { rate, kappa: ke })
            | (Exponential { rate, kappa: ke }, Polynomial { power, kappa: kp }) => {
                // κ_e ρ^i ≤ κ_e sup_i ρ^i (1+i)^p (1+i)^{-p}
                let peak_i = (power / -rate.ln() - 1.0).max(0.0);
                let peak = [peak_i.floor(), peak_i.ceil()]
                    .iter()
                    .map(|&i| rate.powf(i) * (1.0 + i).powf(power))
                    .fold(1.0_f64, f64::max);
                Polynomial {
                    power,
                    kappa: kp.max(ke * peak),
                }
            }
        }
    }
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayModel::Exponential { rate, kappa } => write!(f, "exp:{rate}:{kappa}"),
            DecayModel::Polynomial { power, kappa } => write!(f, "poly:{power}:{kappa}"),
            DecayModel::None => write!(f, "none"),
        }
    }
}

impl FromStr for DecayModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in decay model `{s}`")))
        };
        match parts.as_slice() {
            ["none"] => Ok(DecayModel::None),
            ["exp", r, k] => DecayModel::exponential(num(r)?, num(k)?),
            ["poly", p, k] => DecayModel::polynomial(num(p)?, num(k)?),
            _ => Err(Error::Parse(format!(
                "decay model `{s}` not of the form exp:ρ:κ, poly:p:κ or none"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Axis-aligned box `Π [lower_j, upper_j]`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// The unit circle in R².
    UnitCircle,
}

impl Domain {
    /// Coordinate-wise bounding box.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Box { lower, upper } => (lower.clone(), upper.clone()),
            Domain::UnitCircle => (vec![-1.0, -1.0], vec![1.0, 1.0]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantSampler {
    Exact,
    /// Iterate the map from a uniform start for this many steps.
    BurnIn(usize),
}

pub const DEFAULT_BURN_IN: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemKind {
    /// `x ↦ 1 − |1 − 2x|` on [0,1].
    Tent,
    /// `x ↦ 4x(1 − x)` on [0,1].
    Logistic4,
    /// `z ↦ z²` on the unit circle in R².
    Circle2,
    /// `z ↦ e^{2πiα} z` on the unit circle in R².
    Rotation { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalSystem {
    kind: SystemKind,
    sampler: InvariantSampler,
    decay: DecayModel,
}

/// Golden-mean rotation number.
pub fn golden_rotation() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

impl DynamicalSystem {
    pub fn new(kind: SystemKind) -> Self {
        let decay = match kind {
            // Lipschitz observables of the logistic map pull back to Lipschitz
            // observables of the tent map under θ ↦ sin²(πθ/2)
            SystemKind::Tent | SystemKind::Logistic4 | SystemKind::Circle2 => {
                DecayModel::Exponential { rate: 0.5, kappa: 1.0 }
            }
            SystemKind::Rotation { .. } => DecayModel::None,
        };
        DynamicalSystem {
            kind,
            sampler: InvariantSampler::Exact,
            decay,
        }
    }

    pub fn tent() -> Self {
        Self::new(SystemKind::Tent)
    }

    pub fn logistic4() -> Self {
        Self::new(SystemKind::Logistic4)
    }

    pub fn circle2() -> Self {
        Self::new(SystemKind::Circle2)
    }

    pub fn rotation(alpha: f64) -> Self {
        Self::new(SystemKind::Rotation { alpha })
    }

    pub fn with_sampler(mut self, sampler: InvariantSampler) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn with_decay(mut self, decay: DecayModel) -> Self {
        self.decay = decay;
        self
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            SystemKind::Tent => "tent",
            SystemKind::Logistic4 => "logistic4",
            SystemKind::Circle2 => "circle2",
            SystemKind::Rotation { .. } => "rotation",
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            SystemKind::Tent | SystemKind::Logistic4 => 1,
            SystemKind::Circle2 | SystemKind::Rotation { .. } => 2,
        }
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            SystemKind::Tent | SystemKind::Logistic4 => Domain::Box {
                lower: vec![0.0],
                upper: vec![1.0],
            },
            SystemKind::Circle2 | SystemKind::Rotation { .. } => Domain::UnitCircle,
        }
    }

    pub fn lipschitz_const(&self) -> f64 {
        match self.kind {
            SystemKind::Tent => 2.0,
            SystemKind::Logistic4 => 4.0,
            SystemKind::Circle2 => 2.0,
            SystemKind::Rotation { .. } => 1.0,
        }
    }

    pub fn sampler(&self) -> InvariantSampler {
        self.sampler
    }

    pub fn decay(&self) -> DecayModel {
        self.decay
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.check_domain(x).is_ok()
    }

    fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        match self.domain() {
            Domain::Box { lower, upper } => {
                for (j, &v) in x.iter().enumerate() {
                    if !(v >= lower[j] - BOX_TOL && v <= upper[j] + BOX_TOL) {
                        return Err(Error::Domain {
                            system: self.name(),
                            reason: format!(
                                "coordinate {j} = {v} outside [{}, {}]",
                                lower[j], upper[j]
                            ),
                        });
                    }
                }
            }
            Domain::UnitCircle => {
                for (j, &v) in x.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::Domain {
                            system: self.name(),
                            reason: format!("coordinate {j} = {v} is not finite"),
                        });
                    }
                }
                let r = x[0].hypot(x[1]);
                if (r - 1.0).abs() > RADIUS_TOL {
                    return Err(Error::Domain {
                        system: self.name(),
                        reason: format!("radius {r} of ({}, {}) is not 1", x[0], x[1]),
                    });
                }
            }
        }
        Ok(())
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        match self.kind {
            SystemKind::Tent => out[0] = 1.0 - (1.0 - 2.0 * x[0]).abs(),
            SystemKind::Logistic4 => out[0] = 4.0 * x[0] * (1.0 - x[0]),
            SystemKind::Circle2 => {
                let (a, b) = (x[0], x[1]);
                let re = a * a - b * b;
                let im = 2.0 * a * b;
                let r = re.hypot(im);
                out[0] = re / r;
                out[1] = im / r;
            }
            SystemKind::Rotation { alpha } => {
                let (s, c) = (2.0 * PI * alpha).sin_cos();
                let re = c * x[0] - s * x[1];
                let im = s * x[0] + c * x[1];
                let r = re.hypot(im);
                out[0] = re / r;
                out[1] = im / r;
            }
        }
    }

    /// `F(x)`.
    pub fn step(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        let mut out = vec![0.0; self.dim()];
        self.apply(x, &mut out);
        Ok(out)
    }

    /// `(x0, F(x0), …, F^{n-1}(x0))`.
    pub fn trajectory(&self, x0: &[f64], n: usize) -> Result<Series> {
        if n == 0 {
            return Err(Error::Config("trajectory length must be at least 1".into()));
        }
        self.check_domain(x0)?;
        let d = self.dim();
        let mut s = Series::with_capacity(d, n);
        s.push(x0);
        let mut cur = x0.to_vec();
        let mut next = vec![0.0; d];
        for _ in 1..n {
            self.apply(&cur, &mut next);
            s.push(&next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(s)
    }

    fn uniform_start<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self.domain() {
            Domain::Box { lower, upper } => lower
                .iter()
                .zip(&upper)
                .map(|(&l, &u)| l + (u - l) * rng.random::<f64>())
                .collect(),
            Domain::UnitCircle => from_angle(rng.random::<f64>()).to_vec(),
        }
    }

    /// One draw from the invariant measure.
    pub fn sample_invariant<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self.sampler {
            InvariantSampler::Exact => match self.kind {
                SystemKind::Tent => vec![rng.random::<f64>()],
                SystemKind::Logistic4 => vec![arcsine_from_uniform(rng.random::<f64>())],
                SystemKind::Circle2 | SystemKind::Rotation { .. } => {
                    from_angle(rng.random::<f64>()).to_vec()
                }
            },
            InvariantSampler::BurnIn(len) => {
                let mut x = self.uniform_start(rng);
                let mut next = vec![0.0; self.dim()];
                for _ in 0..len {
                    self.apply(&x, &mut next);
                    std::mem::swap(&mut x, &mut next);
                }
                x
            }
        }
    }

    /// A typical orbit of length `n` started from the invariant measure.
    ///
    /// For the expanding maps the orbit is read off a random symbol sequence,
    /// which keeps it statistically typical for arbitrary `n`.
    pub fn sample_orbit<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Series {
        let d = self.dim();
        if n == 0 {
            return Series::new(d);
        }
        if self.sampler != InvariantSampler::Exact {
            let x0 = self.sample_invariant(rng);
            return self.trajectory(&x0, n).expect("sampler stays in the domain");
        }
        match self.kind {
            SystemKind::Tent | SystemKind::Logistic4 => {
                let bits = BitStream::random(n + 66, rng);
                let mut s = Series::with_capacity(1, n);
                for i in 0..n {
                    // digit k of x_i is s_{i+k} xor s_i, with s_0 = 0
                    let mut w = bits.window(i);
                    if i > 0 && bits.bit(i) {
                        w = !w;
                    }
                    let theta = (w >> 11) as f64 * f64::EPSILON / 2.0;
                    let x = match self.kind {
                        SystemKind::Tent => theta,
                        _ => arcsine_from_uniform(theta),
                    };
                    s.push(&[x]);
                }
                s
            }
            SystemKind::Circle2 => {
                let bits = BitStream::random(n + 66, rng);
                let mut s = Series::with_capacity(2, n);
                for i in 0..n {
                    let theta = (bits.window(i) >> 11) as f64 * f64::EPSILON / 2.0;
                    s.push(&from_angle(theta));
                }
                s
            }
            SystemKind::Rotation { alpha } => {
                let mut theta: f64 = rng.random();
                let mut s = Series::with_capacity(2, n);
                for _ in 0..n {
                    s.push(&from_angle(theta));
                    theta = (theta + alpha).fract();
                }
                s
            }
        }
    }

    /// Largest observed `‖F(x) − F(x')‖ / ‖x − x'‖` over random pairs.
    ///
    /// Half of the pairs are independent invariant draws, half are local
    /// perturbations, which is where the supremum is approached.
    pub fn empirical_lipschitz<R: Rng + ?Sized>(&self, pairs: usize, rng: &mut R) -> f64 {
        let d = self.dim();
        let mut fx = vec![0.0; d];
        let mut fy = vec![0.0; d];
        let mut best = 0.0_f64;
        for k in 0..pairs {
            let x = self.sample_invariant(rng);
            let y = if k % 2 == 0 {
                self.sample_invariant(rng)
            } else {
                let h = 10f64.powf(-6.0 + 4.0 * rng.random::<f64>());
                match self.domain() {
                    Domain::Box { lower, upper } => {
                        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        x.iter()
                            .enumerate()
                            .map(|(j, &v)| (v + sign * h).clamp(lower[j], upper[j]))
                            .collect()
                    }
                    Domain::UnitCircle => from_angle(angle(&x) + h).to_vec(),
                }
            };
            let dist = euclid(&x, &y);
            if dist == 0.0 {
                continue;
            }
            self.apply(&x, &mut fx);
            self.apply(&y, &mut fy);
            best = best.max(euclid(&fx, &fy) / dist);
        }
        best
    }
}

impl FromStr for DynamicalSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "tent" => Ok(DynamicalSystem::tent()),
            "logistic4" => Ok(DynamicalSystem::logistic4()),
            "circle2" => Ok(DynamicalSystem::circle2()),
            "rotation" => Ok(DynamicalSystem::rotation(golden_rotation())),
            other => match other.strip_prefix("rotation:") {
                Some(a) => {
                    let alpha: f64 = a
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad rotation number `{a}`")))?;
                    Ok(DynamicalSystem::rotation(alpha))
                }
                None => Err(Error::Parse(format!(
                    "unknown system `{other}` (expected tent, logistic4, circle2 or rotation)"
                ))),
            },
        }
    }
}

/// Point on the unit circle at angle `2π θ`.
pub fn from_angle(theta: f64) -> [f64; 2] {
    let (s, c) = (2.0 * PI * theta).sin_cos();
    [c, s]
}

/// Angle of a point on the unit circle as a fraction of a full turn, in [0,1).
pub fn angle(z: &[f64]) -> f64 {
    let t = z[1].atan2(z[0]) / (2.0 * PI);
    if t < 0.0 {
        (t + 1.0).fract()
    } else {
        t
    }
}

/// Maps uniform `u` to the arcsine law: `sin²(πu/2)`.
pub fn arcsine_from_uniform(u: f64) -> f64 {
    let s = (0.5 * PI * u).sin();
    s * s
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Random bits packed most-significant first.
struct BitStream {
    words: Vec<u64>,
}

impl BitStream {
    fn random<R: Rng + ?Sized>(nbits: usize, rng: &mut R) -> Self {
        let words = (0..nbits / 64 + 2).map(|_| rng.random::<u64>()).collect();
        BitStream { words }
    }

    /// Bit `j`, counting from 1.
    fn bit(&self, j: usize) -> bool {
        let k = j - 1;
        (self.words[k / 64] >> (63 - k % 64)) & 1 == 1
    }

    /// Bits `j+1 ..= j+64` as a word, bit `j+1` most significant.
    fn window(&self, j: usize) -> u64 {
        let (q, r) = (j / 64, j % 64);
        if r == 0 {
            self.words[q]
        } else {
            (self.words[q] << r) | (self.words[q + 1] >> (64 - r))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn step_examples() {
        assert_eq!(DynamicalSystem::tent().step(&[0.25]).unwrap(), vec![0.5]);
        assert_eq!(DynamicalSystem::logistic4().step(&[0.5]).unwrap(), vec![1.0]);
        let z = DynamicalSystem::circle2().step(&[0.0, 1.0]).unwrap();
        assert!((z[0] + 1.0).abs() < 1e-15 && z[1].abs() < 1e-15);
    }

    #[test]
    fn step_rejects_out_of_domain() {
        let err = DynamicalSystem::tent().step(&[1.5]).unwrap_err();
        assert!(err.to_string().contains("coordinate 0"), "{err}");
        assert!(DynamicalSystem::circle2().step(&[0.5, 0.5]).is_err());
        assert!(DynamicalSystem::tent().step(&[f64::NAN]).is_err());
        assert!(matches!(
            DynamicalSystem::tent().step(&[0.1, 0.2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn trajectory_examples() {
        let t = DynamicalSystem::tent().trajectory(&[0.2], 3).unwrap();
        let v = t.column(0);
        assert!((v[1] - 0.4).abs() < 1e-15 && (v[2] - 0.8).abs() < 1e-15);
        assert_eq!(DynamicalSystem::tent().trajectory(&[0.3], 1).unwrap().len(), 1);

        let rot = DynamicalSystem::rotation(0.25);
        let t = rot.trajectory(&from_angle(0.0), 4).unwrap();
        for (i, z) in t.rows().enumerate() {
            assert!((angle(z) - 0.25 * i as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn typical_orbits_follow_the_map() {
        for (sys, tol) in [
            (DynamicalSystem::tent(), 1e-15),
            (DynamicalSystem::logistic4(), 1e-14),
            (DynamicalSystem::circle2(), 1e-14),
            (DynamicalSystem::rotation(golden_rotation()), 1e-14),
        ] {
            let orbit = sys.sample_orbit(5000, &mut rng::seeded(3));
            for i in 0..orbit.len() - 1 {
                let fx = sys.step(orbit.row(i)).unwrap();
                let err = euclid(&fx, orbit.row(i + 1));
                assert!(err <= tol, "{} step {i}: {err}", sys.name());
            }
        }
    }

    #[test]
    fn typical_tent_orbit_does_not_collapse() {
        let orbit = DynamicalSystem::tent().sample_orbit(100_000, &mut rng::seeded(5));
        let tail = &orbit.column(0)[90_000..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
    }

    #[test]
    fn burn_in_sampler_on_rotation() {
        let sys = DynamicalSystem::rotation(golden_rotation()).with_sampler(InvariantSampler::BurnIn(1000));
        let mut r = rng::seeded(11);
        let m = 20_000;
        let mean: f64 = (0..m).map(|_| sys.sample_invariant(&mut r)[0]).sum::<f64>() / m as f64;
        assert!(mean.abs() < 3.0 * (0.5f64 / m as f64).sqrt() * 1.5);
        let x = sys.sample_invariant(&mut r);
        assert!(sys.contains(&x));
    }

    #[test]
    fn decay_model_parsing() {
        assert_eq!(
            "exp:0.5:1".parse::<DecayModel>().unwrap(),
            DecayModel::Exponential { rate: 0.5, kappa: 1.0 }
        );
        assert_eq!("none".parse::<DecayModel>().unwrap(), DecayModel::None);
        assert!("exp:1.5:1".parse::<DecayModel>().is_err());
        assert!("poly:2".parse::<DecayModel>().is_err());
        let p: DecayModel = "poly:2:0.5".parse().unwrap();
        assert!((p.gamma(1).unwrap() - 0.125).abs() < 1e-15);
        assert!(p.summable());
        assert!(!DecayModel::Polynomial { power: 0.5, kappa: 1.0 }.summable());
    }

    #[test]
    fn exponential_partial_sum_matches_direct_sum() {
        let g = DecayModel::Exponential { rate: 0.6, kappa: 0.25 };
        let direct: f64 = (0..37).map(|i| g.gamma(i).unwrap()).sum();
        assert!((g.partial_sum(37).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn dominating_envelope_dominates() {
        let a = DecayModel::Exponential { rate: 0.9, kappa: 2.0 };
        let b = DecayModel::Polynomial { power: 1.5, kappa: 0.1 };
        let c = DecayModel::dominating(a, b);
        for i in 0..500 {
            let g = c.gamma(i).unwrap();
            assert!(g >= a.gamma(i).unwrap() * (1.0 - 1e-12));
            assert!(g >= b.gamma(i).unwrap() * (1.0 - 1e-12));
        }
        assert_eq!(DecayModel::dominating(a, DecayModel::None), DecayModel::None);
    }

    #[test]
    fn system_names_round_trip() {
        for name in ["tent", "logistic4", "circle2", "rotation"] {
            assert_eq!(name.parse::<DynamicalSystem>().unwrap().name(), name);
        }
        assert!("henon".parse::<DynamicalSystem>().is_err());
    }
}

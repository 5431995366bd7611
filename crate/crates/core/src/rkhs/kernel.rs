use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::Rng;
use rayon::prelude::*;

use crate::{Error, Result, Series};

/// `k_σ(x, x') = exp(−σ² ‖x − x'‖²)`.
#[inline]
pub fn kernel(sigma: f64, x: &[f64], y: &[f64]) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-sigma * sigma * d2).exp()
}

pub fn gram(sigma: f64, points: &Series) -> DMatrix<f64> {
    let n = points.len();
    let mut k = DMatrix::from_element(n, n, 1.0);
    for i in 0..n {
        for j in 0..i {
            let v = kernel(sigma, points.row(i), points.row(j));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// `K[i][j] = k_σ(a_i, b_j)`.
pub fn cross_gram(sigma: f64, a: &Series, b: &Series) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| kernel(sigma, a.row(i), b.row(j)))
}

/// Cholesky factor of `m`, retried once with `1e−10 · trace/n` added to
/// the diagonal. Returns the factor and the jitter used.
pub fn cholesky_with_jitter(m: DMatrix<f64>) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let n = m.nrows();
    if let Some(c) = Cholesky::new(m.clone()) {
        return Ok((c, 0.0));
    }
    let jitter = 1e-10 * m.trace() / n.max(1) as f64;
    let mut m = m;
    for i in 0..n {
        m[(i, i)] += jitter;
    }
    Cholesky::new(m)
        .map(|c| (c, jitter))
        .ok_or_else(|| Error::Numerical(format!("Gram factorization failed after jitter {jitter:e}")))
}

/// `Σ_ij w_i w_j k_σ(x_i, x_j)`, summed in a fixed order.
pub fn quadratic_form(sigma: f64, points: &Series, weights: &[f64]) -> f64 {
    assert_eq!(points.len(), weights.len(), "one weight per point");
    let n = points.len();
    let s2 = sigma * sigma;
    let flat = points.as_flat();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let s = if points.dim() == 1 {
                // same order as the general loop, without per-row slicing
                let xi = flat[i];
                flat[..i]
                    .iter()
                    .zip(&weights[..i])
                    .fold(0.0, |s, (xj, wj)| s + wj * (-s2 * ((xi - xj) * (xi - xj))).exp())
            } else {
                let xi = points.row(i);
                (0..i).fold(0.0, |s, j| s + weights[j] * kernel(sigma, xi, points.row(j)))
            };
            weights[i] * (weights[i] + 2.0 * s)
        })
        .collect();
    rows.iter().sum()
}

/// `f = Σ_i c_i k_σ(p_i, ·)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelExpansion {
    sigma: f64,
    points: Series,
    coeffs: Vec<f64>,
}

impl KernelExpansion {
    pub fn new(sigma: f64, points: Series, coeffs: Vec<f64>) -> Result<Self> {
        if points.len() != coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: coeffs.len(),
            });
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("kernel width {sigma} must be positive")));
        }
        Ok(KernelExpansion { sigma, points, coeffs })
    }

    pub fn zero(sigma: f64, dim: usize) -> Self {
        KernelExpansion {
            sigma,
            points: Series::new(dim),
            coeffs: Vec::new(),
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn points(&self) -> &Series {
        &self.points
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if let [x0] = x {
            let s2 = self.sigma * self.sigma;
            return self
                .points
                .as_flat()
                .iter()
                .zip(&self.coeffs)
                .fold(0.0, |s, (p, c)| s + c * (-s2 * ((p - x0) * (p - x0))).exp());
        }
        self.points
            .rows()
            .zip(&self.coeffs)
            .map(|(p, c)| c * kernel(self.sigma, p, x))
            .sum()
    }

    pub fn eval_many(&self, xs: &Series) -> Vec<f64> {
        (0..xs.len()).into_par_iter().map(|i| self.eval(xs.row(i))).collect()
    }

    /// `‖f‖²_H = cᵀ K c`.
    pub fn norm_sq(&self) -> f64 {
        quadratic_form(self.sigma, &self.points, &self.coeffs).max(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `√2 σ ‖f‖_H`, a Lipschitz constant of `f`.
    pub fn lipschitz_bound(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.sigma * self.norm()
    }

    /// `f − g` as one expansion over the concatenated points.
    pub fn difference(&self, other: &KernelExpansion) -> Result<KernelExpansion> {
        if self.sigma != other.sigma {
            return Err(Error::Config("expansions have different kernel widths".into()));
        }
        let mut data = self.points.as_flat().to_vec();
        data.extend_from_slice(other.points.as_flat());
        let mut coeffs = self.coeffs.clone();
        coeffs.extend(other.coeffs.iter().map(|c| -c));
        KernelExpansion::new(self.sigma, Series::from_flat(self.dim(), data), coeffs)
    }

    /// Largest `|f(x) − f(x')| / ‖x − x'‖` over random pairs in the box
    /// `[lo, hi]`; half the pairs are independent, half are local.
    pub fn empirical_lipschitz<R: Rng + ?Sized>(&self, pairs: usize, lo: &[f64], hi: &[f64], rng: &mut R) -> f64 {
        let d = self.dim();
        let mut xs = Series::with_capacity(d, 2 * pairs);
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        for k in 0..pairs {
            for j in 0..d {
                x[j] = lo[j] + (hi[j] - lo[j]) * rng.random::<f64>();
            }
            if k % 2 == 0 {
                for j in 0..d {
                    y[j] = lo[j] + (hi[j] - lo[j]) * rng.random::<f64>();
                }
            } else {
                let h = 10f64.powf(-4.0 + 3.0 * rng.random::<f64>()) / self.sigma;
                for j in 0..d {
                    y[j] = x[j] + h * (2.0 * rng.random::<f64>() - 1.0);
                }
            }
            xs.push(&x);
            xs.push(&y);
        }
        let f = self.eval_many(&xs);
        (0..pairs)
            .filter_map(|k| {
                let (a, b) = (xs.row(2 * k), xs.row(2 * k + 1));
                let dist = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
                (dist > 0.0).then(|| (f[2 * k] - f[2 * k + 1]).abs() / dist)
            })
            .fold(0.0, f64::max)
    }
}

//! The orthonormal basis `e_n(x) = sqrt(2ⁿσ²ⁿ/n!) xⁿ e^{−σ²x²}` of the
//! Gaussian RKHS on the real line and its tensor products.

use std::f64::consts::{E, LN_2, PI};

use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// `½ ln(2ⁿσ²ⁿ/n!)`.
fn ln_coeff(n: usize, sigma: f64) -> f64 {
    let nf = n as f64;
    0.5 * (nf * LN_2 + 2.0 * nf * sigma.ln() - ln_gamma(nf + 1.0))
}

/// `e_n(x)`, evaluated as sign times `exp(ln|e_n(x)|)`.
pub fn eval(n: usize, sigma: f64, x: f64) -> f64 {
    if n == 0 {
        return (-sigma * sigma * x * x).exp();
    }
    if x == 0.0 {
        return 0.0;
    }
    let ln_abs = ln_coeff(n, sigma) + n as f64 * x.abs().ln() - sigma * sigma * x * x;
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    sign * ln_abs.exp()
}

/// `e_η(x) = Π_j e_{η_j}(x_j)`.
pub fn eval_multi(eta: &[usize], sigma: f64, x: &[f64]) -> f64 {
    assert_eq!(eta.len(), x.len(), "multi-index and point dimensions differ");
    eta.iter().zip(x).map(|(&n, &xj)| eval(n, sigma, xj)).product()
}

/// `e_0(x), …, e_m(x)` by the recursion `e_n = e_{n−1} · x sqrt(2σ²/n)`.
pub fn features_1d(sigma: f64, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = (-sigma * sigma * x * x).exp();
    let s = 2.0 * sigma * sigma;
    for n in 1..out.len() {
        out[n] = out[n - 1] * x * (s / n as f64).sqrt();
    }
}

/// Exact `‖e_n‖_∞` on `[−a, a]`: the extremum sits at `±sqrt(n/(2σ²))`,
/// or at `±a` when that lies outside.
pub fn sup_norm(n: usize, sigma: f64, a: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let xstar = (n as f64 / (2.0 * sigma * sigma)).sqrt().min(a);
    eval(n, sigma, xstar).abs()
}

/// `‖e_n‖_∞` on `[−a, a]` over `points` equispaced nodes plus the analytic
/// critical points.
pub fn grid_sup_norm(n: usize, sigma: f64, a: f64, points: usize) -> f64 {
    let points = points.max(2);
    let mut best = (0..points)
        .map(|k| -a + 2.0 * a * k as f64 / (points - 1) as f64)
        .map(|x| eval(n, sigma, x).abs())
        .fold(0.0, f64::max);
    let xstar = (n as f64 / (2.0 * sigma * sigma)).sqrt();
    if xstar <= a {
        best = best.max(eval(n, sigma, xstar).abs());
    }
    best
}

/// `Σ_{n>m} ‖e_n‖²_∞` on `[−a, a]`.
pub fn tail_sup_sq(m: usize, sigma: f64, a: f64) -> f64 {
    let mut sum = 0.0;
    let mut n = m + 1;
    loop {
        let t = sup_norm(n, sigma, a).powi(2);
        sum += t;
        if n as f64 > 2.0 * a * a * sigma * sigma + 1.0 && t <= 1e-18 * sum.max(f64::MIN_POSITIVE) {
            break;
        }
        if t == 0.0 && n as f64 > 2.0 * a * a * sigma * sigma {
            break;
        }
        n += 1;
    }
    sum
}

/// `Σ_{n≤m} ‖e_n‖²_∞` on `[−a, a]`.
pub fn head_sup_sq(m: usize, sigma: f64, a: f64) -> f64 {
    (0..=m).map(|n| sup_norm(n, sigma, a).powi(2)).sum()
}

/// `Σ_{η: ∃i η_i > m} ‖e_η‖²_∞` on `[−a, a]^d`, without cancellation.
pub fn tail_sup_sq_multi(m: usize, sigma: f64, a: f64, d: usize) -> f64 {
    let tail = tail_sup_sq(m, sigma, a);
    let head = head_sup_sq(m, sigma, a);
    // (head + tail)^d − head^d = Σ_{k≥1} C(d,k) tail^k head^{d−k}
    let mut binom = 1.0;
    let mut total = 0.0;
    for k in 1..=d {
        binom *= (d - k + 1) as f64 / k as f64;
        total += binom * tail.powi(k as i32) * head.powi((d - k) as i32);
    }
    total
}

/// `Σ_{n>m} e_n(x)²`, a Poisson upper tail with mean `2σ²x²`.
pub fn tail_sq_at(m: usize, sigma: f64, x: f64) -> f64 {
    let u = 2.0 * sigma * sigma * x * x;
    if u == 0.0 {
        return 0.0;
    }
    let mut n = m + 1;
    let mut term = eval(n, sigma, x).powi(2);
    let mut sum = 0.0;
    loop {
        sum += term;
        n += 1;
        if n as f64 > u + 1.0 && term <= 1e-18 * sum {
            break;
        }
        term *= u / n as f64;
        if term == 0.0 && n as f64 > u {
            break;
        }
    }
    sum
}

/// `|1 − Σ_{η ≤ m} e_η(x)²|`, computed through the complementary tail so the
/// result keeps relative accuracy when it is tiny.
pub fn parseval_residual(x: &[f64], sigma: f64, m: usize) -> f64 {
    // Σ_η e_η(x)² = Π_j Σ_n e_n(x_j)² = 1, so 1 − head = 1 − Π_j (1 − tail_j)
    let log_head: f64 = x.iter().map(|&xj| (-tail_sq_at(m, sigma, xj)).ln_1p()).sum();
    (-log_head.exp_m1()).abs()
}

/// The same residual summed directly over the head of the basis.
pub fn parseval_residual_direct(x: &[f64], sigma: f64, m: usize) -> f64 {
    let mut head = 1.0;
    let mut buf = vec![0.0; m + 1];
    for &xj in x {
        features_1d(sigma, xj, &mut buf);
        head *= buf.iter().map(|v| v * v).sum::<f64>();
    }
    (1.0 - head).abs()
}

/// `(2πn)^{−1/4}`, valid for `n ≥ 1`.
pub fn supnorm_bound(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Regime {
            bound: "sup-norm bound",
            requirement: "n ≥ 1".into(),
        });
    }
    Ok((2.0 * PI * n as f64).powf(-0.25))
}

/// `sqrt(2ⁿa²ⁿσ²ⁿ/n!) e^{−a²σ²}`, valid for `n ≥ 2a²σ²`.
pub fn large_n_bound(n: usize, sigma: f64, a: f64) -> Result<f64> {
    let threshold = 2.0 * a * a * sigma * sigma;
    if (n as f64) < threshold {
        return Err(Error::Regime {
            bound: "large-n sup-norm bound",
            requirement: format!("n ≥ 2a²σ² = {threshold}"),
        });
    }
    let nf = n as f64;
    Ok((ln_coeff(n, sigma) + nf * a.ln() - a * a * sigma * sigma).exp())
}

/// Square root of `Σ_{η: ∃i η_i > n} ‖e_η‖²_∞` is at most
/// `√d e^{−a²σ²} (6aσ)^{(d−1)/2} (2/(π(n+1)))^{1/4} 2^{−(n+1)}`,
/// valid for `n ≥ 8ea²σ²` (and `aσ ≥ 1` when `d ≥ 2`).
pub fn tail_bound(n: usize, sigma: f64, a: f64, d: usize) -> Result<f64> {
    let threshold = 8.0 * E * a * a * sigma * sigma;
    if (n as f64) < threshold {
        return Err(Error::Regime {
            bound: "tail bound",
            requirement: format!("n ≥ 8ea²σ² = {threshold}"),
        });
    }
    if d >= 2 && a * sigma < 1.0 {
        return Err(Error::Regime {
            bound: "multivariate tail bound",
            requirement: format!("aσ ≥ 1, got {}", a * sigma),
        });
    }
    let n1 = (n + 1) as f64;
    let one_d = (2.0 / (PI * n1)).powf(0.25) * (-(n1 * LN_2) - a * a * sigma * sigma).exp();
    Ok((d as f64).sqrt() * (6.0 * a * sigma).powf((d as f64 - 1.0) / 2.0) * one_d)
}

/// `sqrt(Σ_n ‖e_n‖²_∞) ≤ √(6aσ)`, valid for `aσ ≥ 1`.
pub fn sum_bound(sigma: f64, a: f64) -> Result<f64> {
    if a * sigma < 1.0 {
        return Err(Error::Regime {
            bound: "sum bound",
            requirement: format!("aσ ≥ 1, got {}", a * sigma),
        });
    }
    Ok((6.0 * a * sigma).sqrt())
}

/// All four bounds at once; entries outside their regime are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnbBounds {
    pub supnorm: Option<f64>,
    pub large_n: Option<f64>,
    pub tail: Option<f64>,
    pub sum: Option<f64>,
}

pub fn onb_bounds(n: usize, sigma: f64, a: f64, d: usize) -> OnbBounds {
    OnbBounds {
        supnorm: supnorm_bound(n).ok(),
        large_n: large_n_bound(n, sigma, a).ok(),
        tail: tail_bound(n, sigma, a, d).ok(),
        sum: sum_bound(sigma, a).ok(),
    }
}

/// Smallest `m` whose multivariate sup-norm tail on `[−a, a]^d` is at most
/// `tol`.
pub fn truncation_for(sigma: f64, a: f64, d: usize, tol: f64) -> usize {
    let mut m = (2.0 * a * a * sigma * sigma).ceil() as usize;
    while tail_sup_sq_multi(m, sigma, a, d) > tol {
        m += 1;
    }
    m
}

/// Odometer over `{0, …, m}^d` in lexicographic order.
pub fn multi_indices(m: usize, d: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (m + 1).pow(d as u32);
    (0..total).map(move |mut k| {
        let mut eta = vec![0; d];
        for j in (0..d).rev() {
            eta[j] = k % (m + 1);
            k /= m + 1;
        }
        eta
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeroth_function_is_the_gaussian() {
        for x in [-0.7, 0.0, 0.3] {
            assert!((eval(0, 1.3, x) - (-1.69 * x * x).exp()).abs() < 1e-15);
        }
        assert_eq!(eval(0, 1.0, 0.0), 1.0);
    }

    #[test]
    fn first_function_peak() {
        let v = eval(1, 1.0, std::f64::consts::FRAC_1_SQRT_2);
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        assert!((eval_multi(&[1, 0], 1.0, &[std::f64::consts::FRAC_1_SQRT_2, 0.0]) - v).abs() < 1e-15);
        assert!((sup_norm(1, 1.0, 1.0) - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn log_form_matches_recursion_and_survives_large_n() {
        let mut buf = vec![0.0; 151];
        features_1d(1.5, -0.8, &mut buf);
        // the log form loses about one ulp per unit of |ln e_n|
        for (n, v) in buf.iter().enumerate() {
            let tol = 1e-14 * (1.0 + v.abs().ln().abs()) * v.abs().max(1e-300);
            assert!((eval(n, 1.5, -0.8) - v).abs() <= tol, "n={n}");
        }
        let big = eval(10_000, 1.0, (5000f64).sqrt());
        assert!(big.is_finite() && big > 0.0);
        assert!(big <= supnorm_bound(10_000).unwrap());
    }

    #[test]
    fn regime_errors_name_thresholds() {
        assert!(supnorm_bound(0).is_err());
        let e = large_n_bound(1, 1.0, 1.0).unwrap_err();
        assert!(e.to_string().contains("2a²σ²"));
        let e = tail_bound(10, 1.0, 1.0, 1).unwrap_err();
        assert!(e.to_string().contains("8ea²σ²"));
        assert!(sum_bound(0.5, 1.0).is_err());
        assert!(tail_bound(22, 1.0, 1.0, 1).is_ok());
    }

    #[test]
    fn parseval_tail_form_agrees_with_direct_sum() {
        for &(x, sigma, m) in &[(0.7, 1.0, 5usize), (0.3, 2.0, 3), (-0.9, 1.0, 8)] {
            let a = parseval_residual(&[x], sigma, m);
            let b = parseval_residual_direct(&[x], sigma, m);
            assert!((a - b).abs() < 1e-14 + 1e-10 * a, "{a} {b}");
        }
        let a = parseval_residual(&[0.4, -0.6], 1.2, 4);
        let b = parseval_residual_direct(&[0.4, -0.6], 1.2, 4);
        assert!((a - b).abs() < 1e-14);
        assert_eq!(parseval_residual(&[0.0], 1.0, 0), 0.0);
        assert!(parseval_residual(&[0.7], 1.0, 30) <= 1e-6);
    }

    #[test]
    fn multivariate_tail_matches_brute_force() {
        let (sigma, a, m) = (1.0, 1.0, 6);
        let per: Vec<f64> = (0..=80).map(|n| sup_norm(n, sigma, a).powi(2)).collect();
        let mut brute = 0.0;
        for i in 0..=80 {
            for j in 0..=80 {
                if i > m || j > m {
                    brute += per[i] * per[j];
                }
            }
        }
        assert!((tail_sup_sq_multi(m, sigma, a, 2) - brute).abs() < 1e-14);
    }

    #[test]
    fn multi_index_enumeration() {
        let all: Vec<Vec<usize>> = multi_indices(2, 2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[5], vec![1, 2]);
    }
}

//! Regularized empirical risk minimization over the Gaussian RKHS:
//! minimize `λ‖f‖²_H + (1/n) Σ ρψ(y_i − f(x_i))`.
//!
//! Three solvers are provided. [`solve_least_squares`] solves the normal
//! equations of the least-squares problem. [`solve_general`] runs
//! preconditioned gradient descent on the expansion coefficients for any
//! differentiable loss. [`solve_features`] minimizes over the span of a
//! truncated orthonormal basis instead of the kernel sections, which is much
//! cheaper when `n` is large and the dimension small; its solution is mapped
//! back to kernel coefficients through the stationarity condition
//! `α_j = ρψ'(r_j) / (2nλ)`.

use nalgebra::{DMatrix, DVector};

use crate::losses::LossSpec;
use crate::rkhs::{self, cholesky_with_jitter, onb, KernelExpansion, WeightedSample};
use crate::{Error, Result, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct SvmProblem {
    inputs: Series,
    outputs: Vec<f64>,
    loss: LossSpec,
    lambda: f64,
    sigma: f64,
}

impl SvmProblem {
    pub fn new(inputs: Series, outputs: Vec<f64>, loss: LossSpec, lambda: f64, sigma: f64) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Config("training set is empty".into()));
        }
        if inputs.len() != outputs.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                got: outputs.len(),
            });
        }
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::Config(format!("λ = {lambda} not in (0, 1]")));
        }
        if !(sigma >= 1.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("σ = {sigma} must be at least 1")));
        }
        if inputs.as_flat().iter().chain(&outputs).any(|v| !v.is_finite()) {
            return Err(Error::Config("training data contain non-finite values".into()));
        }
        if let Some(y) = outputs.iter().find(|&&y| loss.value(y) > 1.0 + 1e-12) {
            return Err(Error::Assumption(format!(
                "L(y, 0) = {} > 1 at y = {y}; rescale the loss to the output range",
                loss.value(*y)
            )));
        }
        Ok(SvmProblem {
            inputs,
            outputs,
            loss,
            lambda,
            sigma,
        })
    }

    pub fn inputs(&self) -> &Series {
        &self.inputs
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn loss(&self) -> &LossSpec {
        &self.loss
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    fn risk_of(&self, f: &[f64]) -> f64 {
        let n = self.len() as f64;
        self.outputs
            .iter()
            .zip(f)
            .map(|(y, fx)| self.loss.value(y - fx))
            .sum::<f64>()
            / n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    ClosedForm,
    Descent,
    /// Truncated basis `{0..m}^d`.
    Features { truncation: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverInfo {
    pub method: SolverMethod,
    pub iterations: usize,
    /// Gradient size at the returned point: its H-norm for descent, the
    /// sup-norm of the basis coefficients' gradient for the feature solver.
    pub gradient_norm: f64,
    pub jitter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmSolution {
    pub expansion: KernelExpansion,
    /// `λ‖f‖² + R_{L,T}(f)` at the returned expansion.
    pub objective: f64,
    pub lambda: f64,
    pub loss: LossSpec,
    pub info: SolverInfo,
}

impl SvmSolution {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.expansion.eval(x)
    }

    pub fn norm(&self) -> f64 {
        self.expansion.norm()
    }

    /// `h_λ(x, y) = L'(y, f(x)) = −ρψ'(y − f(x))`.
    pub fn h_lambda(&self, x: &[f64], y: f64) -> f64 {
        h_lambda(&self.expansion, &self.loss, x, y)
    }
}

/// `L'(y, f(x)) = −ρψ'(y − f(x))`.
pub fn h_lambda(f: &KernelExpansion, loss: &LossSpec, x: &[f64], y: f64) -> f64 {
    -loss.derivative(y - f.eval(x))
}

/// `λ‖f‖²_H + (1/n) Σ ρψ(y_i − f(x_i))` for an expansion over the inputs.
pub fn objective_eval(problem: &SvmProblem, f: &KernelExpansion) -> f64 {
    let fx = f.eval_many(&problem.inputs);
    problem.lambda * f.norm_sq() + problem.risk_of(&fx)
}

/// Closed form for least squares: `(ρK + nλI)α = ρy`.
pub fn solve_least_squares(problem: &SvmProblem) -> Result<SvmSolution> {
    if !problem.loss.is_least_squares() {
        return Err(Error::Unsupported(format!(
            "closed-form solve needs the least-squares loss, got {}",
            problem.loss
        )));
    }
    let n = problem.len();
    let rho = problem.loss.rescale();
    let mut a = rkhs::gram(problem.sigma, &problem.inputs);
    a.scale_mut(rho);
    for i in 0..n {
        a[(i, i)] += n as f64 * problem.lambda;
    }
    let (chol, jitter) = cholesky_with_jitter(a)?;
    let rhs = DVector::from_iterator(n, problem.outputs.iter().map(|y| rho * y));
    let alpha = chol.solve(&rhs);
    if alpha.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("least-squares solve produced non-finite coefficients".into()));
    }
    finish(
        problem,
        alpha.as_slice().to_vec(),
        SolverInfo {
            method: SolverMethod::ClosedForm,
            iterations: 1,
            gradient_norm: 0.0,
            jitter,
        },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentOptions {
    /// Target bound on `‖f − f*‖_H`, certified through strong convexity:
    /// the objective is `2λ`-strongly convex, so
    /// `‖f − f*‖_H ≤ ‖∇J(f)‖_H / (2λ)`. Since `k(x, x) = 1` this also bounds
    /// the sup-norm distance of the predictions.
    pub gradient_tol: f64,
    /// Stop after this many iterations without a new smallest gradient.
    pub stall_iterations: usize,
    pub max_iterations: usize,
    pub armijo_factor: f64,
    pub sufficient_decrease: f64,
    /// Number of past objective values the line search compares against.
    pub memory: usize,
    /// Starting coefficients; zero when absent.
    pub initial: Option<Vec<f64>>,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            gradient_tol: 1e-9,
            stall_iterations: 500,
            max_iterations: 100_000,
            armijo_factor: 0.5,
            sufficient_decrease: 1e-4,
            memory: 10,
            initial: None,
        }
    }
}

fn matvec(k: &DMatrix<f64>, v: &[f64], out: &mut [f64]) {
    let n = v.len();
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += k[(j, i)] * v[j];
        }
        out[i] = s;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradient descent in the RKHS metric with Barzilai–Borwein initial steps
/// and non-monotone Armijo backtracking.
///
/// With `f = Kα` and `r = y − f`, the coefficient gradient of the objective is
/// `K g` where `g = 2λα − (1/n) ρψ'(r)`; the search direction is `−g`.
pub fn solve_general(problem: &SvmProblem, opts: &DescentOptions) -> Result<SvmSolution> {
    let n = problem.len();
    let nf = n as f64;
    let lambda = problem.lambda;
    let loss = &problem.loss;
    let y = &problem.outputs;
    let k = rkhs::gram(problem.sigma, &problem.inputs);

    let mut alpha = match &opts.initial {
        Some(a) if a.len() == n => a.clone(),
        Some(a) => {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.len(),
            })
        }
        None => vec![0.0; n],
    };
    let mut f = vec![0.0; n];
    matvec(&k, &alpha, &mut f);

    let objective = |alpha: &[f64], f: &[f64]| -> f64 {
        lambda * dot(alpha, f) + problem.risk_of(f)
    };
    let grad = |alpha: &[f64], f: &[f64], g: &mut [f64]| {
        for i in 0..n {
            g[i] = 2.0 * lambda * alpha[i] - loss.derivative(y[i] - f[i]) / nf;
        }
    };

    let mut g = vec![0.0; n];
    let mut kg = vec![0.0; n];
    grad(&alpha, &f, &mut g);
    matvec(&k, &g, &mut kg);
    let mut obj = objective(&alpha, &f);
    let mut recent = std::collections::VecDeque::from([obj]);
    let mut step = 1.0 / (2.0 * lambda + 2.0 * loss.rescale());
    let mut best = f64::INFINITY;
    let mut since_best = 0;
    let mut trial_alpha = vec![0.0; n];
    let mut trial_f = vec![0.0; n];
    let target = 2.0 * lambda * opts.gradient_tol;

    for it in 0..opts.max_iterations {
        // ‖∇J‖²_H = gᵀKg
        let slope = dot(&g, &kg);
        let hgrad = slope.max(0.0).sqrt();
        if hgrad < best {
            best = hgrad;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if hgrad <= target || since_best >= opts.stall_iterations || slope <= 0.0 {
            return finish(
                problem,
                alpha,
                SolverInfo {
                    method: SolverMethod::Descent,
                    iterations: it,
                    gradient_norm: hgrad,
                    jitter: 0.0,
                },
            );
        }

        // non-monotone Armijo test against the worst recent objective, with
        // room for rounding once decreases reach machine precision
        let reference = recent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let slack = 8.0 * f64::EPSILON * reference.abs();
        let mut t = step;
        let mut accepted = false;
        for _ in 0..200 {
            for i in 0..n {
                trial_alpha[i] = alpha[i] - t * g[i];
                trial_f[i] = f[i] - t * kg[i];
            }
            let trial = objective(&trial_alpha, &trial_f);
            if trial <= reference - opts.sufficient_decrease * t * slope + slack {
                obj = trial;
                accepted = true;
                break;
            }
            t *= opts.armijo_factor;
        }
        if !accepted {
            since_best = opts.stall_iterations;
            continue;
        }
        recent.push_back(obj);
        if recent.len() > opts.memory.max(1) {
            recent.pop_front();
        }
        std::mem::swap(&mut alpha, &mut trial_alpha);
        std::mem::swap(&mut f, &mut trial_f);
        // refresh f against drift from incremental updates
        if it % 64 == 63 {
            matvec(&k, &alpha, &mut f);
            obj = objective(&alpha, &f);
            *recent.back_mut().unwrap() = obj;
        }
        let old_g = g.clone();
        let old_kg = kg.clone();
        grad(&alpha, &f, &mut g);
        matvec(&k, &g, &mut kg);

        // Barzilai–Borwein step in the H-metric: s = −t g_old, Δg = g − g_old,
        // ⟨s,s⟩_H/⟨s,Δg⟩_H = t ⟨g_old,Kg_old⟩ / ⟨g_old, K g_old − K g⟩
        let sks = dot(&old_g, &old_kg);
        let sky: f64 = old_g.iter().zip(&old_kg).zip(&kg).map(|((a, b), c)| a * (b - c)).sum();
        step = if sky > 0.0 && sks > 0.0 {
            (t * sks / sky).min(1e12)
        } else {
            2.0 * t
        };
    }
    let slope = dot(&g, &kg);
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        gradient_norm: slope.max(0.0).sqrt(),
        last_iterate: alpha,
    })
}

fn finish(problem: &SvmProblem, alpha: Vec<f64>, info: SolverInfo) -> Result<SvmSolution> {
    let expansion = KernelExpansion::new(problem.sigma, problem.inputs.clone(), alpha)?;
    let objective = objective_eval(problem, &expansion);
    Ok(SvmSolution {
        expansion,
        objective,
        lambda: problem.lambda,
        loss: problem.loss,
        info,
    })
}

/// Options for the truncated-basis solver.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureOptions {
    /// Bound on the sup-norm tail `Σ_{η∉{0..m}^d} ‖e_η‖²_∞`.
    pub tail_tol: f64,
    /// Refuse bases with more functions than this.
    pub max_features: usize,
    pub gradient_tol: f64,
    pub max_iterations: usize,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            tail_tol: 1e-30,
            max_features: 1024,
            gradient_tol: 1e-13,
            max_iterations: 200,
        }
    }
}

/// Center and truncation level used by the feature solver.
pub fn feature_plan(inputs: &Series, sigma: f64, tail_tol: f64) -> (Vec<f64>, usize, usize) {
    let d = inputs.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for x in inputs.rows() {
        for j in 0..d {
            lo[j] = lo[j].min(x[j]);
            hi[j] = hi[j].max(x[j]);
        }
    }
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let a = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| 0.5 * (h - l))
        .fold(0.0_f64, f64::max)
        .max(1e-3);
    let m = onb::truncation_for(sigma, a, d, tail_tol);
    (center, m, (m + 1).pow(d as u32))
}

fn feature_matrix(inputs: &Series, center: &[f64], sigma: f64, m: usize) -> DMatrix<f64> {
    let d = inputs.dim();
    let k = m + 1;
    let cols = k.pow(d as u32);
    let mut phi = DMatrix::zeros(inputs.len(), cols);
    let mut feats = vec![vec![0.0; k]; d];
    for (i, x) in inputs.rows().enumerate() {
        for j in 0..d {
            onb::features_1d(sigma, x[j] - center[j], &mut feats[j]);
        }
        for c in 0..cols {
            let mut rest = c;
            let mut v = 1.0;
            for j in (0..d).rev() {
                v *= feats[j][rest % k];
                rest /= k;
            }
            phi[(i, c)] = v;
        }
    }
    phi
}

/// Minimizes over `span{e_η : η ∈ {0..m}^d}` (in coordinates centered on
/// the input box) by Newton's method with Armijo backtracking.
pub fn solve_features(problem: &SvmProblem, opts: &FeatureOptions) -> Result<SvmSolution> {
    let (center, m, cols) = feature_plan(&problem.inputs, problem.sigma, opts.tail_tol);
    if cols > opts.max_features {
        return Err(Error::Unsupported(format!(
            "feature solver needs {cols} basis functions, more than {}",
            opts.max_features
        )));
    }
    let n = problem.len();
    let nf = n as f64;
    let lambda = problem.lambda;
    let loss = &problem.loss;
    let y = DVector::from_column_slice(&problem.outputs);
    let phi = feature_matrix(&problem.inputs, &center, problem.sigma, m);
    let phit = phi.transpose();

    let objective = |w: &DVector<f64>, f: &DVector<f64>| -> f64 {
        lambda * w.norm_squared()
            + y.iter().zip(f.iter()).map(|(yi, fi)| loss.value(yi - fi)).sum::<f64>() / nf
    };

    let mut w = DVector::zeros(cols);
    let mut f = DVector::zeros(n);
    let mut iterations = 0;
    let mut gnorm = f64::INFINITY;
    let mut jitter = 0.0;
    for it in 0..opts.max_iterations {
        iterations = it;
        let dpsi = DVector::from_iterator(n, y.iter().zip(f.iter()).map(|(yi, fi)| loss.derivative(yi - fi)));
        let grad = &w * (2.0 * lambda) - (&phit * dpsi) / nf;
        gnorm = grad.amax();
        if gnorm <= opts.gradient_tol {
            break;
        }
        let d2 = DVector::from_iterator(
            n,
            y.iter().zip(f.iter()).map(|(yi, fi)| loss.second_derivative(yi - fi) / nf),
        );
        let mut scaled = phi.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row *= d2[i];
        }
        let mut hess = &phit * scaled;
        for c in 0..cols {
            hess[(c, c)] += 2.0 * lambda;
        }
        let (chol, j) = cholesky_with_jitter(hess)?;
        jitter = j;
        let dir = -chol.solve(&grad);
        let dfx = &phi * &dir;
        let obj = objective(&w, &f);
        let slope = grad.dot(&dir);
        if slope >= 0.0 {
            break;
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let wt = &w + &dir * t;
            let ft = &f + &dfx * t;
            if objective(&wt, &ft) <= obj + 1e-4 * t * slope {
                w = wt;
                f = ft;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
        if loss.is_least_squares() && t == 1.0 {
            // one full Newton step solves a quadratic exactly
            let dpsi = DVector::from_iterator(n, y.iter().zip(f.iter()).map(|(yi, fi)| loss.derivative(yi - fi)));
            gnorm = (&w * (2.0 * lambda) - (&phit * dpsi) / nf).amax();
            iterations = it + 1;
            break;
        }
    }
    let alpha: Vec<f64> = y
        .iter()
        .zip(f.iter())
        .map(|(yi, fi)| loss.derivative(yi - fi) / (2.0 * nf * lambda))
        .collect();
    finish(
        problem,
        alpha,
        SolverInfo {
            method: SolverMethod::Features { truncation: m },
            iterations,
            gradient_norm: gnorm,
            jitter,
        },
    )
}

/// Sample size above which [`solve`] prefers the feature solver.
pub const FEATURE_THRESHOLD: usize = 1500;

/// Picks a solver: the feature solver for large `n` when the basis is small,
/// otherwise the closed form (least squares) or descent.
pub fn solve(problem: &SvmProblem) -> Result<SvmSolution> {
    let large = problem.len() > FEATURE_THRESHOLD || (!problem.loss.is_least_squares() && problem.len() > 300);
    if large {
        let opts = FeatureOptions::default();
        let (_, _, cols) = feature_plan(&problem.inputs, problem.sigma, opts.tail_tol);
        if cols <= opts.max_features {
            return solve_features(problem, &opts);
        }
    }
    if problem.loss.is_least_squares() {
        solve_least_squares(problem)
    } else {
        solve_general(problem, &DescentOptions::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// `‖f_P − f_T‖_H`.
    pub lhs: f64,
    /// `(1/λ) ‖E_P h_λΦ − E_T h_λΦ‖_H` with `h_λ` taken from `f_P`.
    pub rhs: f64,
    pub holds: bool,
}

/// Trains on the large sample `P` and the small sample `T` and compares the
/// distance of the two solutions with the mean-embedding gap of `h_λ`.
pub fn stability_check(
    big_inputs: &Series,
    big_outputs: &[f64],
    sub_inputs: &Series,
    sub_outputs: &[f64],
    loss: LossSpec,
    lambda: f64,
    sigma: f64,
) -> Result<(StabilityReport, SvmSolution, SvmSolution)> {
    let p = SvmProblem::new(big_inputs.clone(), big_outputs.to_vec(), loss, lambda, sigma)?;
    let t = SvmProblem::new(sub_inputs.clone(), sub_outputs.to_vec(), loss, lambda, sigma)?;
    let fp = solve(&p)?;
    let ft = solve(&t)?;
    let lhs = fp.expansion.difference(&ft.expansion)?.norm();

    let hp: Vec<f64> = fp
        .expansion
        .eval_many(big_inputs)
        .iter()
        .zip(big_outputs)
        .map(|(fx, y)| -loss.derivative(y - fx))
        .collect();
    let ht: Vec<f64> = fp
        .expansion
        .eval_many(sub_inputs)
        .iter()
        .zip(sub_outputs)
        .map(|(fx, y)| -loss.derivative(y - fx))
        .collect();
    let mp = WeightedSample::empirical(big_inputs.clone(), hp)?;
    let mt = WeightedSample::empirical(sub_inputs.clone(), ht)?;
    let rhs = rkhs::embedding_distance(&mp, &mt, sigma)? / lambda;
    Ok((
        StabilityReport {
            lhs,
            rhs,
            holds: lhs <= rhs + 1e-9,
        },
        fp,
        ft,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn random_problem(seed: u64, n: usize, d: usize, loss: LossSpec) -> SvmProblem {
        let mut r = rng::seeded(seed);
        let x = Series::from_flat(d, (0..n * d).map(|_| r.random::<f64>()).collect());
        let y: Vec<f64> = (0..n).map(|_| 2.0 * r.random::<f64>() - 1.0).collect();
        let lambda = 10f64.powf(-3.0 * r.random::<f64>());
        let sigma = 1.0 + 3.0 * r.random::<f64>();
        SvmProblem::new(x, y, loss, lambda, sigma).unwrap()
    }

    #[test]
    fn one_point_closed_form() {
        let p = SvmProblem::new(
            Series::from_scalars(&[0.3]),
            vec![1.0],
            LossSpec::least_squares(),
            1.0,
            1.0,
        )
        .unwrap();
        let s = solve_least_squares(&p).unwrap();
        assert!((s.expansion.coeffs()[0] - 0.5).abs() < 1e-15);
        assert!((s.predict(&[0.3]) - 0.5).abs() < 1e-15);
        // λ‖f‖² + (y − f)² = 0.25 + 0.25
        assert!((s.objective - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_outputs_give_zero_solution() {
        let p = SvmProblem::new(
            Series::from_scalars(&[0.1, 0.5, 0.9]),
            vec![0.0; 3],
            LossSpec::least_squares(),
            0.1,
            2.0,
        )
        .unwrap();
        let s = solve_least_squares(&p).unwrap();
        assert!(s.expansion.coeffs().iter().all(|&c| c == 0.0));
        assert_eq!(s.objective, 0.0);
    }

    #[test]
    fn objective_by_hand() {
        // n = 1, λ = 1, α = 1 at y = 2 with ρ = 1/4: λ·1 + ρ(2 − 1)²
        let p = SvmProblem::new(
            Series::from_scalars(&[0.0]),
            vec![2.0],
            LossSpec::least_squares().with_rescale(0.25),
            1.0,
            1.0,
        )
        .unwrap();
        let f = KernelExpansion::new(1.0, Series::from_scalars(&[0.0]), vec![1.0]).unwrap();
        assert!((objective_eval(&p, &f) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn closed_form_beats_random_perturbations() {
        let p = random_problem(1, 30, 1, LossSpec::least_squares());
        let s = solve_least_squares(&p).unwrap();
        let mut r = rng::seeded(2);
        for _ in 0..50 {
            let c: Vec<f64> = s
                .expansion
                .coeffs()
                .iter()
                .map(|c| c + 0.01 * (r.random::<f64>() - 0.5))
                .collect();
            let g = KernelExpansion::new(p.sigma(), p.inputs().clone(), c).unwrap();
            assert!(objective_eval(&p, &g) >= s.objective - 1e-12);
        }
    }

    #[test]
    fn descent_matches_closed_form() {
        for seed in 0..10 {
            let p = random_problem(100 + seed, 25, 1 + (seed as usize % 2), LossSpec::least_squares());
            let a = solve_least_squares(&p).unwrap();
            let b = solve_general(&p, &DescentOptions::default()).unwrap();
            assert!((a.objective - b.objective).abs() <= 1e-8, "seed {seed}");
            let fa = a.expansion.eval_many(p.inputs());
            let fb = b.expansion.eval_many(p.inputs());
            let gap = fa.iter().zip(&fb).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            assert!(gap <= 1e-6, "seed {seed}: {gap}");
        }
    }

    #[test]
    fn logdist_with_zero_outputs_stays_at_zero() {
        let p = SvmProblem::new(
            Series::from_scalars(&[-0.5, 0.0, 0.5]),
            vec![0.0; 3],
            LossSpec::logdist(),
            0.1,
            1.0,
        )
        .unwrap();
        let s = solve_general(&p, &DescentOptions::default()).unwrap();
        assert_eq!(s.info.iterations, 0);
        assert!(s.expansion.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn huber_agrees_with_ls_when_residuals_are_small() {
        let mut p = random_problem(7, 20, 1, LossSpec::least_squares());
        p.outputs.iter_mut().for_each(|y| *y *= 0.3);
        let ls = solve_least_squares(&p).unwrap();
        let mut q = p.clone();
        q.loss = LossSpec::huber();
        let hu = solve_general(&q, &DescentOptions::default()).unwrap();
        let fx = ls.expansion.eval_many(p.inputs());
        assert!(fx.iter().zip(p.outputs()).all(|(f, y)| (y - f).abs() < 1.0));
        let fh = hu.expansion.eval_many(p.inputs());
        let gap = fx.iter().zip(&fh).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-6, "{gap}");
    }

    #[test]
    fn different_starts_agree() {
        let p = random_problem(9, 30, 2, LossSpec::logdist());
        let a = solve_general(&p, &DescentOptions::default()).unwrap();
        let start: Vec<f64> = (0..30).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let b = solve_general(
            &p,
            &DescentOptions {
                initial: Some(start),
                ..Default::default()
            },
        )
        .unwrap();
        let fa = a.expansion.eval_many(p.inputs());
        let fb = b.expansion.eval_many(p.inputs());
        let gap = fa.iter().zip(&fb).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(gap <= 1e-5, "{gap}");
    }

    #[test]
    fn feature_solver_matches_closed_form() {
        for loss in [LossSpec::least_squares(), LossSpec::huber(), LossSpec::logdist()] {
            let mut r = rng::seeded(21);
            let x = Series::from_flat(1, (0..200).map(|_| r.random::<f64>()).collect());
            let y: Vec<f64> = x.rows().map(|v| (6.0 * v[0]).sin() * 0.9).collect();
            let p = SvmProblem::new(x, y, loss, 1e-3, 2.0).unwrap();
            let a = if loss.is_least_squares() {
                solve_least_squares(&p).unwrap()
            } else {
                solve_general(&p, &DescentOptions::default()).unwrap()
            };
            let b = solve_features(&p, &FeatureOptions::default()).unwrap();
            assert!((a.objective - b.objective).abs() < 1e-9, "{loss}: {} {}", a.objective, b.objective);
            let fa = a.expansion.eval_many(p.inputs());
            let fb = b.expansion.eval_many(p.inputs());
            let gap = fa.iter().zip(&fb).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            assert!(gap < 1e-5, "{loss}: {gap}");
        }
    }

    #[test]
    fn norm_bound_holds() {
        for seed in 0..5 {
            let p = random_problem(300 + seed, 40, 1, LossSpec::huber());
            let s = solve(&p).unwrap();
            assert!(s.norm() <= p.lambda().powf(-0.5) + 1e-9);
        }
    }

    #[test]
    fn h_lambda_for_least_squares() {
        let f = KernelExpansion::new(1.0, Series::from_scalars(&[0.0]), vec![0.5]).unwrap();
        let ls = LossSpec::least_squares();
        assert!((h_lambda(&f, &ls, &[0.0], 1.5) - 2.0 * (0.5 - 1.5)).abs() < 1e-15);
        assert_eq!(h_lambda(&f, &ls, &[0.0], 0.5), 0.0);
    }

    #[test]
    fn rejects_unscaled_loss() {
        let e = SvmProblem::new(Series::from_scalars(&[0.0]), vec![3.0], LossSpec::least_squares(), 0.5, 1.0);
        assert!(matches!(e, Err(Error::Assumption(_))));
    }

    #[test]
    fn stability_with_identical_samples_is_trivial() {
        let x = Series::from_scalars(&[0.1, 0.4, 0.7]);
        let y = vec![0.2, -0.1, 0.5];
        let (rep, _, _) = stability_check(&x, &y, &x, &y, LossSpec::least_squares(), 0.1, 1.0).unwrap();
        assert!(rep.lhs < 1e-7 && rep.rhs < 1e-6 && rep.holds);
    }
}

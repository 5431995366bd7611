//! Exact correlations of a pair of independent finite-state stationary
//! chains, and of the joint chain `Z_i = (X_i, Y_i)`.
//!
//! The correlation of the joint chain splits into an average over `Y` of
//! correlations of `X`, plus an average over two independent copies of
//! `X_0` of correlations of `Y`. Both sides are computed here by exact
//! enumeration with matrix powers.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::{Error, Result};

/// A stationary Markov chain on finitely many real-labelled states.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteChain {
    pub states: Vec<f64>,
    /// Row-stochastic transition matrix.
    pub transition: DMatrix<f64>,
    /// Stationary distribution, the law of every `X_i`.
    pub stationary: Vec<f64>,
}

impl FiniteChain {
    /// Chain with the given transition matrix, started from its stationary
    /// distribution. Fails when that distribution is not unique.
    pub fn new(states: Vec<f64>, transition: DMatrix<f64>) -> Result<Self> {
        let k = states.len();
        if k == 0 || transition.nrows() != k || transition.ncols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: transition.nrows(),
            });
        }
        for i in 0..k {
            let row: f64 = transition.row(i).iter().sum();
            if (row - 1.0).abs() > 1e-12 || transition.row(i).iter().any(|&p| p < 0.0) {
                return Err(Error::Config(format!("transition row {i} is not a probability vector")));
            }
        }
        // π(P − I) = 0 with Σπ = 1: replace one equation by normalization
        let mut a = transition.transpose() - DMatrix::identity(k, k);
        for j in 0..k {
            a[(k - 1, j)] = 1.0;
        }
        let mut rhs = nalgebra::DVector::zeros(k);
        rhs[k - 1] = 1.0;
        let pi = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Unsupported("chain has no unique stationary distribution".into()))?;
        if pi.iter().any(|&p| p < -1e-12) {
            return Err(Error::Unsupported("chain has no unique stationary distribution".into()));
        }
        Ok(FiniteChain {
            states,
            transition,
            stationary: pi.iter().map(|p| p.max(0.0)).collect(),
        })
    }

    /// The one-state chain sitting at `c`.
    pub fn constant(c: f64) -> Self {
        FiniteChain {
            states: vec![c],
            transition: DMatrix::from_element(1, 1, 1.0),
            stationary: vec![1.0],
        }
    }

    /// An i.i.d. sequence with law `probs` on `states`.
    pub fn iid(states: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let k = states.len();
        if probs.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: probs.len(),
            });
        }
        let t = DMatrix::from_fn(k, k, |_, j| probs[j]);
        Self::new(states, t)
    }

    /// Symmetric two-state chain on `{a, b}` flipping with probability `q`.
    pub fn two_state(a: f64, b: f64, q: f64) -> Result<Self> {
        Self::new(vec![a, b], DMatrix::from_row_slice(2, 2, &[1.0 - q, q, q, 1.0 - q]))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `P(X_0 = s_a, X_i = s_b)` as a matrix.
    pub fn joint_at(&self, lag: usize) -> DMatrix<f64> {
        let p = self.transition.pow(lag as u32);
        DMatrix::from_fn(self.len(), self.len(), |a, b| self.stationary[a] * p[(a, b)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointDecomposition {
    /// Correlation of the joint chain.
    pub lhs: f64,
    /// Average over `Y` of the `X`-correlation term.
    pub x_term: f64,
    /// Average over two independent copies of `X_0` of the `Y`-correlation term.
    pub y_term: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Both sides of the joint-correlation decomposition at lag `i`, for test
/// functions `ψ(x, y)` and `φ(x, y)`.
pub fn joint_decomposition_check(
    x: &FiniteChain,
    y: &FiniteChain,
    psi: impl Fn(f64, f64) -> f64,
    phi: impl Fn(f64, f64) -> f64,
    lag: usize,
) -> JointDecomposition {
    let (nx, ny) = (x.len(), y.len());
    let jx = x.joint_at(lag);
    let jy = y.joint_at(lag);
    let (px, py) = (&x.stationary, &y.stationary);
    let sx = &x.states;
    let sy = &y.states;

    let mut cross = 0.0;
    let (mut epsi, mut ephi) = (0.0, 0.0);
    for a in 0..nx {
        for c in 0..ny {
            epsi += px[a] * py[c] * psi(sx[a], sy[c]);
            ephi += px[a] * py[c] * phi(sx[a], sy[c]);
            for b in 0..nx {
                for e in 0..ny {
                    cross += jx[(a, b)] * jy[(c, e)] * psi(sx[a], sy[c]) * phi(sx[b], sy[e]);
                }
            }
        }
    }
    let lhs = cross - epsi * ephi;

    // E_ν [ E_μ ψ(X_0,Y_0)φ(X_i,Y_i) − E_μ ψ(X_0,Y_0) · E_μ φ(X_0,Y_i) ]
    let mut x_term = 0.0;
    for c in 0..ny {
        for e in 0..ny {
            let w = jy[(c, e)];
            if w == 0.0 {
                continue;
            }
            let mut joint = 0.0;
            for a in 0..nx {
                for b in 0..nx {
                    joint += jx[(a, b)] * psi(sx[a], sy[c]) * phi(sx[b], sy[e]);
                }
            }
            let mp: f64 = (0..nx).map(|a| px[a] * psi(sx[a], sy[c])).sum();
            let mf: f64 = (0..nx).map(|b| px[b] * phi(sx[b], sy[e])).sum();
            x_term += w * (joint - mp * mf);
        }
    }

    // E_μ E_μ [ E_ν ψ(x,Y_0)φ(x',Y_i) − E_ν ψ(x,Y_0) · E_ν φ(x',Y_0) ]
    let mut y_term = 0.0;
    for a in 0..nx {
        for a2 in 0..nx {
            let w = px[a] * px[a2];
            if w == 0.0 {
                continue;
            }
            let mut joint = 0.0;
            for c in 0..ny {
                for e in 0..ny {
                    joint += jy[(c, e)] * psi(sx[a], sy[c]) * phi(sx[a2], sy[e]);
                }
            }
            let mp: f64 = (0..ny).map(|c| py[c] * psi(sx[a], sy[c])).sum();
            let mf: f64 = (0..ny).map(|e| py[e] * phi(sx[a2], sy[e])).sum();
            y_term += w * (joint - mp * mf);
        }
    }
    let rhs = x_term + y_term;
    JointDecomposition {
        lhs,
        x_term,
        y_term,
        rhs,
        gap: (lhs - rhs).abs(),
    }
}

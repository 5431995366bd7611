use crate::rkhs::kernel::quadratic_form;
use crate::rkhs::onb;
use crate::{Error, Result, Series};

/// A discrete probability measure with a function `h` attached to its atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    pub points: Series,
    pub weights: Vec<f64>,
    pub h: Vec<f64>,
}

impl WeightedSample {
    pub fn new(points: Series, weights: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        let n = points.len();
        if weights.len() != n || h.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: if weights.len() != n { weights.len() } else { h.len() },
            });
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::Config("measure weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("measure weights sum to {total}, not 1")));
        }
        Ok(WeightedSample { points, weights, h })
    }

    /// The empirical measure of `points`.
    pub fn empirical(points: Series, h: Vec<f64>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Config("empirical measure needs at least one point".into()));
        }
        Self::new(points, vec![1.0 / n as f64; n], h)
    }

    fn abs_mean(&self) -> f64 {
        self.weights.iter().zip(&self.h).map(|(w, h)| w * h.abs()).sum()
    }

    /// `E h e_η` for every `η ∈ {0..m}^d`, in odometer order.
    fn onb_coordinates(&self, sigma: f64, m: usize) -> Vec<f64> {
        let d = self.points.dim();
        let k = m + 1;
        let mut out = vec![0.0; k.pow(d as u32)];
        let mut feats = vec![vec![0.0; k]; d];
        for (i, x) in self.points.rows().enumerate() {
            for j in 0..d {
                onb::features_1d(sigma, x[j], &mut feats[j]);
            }
            let wh = self.weights[i] * self.h[i];
            for (idx, slot) in out.iter_mut().enumerate() {
                let mut rest = idx;
                let mut v = wh;
                for j in (0..d).rev() {
                    v *= feats[j][rest % k];
                    rest /= k;
                }
                *slot += v;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingGap {
    /// `‖E_P hΦ − E_Q hΦ‖_H`, exact.
    pub norm: f64,
    /// `(Σ_{η≤m} |E_P h e_η − E_Q h e_η|²)^{1/2}`.
    pub coordinate_part: f64,
    /// `(Σ_{∃i: η_i>m} ‖e_η‖²_∞)^{1/2} (E_P|h| + E_Q|h|)`.
    pub tail_part: f64,
    /// Half-width of the cube the basis is restricted to.
    pub a: f64,
}

impl EmbeddingGap {
    /// The truncated upper bound on `norm`.
    pub fn bound(&self) -> f64 {
        self.coordinate_part + self.tail_part
    }
}

/// `‖E_P hΦ − E_Q hΦ‖_H` from the joint Gram quadratic form.
pub fn embedding_distance(p: &WeightedSample, q: &WeightedSample, sigma: f64) -> Result<f64> {
    let d = p.points.dim();
    if q.points.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: q.points.dim(),
        });
    }
    let mut data = p.points.as_flat().to_vec();
    data.extend_from_slice(q.points.as_flat());
    let joint = Series::from_flat(d, data);
    let mut w: Vec<f64> = p.weights.iter().zip(&p.h).map(|(w, h)| w * h).collect();
    w.extend(q.weights.iter().zip(&q.h).map(|(w, h)| -w * h));
    Ok(quadratic_form(sigma, &joint, &w).max(0.0).sqrt())
}

/// Exact RKHS distance between the mean embeddings of `h` under `p` and `q`,
/// together with its basis-truncated upper bound at level `m` on the
/// smallest cube `[−a, a]^d` containing both samples.
pub fn mean_embedding_gap(p: &WeightedSample, q: &WeightedSample, sigma: f64, m: usize) -> Result<EmbeddingGap> {
    let norm = embedding_distance(p, q, sigma)?;
    let d = p.points.dim();
    let a = p
        .points
        .as_flat()
        .iter()
        .chain(q.points.as_flat())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let cp = p.onb_coordinates(sigma, m);
    let cq = q.onb_coordinates(sigma, m);
    let coordinate_part = cp
        .iter()
        .zip(&cq)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let tail = if a > 0.0 {
        onb::tail_sup_sq_multi(m, sigma, a, d).sqrt()
    } else {
        0.0
    };
    let tail_part = tail * (p.abs_mean() + q.abs_mean());
    Ok(EmbeddingGap {
        norm,
        coordinate_part,
        tail_part,
        a,
    })
}

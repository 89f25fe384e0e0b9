use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FitOptions, FoldInOptions, DENOMINATOR_FLOOR};
use crate::corpus::{QueryVector, TermDocMatrix};
use crate::linalg::{frobenius_sq, row_major};
use crate::{Error, Result};

/// Nonnegative factorization `N ~ W H` under the squared Frobenius loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmfModel {
    pub terms: Vec<String>,
    pub k: usize,
    pub num_tracks: usize,
    pub seed: u64,
    /// terms x k
    #[serde(with = "row_major")]
    pub w: DMatrix<f64>,
    /// k x tracks
    #[serde(with = "row_major")]
    pub h: DMatrix<f64>,
    /// `0.5 * ||N - WH||_F^2`, at initialization and after every iteration
    pub objective_trace: Vec<f64>,
}

fn objective(n: &DMatrix<f64>, w: &DMatrix<f64>, h: &DMatrix<f64>) -> f64 {
    0.5 * frobenius_sq(&(n - w * h))
}

fn multiply_update(target: &mut DMatrix<f64>, numer: &DMatrix<f64>, denom: &DMatrix<f64>) {
    for ((t, &a), &b) in target.iter_mut().zip(numer.iter()).zip(denom.iter()) {
        *t *= a / b.max(DENOMINATOR_FLOOR);
    }
}

/// Lee-Seung multiplicative updates from a seeded uniform `(0, 1]` start.
pub fn nmf_fit(matrix: &TermDocMatrix, opts: &FitOptions) -> Result<NmfModel> {
    let mut model = nmf_fit_dense(&matrix.to_dense(), opts)?;
    model.terms = matrix.terms().to_vec();
    Ok(model)
}

pub(crate) fn nmf_fit_dense(n: &DMatrix<f64>, opts: &FitOptions) -> Result<NmfModel> {
    opts.validate()?;
    if n.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::Parameter("nmf input must be finite and nonnegative".into()));
    }
    let (m, t) = n.shape();
    let k = opts.k;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut w = DMatrix::from_fn(m, k, |_, _| 1.0 - rng.gen::<f64>());
    let mut h = DMatrix::from_fn(k, t, |_, _| 1.0 - rng.gen::<f64>());

    let mut trace = vec![objective(n, &w, &h)];
    for _ in 0..opts.max_iter {
        let wt = w.transpose();
        let numer = &wt * n;
        let denom = (&wt * &w) * &h;
        multiply_update(&mut h, &numer, &denom);

        let ht = h.transpose();
        let numer = n * &ht;
        let denom = &w * (&h * &ht);
        multiply_update(&mut w, &numer, &denom);

        let prev = *trace.last().unwrap();
        let cur = objective(n, &w, &h);
        trace.push(cur);
        if prev <= 0.0 || (prev - cur) / prev < opts.tol {
            break;
        }
    }
    Ok(NmfModel {
        terms: Vec::new(),
        k,
        num_tracks: t,
        seed: opts.seed,
        w,
        h,
        objective_trace: trace,
    })
}

impl NmfModel {
    /// Nonnegative coefficients `c` minimizing `0.5 * ||q - W c||^2` with the
    /// term factor held fixed, by multiplicative updates from `c = 1`.
    pub fn fold_in(&self, q: &QueryVector, opts: &FoldInOptions) -> Result<DVector<f64>> {
        q.check_dim(self.w.nrows())?;
        q.require_nonnegative()?;
        if q.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let qd = q.to_dense();
        let wt = self.w.transpose();
        let numer = &wt * &qd;
        let gram = &wt * &self.w;
        let mut coef = DVector::from_element(self.k, 1.0);
        let loss = |c: &DVector<f64>| 0.5 * (&qd - &self.w * c).norm_squared();
        let mut prev = loss(&coef);
        for _ in 0..opts.max_iter {
            let denom = &gram * &coef;
            for z in 0..self.k {
                coef[z] *= numer[z] / denom[z].max(DENOMINATOR_FLOOR);
            }
            let cur = loss(&coef);
            if prev <= 0.0 || (prev - cur) / prev < opts.tol {
                break;
            }
            prev = cur;
        }
        Ok(coef)
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.w * &self.h
    }
}

/// Per-term weights `W_i c` of a folded-in query.
pub fn nmf_predict_weights(model: &NmfModel, q: &QueryVector, opts: &FoldInOptions) -> Result<Vec<f64>> {
    let coef = model.fold_in(q, opts)?;
    Ok((&model.w * coef).iter().copied().collect())
}

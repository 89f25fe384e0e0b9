use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FitOptions, FoldInOptions, DENOMINATOR_FLOOR};
use crate::corpus::{QueryVector, TermDocMatrix};
use crate::linalg::row_major;
use crate::{Error, Result};

/// Aspect model `P(t, w) = P(t) sum_z P(w|z) P(z|t)` fitted by EM on the
/// TF-IDF weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlsaModel {
    pub terms: Vec<String>,
    pub k: usize,
    pub num_tracks: usize,
    pub seed: u64,
    /// terms x k, columns sum to one
    #[serde(with = "row_major")]
    pub p_w_given_z: DMatrix<f64>,
    /// k x tracks, columns sum to one
    #[serde(with = "row_major")]
    pub p_z_given_t: DMatrix<f64>,
    pub p_t: Vec<f64>,
    /// log-likelihood at initialization and after every EM iteration
    pub loglik_trace: Vec<f64>,
}

/// Scales every column to sum to one. A column without mass becomes uniform.
fn normalize_columns(m: &mut DMatrix<f64>) {
    let rows = m.nrows() as f64;
    for mut col in m.column_iter_mut() {
        let sum: f64 = col.iter().sum();
        if sum > 0.0 {
            col.iter_mut().for_each(|x| *x /= sum);
        } else {
            col.fill(1.0 / rows);
        }
    }
}

fn random_stochastic(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(rows, cols, |_, _| 1.0 - rng.gen::<f64>());
    normalize_columns(&mut m);
    m
}

struct Cells<'a> {
    terms: usize,
    tracks: usize,
    /// (term, track, weight)
    data: &'a [(usize, usize, f64)],
}

impl Cells<'_> {
    fn loglik(&self, p_t: &[f64], wz: &DMatrix<f64>, zt: &DMatrix<f64>) -> f64 {
        self.data
            .iter()
            .map(|&(i, j, n)| {
                let mix: f64 = (0..wz.ncols()).map(|z| wz[(i, z)] * zt[(z, j)]).sum();
                n * (p_t[j] * mix).ln()
            })
            .sum()
    }
}

/// EM from a seeded random stochastic start; stops when the relative
/// log-likelihood gain drops below `tol` or after `max_iter` iterations.
pub fn plsa_fit(matrix: &TermDocMatrix, opts: &FitOptions) -> Result<PlsaModel> {
    let data: Vec<(usize, usize, f64)> = matrix.cells().iter().map(|c| (c.term, c.track, c.weight)).collect();
    let mut model = plsa_fit_cells(
        Cells {
            terms: matrix.num_terms(),
            tracks: matrix.num_tracks(),
            data: &data,
        },
        opts,
    )?;
    model.terms = matrix.terms().to_vec();
    Ok(model)
}

fn plsa_fit_cells(cells: Cells<'_>, opts: &FitOptions) -> Result<PlsaModel> {
    opts.validate()?;
    if cells.data.iter().any(|c| !(c.2 >= 0.0 && c.2.is_finite())) {
        return Err(Error::Parameter("plsa input must be finite and nonnegative".into()));
    }
    let total: f64 = cells.data.iter().map(|c| c.2).sum();
    if total <= 0.0 {
        return Err(Error::Parameter("plsa input has no mass".into()));
    }
    let mut p_t = vec![0.0; cells.tracks];
    for &(_, j, n) in cells.data {
        p_t[j] += n;
    }
    p_t.iter_mut().for_each(|x| *x /= total);

    let k = opts.k;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut wz = random_stochastic(cells.terms, k, &mut rng);
    let mut zt = random_stochastic(k, cells.tracks, &mut rng);
    let mut trace = vec![cells.loglik(&p_t, &wz, &zt)];
    let mut resp = vec![0.0; k];

    for _ in 0..opts.max_iter {
        let mut next_wz = DMatrix::zeros(cells.terms, k);
        let mut next_zt = DMatrix::zeros(k, cells.tracks);
        for &(i, j, n) in cells.data {
            let mut sum = 0.0;
            for z in 0..k {
                resp[z] = wz[(i, z)] * zt[(z, j)];
                sum += resp[z];
            }
            let scale = n / sum.max(DENOMINATOR_FLOOR);
            for z in 0..k {
                let r = resp[z] * scale;
                next_wz[(i, z)] += r;
                next_zt[(z, j)] += r;
            }
        }
        normalize_columns(&mut next_wz);
        normalize_columns(&mut next_zt);
        wz = next_wz;
        zt = next_zt;

        let prev = *trace.last().unwrap();
        let cur = cells.loglik(&p_t, &wz, &zt);
        trace.push(cur);
        if (cur - prev) / prev.abs().max(DENOMINATOR_FLOOR) < opts.tol {
            break;
        }
    }
    Ok(PlsaModel {
        terms: Vec::new(),
        k,
        num_tracks: cells.tracks,
        seed: opts.seed,
        p_w_given_z: wz,
        p_z_given_t: zt,
        p_t,
        loglik_trace: trace,
    })
}

impl PlsaModel {
    /// `P(z|q)` by EM with `P(w|z)` frozen, starting from the uniform mixture.
    pub fn fold_in(&self, q: &QueryVector, opts: &FoldInOptions) -> Result<DVector<f64>> {
        q.check_dim(self.p_w_given_z.nrows())?;
        q.require_nonnegative()?;
        if q.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let k = self.k;
        let wz = &self.p_w_given_z;
        let loglik = |pz: &DVector<f64>| -> f64 {
            q.entries()
                .iter()
                .filter(|e| e.1 > 0.0)
                .map(|&(i, n)| n * (0..k).map(|z| wz[(i, z)] * pz[z]).sum::<f64>().ln())
                .sum()
        };
        let mut pz = DVector::from_element(k, 1.0 / k as f64);
        let mut prev = loglik(&pz);
        let mut resp = vec![0.0; k];
        for _ in 0..opts.max_iter {
            let mut next = DVector::zeros(k);
            for &(i, n) in q.entries() {
                let mut sum = 0.0;
                for z in 0..k {
                    resp[z] = wz[(i, z)] * pz[z];
                    sum += resp[z];
                }
                let scale = n / sum.max(DENOMINATOR_FLOOR);
                for z in 0..k {
                    next[z] += resp[z] * scale;
                }
            }
            let total: f64 = next.sum();
            if total <= 0.0 {
                break;
            }
            next /= total;
            pz = next;
            let cur = loglik(&pz);
            if (cur - prev) / prev.abs().max(DENOMINATOR_FLOOR) < opts.tol {
                break;
            }
            prev = cur;
        }
        Ok(pz)
    }
}

/// `P(w_i|q) = sum_z P(w_i|z) P(z|q)`; the weights sum to one.
pub fn plsa_predict_weights(model: &PlsaModel, q: &QueryVector, opts: &FoldInOptions) -> Result<Vec<f64>> {
    let pz = model.fold_in(q, opts)?;
    Ok((&model.p_w_given_z * pz).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_cells(seed: u64, terms: usize, tracks: usize) -> Vec<(usize, usize, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for j in 0..tracks {
            for i in 0..terms {
                if rng.gen_bool(0.3) || i == j % terms {
                    out.push((i, j, 0.5 + rng.gen::<f64>() * 4.0));
                }
            }
        }
        out
    }

    fn opts(k: usize, seed: u64) -> FitOptions {
        FitOptions {
            k,
            max_iter: 60,
            tol: 0.0,
            seed,
        }
    }

    #[test]
    fn single_class_closed_form() {
        let data = random_cells(1, 8, 20);
        let m = plsa_fit_cells(
            Cells {
                terms: 8,
                tracks: 20,
                data: &data,
            },
            &opts(1, 4),
        )
        .unwrap();
        let total: f64 = data.iter().map(|c| c.2).sum();
        for i in 0..8 {
            let marginal: f64 = data.iter().filter(|c| c.0 == i).map(|c| c.2).sum::<f64>() / total;
            assert!((m.p_w_given_z[(i, 0)] - marginal).abs() < 1e-9);
        }
        let q = QueryVector::from_dense(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        let w = plsa_predict_weights(&m, &q, &FoldInOptions::default()).unwrap();
        for (i, wi) in w.iter().enumerate() {
            assert!((wi - m.p_w_given_z[(i, 0)]).abs() < 1e-12);
        }
    }

    #[test]
    fn likelihood_monotone_and_stochastic() {
        let data = random_cells(2, 10, 30);
        let m = plsa_fit_cells(
            Cells {
                terms: 10,
                tracks: 30,
                data: &data,
            },
            &opts(3, 5),
        )
        .unwrap();
        assert!(m.loglik_trace.windows(2).all(|w| w[1] >= w[0] - 1e-9 * w[0].abs()));
        for col in m.p_w_given_z.column_iter().chain(m.p_z_given_t.column_iter()) {
            assert!((col.sum() - 1.0).abs() < 1e-9);
        }
        let q = QueryVector::from_dense(&[1.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let w = plsa_predict_weights(&m, &q, &FoldInOptions::default()).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

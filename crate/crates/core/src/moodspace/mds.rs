//! Non-metric multidimensional scaling under Kruskal's Stress-1.
//!
//! Each run alternates three steps on the configuration `X`:
//!
//! * monotone regression of the current distances on the rank order of the
//!   dissimilarities (primary approach: tied dissimilarities are ordered by
//!   current distance, so they may receive different disparities),
//! * rescaling of `X` and of the normalized disparities so that the raw
//!   stress equals the Stress-1 of `X` (up to a constant),
//! * a Guttman transform, which cannot increase raw stress for fixed
//!   disparities.
//!
//! Together these make Stress-1 non-increasing across iterations.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::isotonic::isotonic_fit;
use crate::linalg::row_major;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdsOptions {
    pub dims: usize,
    /// Total runs: the first starts from classical MDS, the rest at random.
    pub restarts: usize,
    pub max_iter: usize,
    /// Relative stress decrease below which a run stops.
    pub tol: f64,
    pub seed: u64,
}

impl MdsOptions {
    pub fn new(seed: u64) -> Self {
        MdsOptions {
            dims: 3,
            restarts: 4,
            max_iter: 300,
            tol: 1e-7,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsEmbedding {
    pub terms: Vec<String>,
    /// points x dims, column means zero
    #[serde(with = "row_major")]
    pub coords: DMatrix<f64>,
    pub stress1: f64,
    pub dims: usize,
    pub restarts_used: usize,
    /// index of the restart that produced `coords`
    pub best_restart: usize,
    /// Stress-1 per iteration for every restart
    pub stress_traces: Vec<Vec<f64>>,
}

fn validate(dissim: &DMatrix<f64>, dims: usize) -> Result<()> {
    let n = dissim.nrows();
    if dissim.ncols() != n {
        return Err(Error::Parameter("dissimilarity matrix must be square".into()));
    }
    if dims < 1 || dims >= n {
        return Err(Error::Parameter(format!("mds dims {dims} must lie in 1..{n}")));
    }
    for a in 0..n {
        if dissim[(a, a)] != 0.0 {
            return Err(Error::Parameter("dissimilarity diagonal must be zero".into()));
        }
        for b in (a + 1)..n {
            let (x, y) = (dissim[(a, b)], dissim[(b, a)]);
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::Parameter(format!("invalid dissimilarity at ({a}, {b})")));
            }
            if (x - y).abs() > 1e-12 * x.abs().max(1.0) {
                return Err(Error::Parameter(format!("dissimilarity not symmetric at ({a}, {b})")));
            }
        }
    }
    Ok(())
}

struct Pairs {
    n: usize,
    /// (a, b) with a < b, sorted by dissimilarity
    index: Vec<(usize, usize)>,
    /// [start, end) of runs of equal dissimilarity within `index`
    ties: Vec<(usize, usize)>,
}

impl Pairs {
    fn new(dissim: &DMatrix<f64>) -> Self {
        let n = dissim.nrows();
        let mut index: Vec<(usize, usize)> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect();
        index.sort_by(|p, q| dissim[*p].total_cmp(&dissim[*q]));
        let mut ties = Vec::new();
        let mut start = 0;
        for i in 1..=index.len() {
            if i == index.len() || dissim[index[i]] != dissim[index[start]] {
                ties.push((start, i));
                start = i;
            }
        }
        Pairs { n, index, ties }
    }
}

fn distances(x: &DMatrix<f64>, pairs: &Pairs) -> Vec<f64> {
    pairs.index.iter().map(|&(a, b)| (x.row(a) - x.row(b)).norm()).collect()
}

/// Disparities aligned with `pairs.index`, before normalization.
fn disparities(d: &[f64], pairs: &Pairs) -> Vec<f64> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    for &(s, e) in &pairs.ties {
        order[s..e].sort_by(|&p, &q| d[p].total_cmp(&d[q]));
    }
    let fitted = isotonic_fit(&order.iter().map(|&p| d[p]).collect::<Vec<_>>());
    let mut out = vec![0.0; d.len()];
    for (pos, &p) in order.iter().enumerate() {
        out[p] = fitted[pos];
    }
    out
}

fn stress1(d: &[f64], dhat: &[f64]) -> f64 {
    let num: f64 = d.iter().zip(dhat).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = d.iter().map(|a| a * a).sum();
    if den == 0.0 {
        return 0.0;
    }
    (num / den).sqrt().clamp(0.0, 1.0)
}

fn center(x: &mut DMatrix<f64>) {
    let n = x.nrows() as f64;
    for mut col in x.column_iter_mut() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
    }
}

/// One descent run from `x`. Returns the final configuration and the
/// Stress-1 trace; the last trace entry is the stress of the returned `x`.
fn run(mut x: DMatrix<f64>, pairs: &Pairs, max_iter: usize, tol: f64) -> (DMatrix<f64>, Vec<f64>) {
    let n = pairs.n;
    let eta = (pairs.index.len() as f64).sqrt();
    let mut trace = Vec::new();
    center(&mut x);
    for iter in 0..=max_iter {
        let d = distances(&x, pairs);
        let raw = disparities(&d, pairs);
        let s = stress1(&d, &raw);
        let prev = trace.last().copied();
        trace.push(s);
        let converged = s < 1e-12 || prev.is_some_and(|p: f64| p - s <= tol * p);
        let ss_raw: f64 = raw.iter().map(|v| v * v).sum();
        let ss_d: f64 = d.iter().map(|v| v * v).sum();
        if converged || iter == max_iter || ss_raw == 0.0 || ss_d == 0.0 {
            break;
        }
        let norm = eta / ss_raw.sqrt();
        let dhat: Vec<f64> = raw.iter().map(|v| v * norm).collect();
        let alpha = dhat.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / ss_d;
        x *= alpha;

        let mut next = DMatrix::zeros(n, x.ncols());
        for (p, &(a, b)) in pairs.index.iter().enumerate() {
            let dist = d[p] * alpha;
            if dist <= 0.0 {
                continue;
            }
            let ratio = dhat[p] / dist;
            let diff = (x.row(a) - x.row(b)) * ratio;
            let mut ra = next.row_mut(a);
            ra += &diff;
            let mut rb = next.row_mut(b);
            rb -= &diff;
        }
        x = next / n as f64;
    }
    center(&mut x);
    (x, trace)
}

/// Torgerson scaling of the dissimilarities. Dimensions without positive
/// eigenvalue are filled with small seeded noise so the descent can use them.
fn classical_init(dissim: &DMatrix<f64>, dims: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = dissim.nrows();
    let sq = dissim.map(|v| v * v);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]));
    let top = eig.eigenvalues[order[0]].max(0.0);
    let noise = 1e-3 * top.sqrt().max(1e-3);
    let mut x = DMatrix::zeros(n, dims);
    for c in 0..dims {
        let lambda = eig.eigenvalues[order[c]];
        if lambda > 1e-10 * top && lambda > 0.0 {
            // sign fixed by the largest entry, so row order does not matter
            let col = eig.eigenvectors.column(order[c]);
            let pivot = col
                .iter()
                .fold(0.0f64, |best, &v| if v.abs() > best.abs() { v } else { best });
            let scale = if pivot < 0.0 { -lambda.sqrt() } else { lambda.sqrt() };
            for i in 0..n {
                x[(i, c)] = col[i] * scale;
            }
        } else {
            for i in 0..n {
                x[(i, c)] = noise * (rng.gen::<f64>() - 0.5);
            }
        }
    }
    x
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Embeds the points in `opts.dims` dimensions, keeping the restart with the
/// lowest Stress-1 (earliest restart on ties). The result is centered.
pub fn mds_embed(dissim: &DMatrix<f64>, terms: &[String], opts: &MdsOptions) -> Result<MdsEmbedding> {
    validate(dissim, opts.dims)?;
    if terms.len() != dissim.nrows() {
        return Err(Error::Parameter("term list length differs from matrix size".into()));
    }
    if opts.restarts == 0 {
        return Err(Error::Parameter("at least one mds restart is required".into()));
    }
    let pairs = Pairs::new(dissim);
    let n = dissim.nrows();
    let runs: Vec<(DMatrix<f64>, Vec<f64>)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(opts.seed, r);
            let init = if r == 0 {
                classical_init(dissim, opts.dims, &mut rng)
            } else {
                DMatrix::from_fn(n, opts.dims, |_, _| rng.gen::<f64>() * 2.0 - 1.0)
            };
            run(init, &pairs, opts.max_iter, opts.tol)
        })
        .collect();
    let best = (0..runs.len())
        .min_by(|&a, &b| {
            let (sa, sb) = (runs[a].1.last().unwrap(), runs[b].1.last().unwrap());
            sa.total_cmp(sb).then(a.cmp(&b))
        })
        .unwrap();
    let stress_traces: Vec<Vec<f64>> = runs.iter().map(|r| r.1.clone()).collect();
    let (coords, trace) = runs.into_iter().nth(best).unwrap();
    Ok(MdsEmbedding {
        terms: terms.to_vec(),
        coords,
        stress1: *trace.last().unwrap(),
        dims: opts.dims,
        restarts_used: opts.restarts,
        best_restart: best,
        stress_traces,
    })
}

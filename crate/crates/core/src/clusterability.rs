//! Clustering tendency of track positions via Hopkins' index.
//!
//! Artificial points follow the Lawson-Jurs scheme: every coordinate is drawn
//! independently from the observed values of that coordinate.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{derive_seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopkinsResult {
    /// mean of `per_run_values`
    pub h: f64,
    pub num_real: usize,
    pub num_artificial: usize,
    pub per_run_values: Vec<f64>,
    pub seed: u64,
}

/// `sum_a / (sum_a + sum_r)`.
pub fn hopkins_ratio(sum_artificial: f64, sum_real: f64) -> f64 {
    sum_artificial / (sum_artificial + sum_real)
}

/// `min(n / 10, 100)`, at least one.
pub fn default_sample_count(n: usize) -> usize {
    (n / 10).clamp(1, 100)
}

fn dist(points: &DMatrix<f64>, i: usize, p: &[f64]) -> f64 {
    points
        .row(i)
        .iter()
        .zip(p)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn nearest(points: &DMatrix<f64>, p: &[f64], skip: Option<usize>) -> f64 {
    (0..points.nrows())
        .filter(|&i| Some(i) != skip)
        .map(|i| dist(points, i, p))
        .fold(f64::INFINITY, f64::min)
}

fn hopkins_run(points: &DMatrix<f64>, m: usize, seed: u64) -> Result<f64> {
    let (n, d) = points.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum_real = 0.0;
    let mut row = vec![0.0; d];
    for i in sample(&mut rng, n, m).into_iter() {
        row.iter_mut().enumerate().for_each(|(c, v)| *v = points[(i, c)]);
        sum_real += nearest(points, &row, Some(i));
    }
    let mut sum_artificial = 0.0;
    for _ in 0..m {
        for (c, v) in row.iter_mut().enumerate() {
            *v = points[(rng.gen_range(0..n), c)];
        }
        sum_artificial += nearest(points, &row, None);
    }
    if sum_artificial + sum_real == 0.0 {
        return Err(Error::Degenerate("all nearest-neighbour distances are zero".into()));
    }
    Ok(hopkins_ratio(sum_artificial, sum_real))
}

/// Hopkins' index of the rows of `points`, averaged over `runs` independent
/// samples of `m` real and `m` artificial points.
pub fn hopkins_index(points: &DMatrix<f64>, m: usize, runs: usize, seed: u64) -> Result<HopkinsResult> {
    let (n, d) = points.shape();
    if m == 0 || d == 0 || runs == 0 {
        return Err(Error::Parameter("hopkins needs m >= 1, d >= 1 and runs >= 1".into()));
    }
    if n < 2 * m {
        return Err(Error::SampleSize { n, m });
    }
    let per_run_values = (0..runs)
        .into_par_iter()
        .map(|r| hopkins_run(points, m, derive_seed(seed, r as u64)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(HopkinsResult {
        h: mean_sorted(&per_run_values),
        num_real: n,
        num_artificial: m,
        per_run_values,
        seed,
    })
}

/// Mean with the summation order fixed by sorting.
fn mean_sorted(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = mean_sorted(values);
    let mut sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    sq.sort_by(f64::total_cmp);
    (sq.iter().sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    pub terms: usize,
    pub tracks: usize,
}

/// 2048, 1024, ..., 8 tracks with 2, 3, ..., 10 terms (4088 in total).
pub fn default_schedule() -> Vec<Bucket> {
    (2..=10)
        .map(|c| Bucket {
            terms: c,
            tracks: 2048 >> (c - 2),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BucketRule {
    /// a bucket for `c` terms draws tracks with exactly `c` terms
    #[default]
    Exact,
    /// a bucket for `c` terms draws tracks with at least `c` terms
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRow {
    pub k: usize,
    pub h_mean: f64,
    pub h_sd: f64,
    pub runs: usize,
}

/// Track positions for one semantic space.
pub struct SpacePositions<'a> {
    /// rank label of the space
    pub k: usize,
    /// tracks x dims, rows aligned with `terms_per_track`
    pub positions: &'a DMatrix<f64>,
}

fn sample_subset(
    terms_per_track: &[usize],
    schedule: &[Bucket],
    rule: BucketRule,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    let mut taken = vec![false; terms_per_track.len()];
    let mut out = Vec::new();
    for b in schedule {
        let pool: Vec<usize> = (0..terms_per_track.len())
            .filter(|&j| !taken[j])
            .filter(|&j| match rule {
                BucketRule::Exact => terms_per_track[j] == b.terms,
                BucketRule::AtLeast => terms_per_track[j] >= b.terms,
            })
            .collect();
        if pool.len() < b.tracks {
            return Err(Error::Schedule {
                terms: b.terms,
                needed: b.tracks,
                available: pool.len(),
            });
        }
        for p in sample(rng, pool.len(), b.tracks).into_iter() {
            taken[pool[p]] = true;
            out.push(pool[p]);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Per run, draws a terms-per-track stratified subset of tracks and computes
/// Hopkins' index of their positions in every space. The same subset is used
/// for all spaces within a run.
pub fn clusterability_protocol(
    spaces: &[SpacePositions<'_>],
    terms_per_track: &[usize],
    schedule: &[Bucket],
    rule: BucketRule,
    runs: usize,
    seed: u64,
) -> Result<Vec<ProtocolRow>> {
    if runs == 0 || schedule.is_empty() {
        return Err(Error::Parameter(
            "protocol needs at least one run and one bucket".into(),
        ));
    }
    for s in spaces {
        if s.positions.nrows() != terms_per_track.len() {
            return Err(Error::Parameter(format!("space k={} has a different track count", s.k)));
        }
    }
    let mut values = vec![Vec::with_capacity(runs); spaces.len()];
    for r in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
        let subset = sample_subset(terms_per_track, schedule, rule, &mut rng)?;
        let m = default_sample_count(subset.len());
        let hopkins_seed = rng.gen::<u64>();
        for (s, space) in spaces.iter().enumerate() {
            let sub = space.positions.select_rows(&subset);
            values[s].push(hopkins_index(&sub, m, 1, hopkins_seed)?.h);
        }
    }
    Ok(spaces
        .iter()
        .zip(values)
        .map(|(s, v)| ProtocolRow {
            k: s.k,
            h_mean: mean_sorted(&v),
            h_sd: sample_sd(&v),
            runs,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_total() {
        let s = default_schedule();
        assert_eq!(s.len(), 9);
        assert_eq!(s.iter().map(|b| b.tracks).sum::<usize>(), 4088);
        assert_eq!(s[8], Bucket { terms: 10, tracks: 8 });
    }

    #[test]
    fn ratio_and_sample_count() {
        assert_eq!(hopkins_ratio(3.5, 3.5), 0.5);
        assert_eq!(default_sample_count(5), 1);
        assert_eq!(default_sample_count(500), 50);
        assert_eq!(default_sample_count(4088), 100);
    }

    #[test]
    fn duplicated_clusters_score_one() {
        // half the points at (0,0), half at (1,1): real neighbours are at
        // distance zero, marginal draws can land on (0,1) or (1,0)
        let points = DMatrix::from_fn(40, 2, |r, _| if r < 20 { 0.0 } else { 1.0 });
        let res = hopkins_index(&points, 4, 5, 11).unwrap();
        assert!(res.per_run_values.iter().all(|&h| h == 1.0));
        assert_eq!(res.h, 1.0);
    }

    #[test]
    fn errors() {
        let p = DMatrix::from_element(5, 2, 1.0);
        assert!(matches!(
            hopkins_index(&p, 3, 1, 0),
            Err(Error::SampleSize { n: 5, m: 3 })
        ));
        assert!(matches!(hopkins_index(&p, 2, 1, 0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn schedule_shortage_names_bucket() {
        let tpt = vec![2, 2, 3, 3, 3];
        let p = DMatrix::from_fn(5, 3, |r, c| (r * 3 + c) as f64);
        let spaces = [SpacePositions { k: 4, positions: &p }];
        let sched = [Bucket { terms: 2, tracks: 2 }, Bucket { terms: 3, tracks: 4 }];
        match clusterability_protocol(&spaces, &tpt, &sched, BucketRule::Exact, 1, 0) {
            Err(Error::Schedule {
                terms: 3,
                needed: 4,
                available: 3,
            }) => {}
            other => panic!("{other:?}"),
        }
    }
}

#![allow(dead_code)]

use std::collections::HashMap;

use act_core::corpus::{build_tfidf, filter_corpus, match_terms, track_counts, Cell, TermDocMatrix};
use act_core::eval::{spearman_rho, TestTrack};
use act_core::moodspace::{
    act_variants, predict_dimension, project_track, ActModel, ActVariant, Dimension, MdsOptions,
};
use act_core::synthetic::{generate, SyntheticBenchmark, SyntheticOptions};
use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random nonnegative matrix with roughly `density` of its cells filled
/// (every row and column gets at least one cell).
pub fn random_matrix(rows: usize, cols: usize, density: f64, seed: u64) -> TermDocMatrix {
    let mut r = rng(seed);
    let mut filled = vec![vec![false; cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            filled[i][j] = r.gen::<f64>() < density;
        }
        let j = r.gen_range(0..cols);
        filled[i][j] = true;
    }
    for j in 0..cols {
        let i = r.gen_range(0..rows);
        filled[i][j] = true;
    }
    let mut cells = Vec::new();
    let mut doc_freq = vec![0; rows];
    for i in 0..rows {
        for j in 0..cols {
            if filled[i][j] {
                cells.push(Cell {
                    term: i,
                    track: j,
                    weight: r.gen_range(0.1..10.0),
                });
                doc_freq[i] += 1;
            }
        }
    }
    TermDocMatrix::from_parts(
        (0..rows).map(|i| format!("term{i:03}")).collect(),
        (0..cols).map(|j| format!("track{j:04}")).collect(),
        doc_freq,
        cells,
    )
    .unwrap()
}

/// Dense positive matrix wrapped as a TermDocMatrix.
pub fn dense_matrix(m: &DMatrix<f64>) -> TermDocMatrix {
    let mut cells = Vec::new();
    let mut doc_freq = vec![0; m.nrows()];
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] > 0.0 {
                cells.push(Cell {
                    term: i,
                    track: j,
                    weight: m[(i, j)],
                });
                doc_freq[i] += 1;
            }
        }
    }
    TermDocMatrix::from_parts(
        (0..m.nrows()).map(|i| format!("term{i:03}")).collect(),
        (0..m.ncols()).map(|j| format!("track{j:04}")).collect(),
        doc_freq,
        cells,
    )
    .unwrap()
}

pub fn benchmark(seed: u64) -> (SyntheticBenchmark, TermDocMatrix) {
    let bench = generate(&SyntheticOptions::new(seed)).unwrap();
    let matched = match_terms(&bench.train, &bench.vocabulary).unwrap();
    let matrix = build_tfidf(&filter_corpus(&matched, 100, 2).unwrap()).unwrap();
    (bench, matrix)
}

/// Held-out tracks with their term counts; tracks without any model term
/// are left out.
pub fn test_tracks(bench: &SyntheticBenchmark, matrix: &TermDocMatrix) -> Vec<TestTrack> {
    bench
        .test
        .track_tags()
        .into_iter()
        .map(|(track_id, t)| TestTrack {
            associations: track_counts(&t, &bench.vocabulary, matrix),
            track_id,
        })
        .filter(|t| !t.associations.is_empty())
        .collect()
}

pub fn fit_act(
    bench: &SyntheticBenchmark,
    matrix: &TermDocMatrix,
    variant: ActVariant,
    k: usize,
    seed: u64,
) -> ActModel {
    act_variants(matrix, &bench.anchors().unwrap(), variant, k, &MdsOptions::new(seed)).unwrap()
}

/// Spearman rho of predicted against planted valence and arousal over the
/// training tracks.
pub fn planted_recovery(bench: &SyntheticBenchmark, matrix: &TermDocMatrix, act: &ActModel) -> (f64, f64) {
    let moods: HashMap<&str, (f64, f64)> = bench
        .train_moods
        .iter()
        .map(|p| (p.name.as_str(), (p.valence, p.arousal)))
        .collect();
    let (mut pv, mut pa, mut tv, mut ta) = (vec![], vec![], vec![], vec![]);
    for j in 0..matrix.num_tracks() {
        let pos = project_track(act, &matrix.column(j)).unwrap();
        let (v, a) = moods[matrix.track_ids()[j].as_str()];
        pv.push(predict_dimension(&pos, Dimension::Valence));
        pa.push(predict_dimension(&pos, Dimension::Arousal));
        tv.push(v);
        ta.push(a);
    }
    (spearman_rho(&pv, &tv).unwrap(), spearman_rho(&pa, &ta).unwrap())
}

/// Average ranks computed by counting, independent of any sorting.
pub fn brute_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&w| w < v).count() as f64;
            let equal = x.iter().filter(|&&w| w == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn brute_spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (brute_ranks(x), brute_ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx).powi(2);
        syy += (ry[i] - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300) || (a - b).abs() < 1e-300
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations; eigenvalues
/// are returned unsorted with eigenvectors as columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-26 * a.norm_squared().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

pub fn synthetic_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic")
}

/// Runs the `act` binary in `dir`; returns exit code, stdout and stderr.
pub fn act(dir: &std::path::Path, args: &[&str]) -> (i32, String, String) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_act"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("act binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

/// Every pipeline step on the shipped synthetic corpus; inputs are copied
/// into `dir` so artifacts only carry bare file names.
pub const PIPELINE: &[&[&str]] = &[
    &[
        "build-vsm",
        "--tags",
        "corpus.tsv",
        "--vocab",
        "vocab.tsv",
        "--out",
        "vsm.json",
    ],
    &[
        "fit", "--vsm", "vsm.json", "--method", "svd", "--k", "8", "--out", "svd.json",
    ],
    &[
        "fit",
        "--vsm",
        "vsm.json",
        "--method",
        "nmf",
        "--k",
        "8",
        "--seed",
        "7",
        "--max-iter",
        "100",
        "--out",
        "nmf.json",
    ],
    &[
        "fit",
        "--vsm",
        "vsm.json",
        "--method",
        "plsa",
        "--k",
        "8",
        "--seed",
        "7",
        "--max-iter",
        "50",
        "--out",
        "plsa.json",
    ],
    &["dissim", "--model", "svd.json", "--out", "dissim.json"],
    &["mds", "--dissim", "dissim.json", "--seed", "7", "--out", "mds.json"],
    &[
        "act-fit",
        "--reference",
        "reference.tsv",
        "--mds",
        "mds.json",
        "--out",
        "act.json",
    ],
    &[
        "act-fit",
        "--reference",
        "reference.tsv",
        "--vsm",
        "vsm.json",
        "--variant",
        "svd-only",
        "--out",
        "act_svd.json",
    ],
    &[
        "predict",
        "--act",
        "act.json",
        "--vsm",
        "vsm.json",
        "--vocab",
        "vocab.tsv",
        "--tags",
        "test.tsv",
        "--terms",
        "happy,sad",
        "--out",
        "pred.tsv",
    ],
    &["proxy", "--act", "act.json", "--vsm", "vsm.json", "--out", "proxy.tsv"],
    &[
        "hopkins",
        "--vsm",
        "vsm.json",
        "--k",
        "4,8",
        "--seed",
        "7",
        "--runs",
        "3",
        "--schedule",
        "2:128,3:64,4:32",
        "--out",
        "hopkins.tsv",
    ],
    &[
        "evaluate",
        "--vsm",
        "vsm.json",
        "--vocab",
        "vocab.tsv",
        "--tags",
        "test.tsv",
        "--ratings",
        "ratings.tsv",
        "--method",
        "act",
        "--k",
        "4,8",
        "--reference",
        "reference.tsv",
        "--seed",
        "7",
        "--out",
        "eval_act.tsv",
    ],
    &[
        "evaluate",
        "--vsm",
        "vsm.json",
        "--vocab",
        "vocab.tsv",
        "--tags",
        "test.tsv",
        "--ratings",
        "ratings.tsv",
        "--method",
        "nmf",
        "--k",
        "8",
        "--proxy",
        "proxy.tsv",
        "--seed",
        "7",
        "--max-iter",
        "100",
        "--out",
        "eval_nmf.tsv",
    ],
    &[
        "evaluate",
        "--vsm",
        "vsm.json",
        "--vocab",
        "vocab.tsv",
        "--tags",
        "test.tsv",
        "--ratings",
        "ratings.tsv",
        "--method",
        "vsm",
        "--proxy",
        "proxy.tsv",
        "--out",
        "eval_vsm.tsv",
    ],
    &[
        "ablate",
        "--vsm",
        "vsm.json",
        "--vocab",
        "vocab.tsv",
        "--tags",
        "test.tsv",
        "--ratings",
        "ratings.tsv",
        "--reference",
        "reference.tsv",
        "--k",
        "8",
        "--runs",
        "2",
        "--seed",
        "7",
        "--out",
        "ablate.tsv",
    ],
];

pub const PIPELINE_INPUTS: &[&str] = &["corpus.tsv", "vocab.tsv", "test.tsv", "reference.tsv", "ratings.tsv"];

/// Runs the pipeline in `dir` and returns every produced artifact by name.
pub fn run_pipeline(dir: &std::path::Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    for f in PIPELINE_INPUTS {
        std::fs::copy(synthetic_dir().join(f), dir.join(f)).map_err(|e| format!("copy {f}: {e}"))?;
    }
    let mut outputs = Vec::new();
    for step in PIPELINE {
        let (code, _, err) = act(dir, step);
        if code != 0 {
            return Err(format!("`act {}` exited {code}: {err}", step.join(" ")));
        }
        let out = step[step.iter().position(|a| *a == "--out").unwrap() + 1];
        outputs.push((
            out.to_string(),
            std::fs::read(dir.join(out)).map_err(|e| e.to_string())?,
        ));
    }
    Ok(outputs)
}

#![allow(clippy::needless_range_loop)]

mod common;

use act_core::corpus::QueryVector;
use act_core::factorize::{svd_fit, term_dissimilarity};
use act_core::linalg::cosine_dissimilarity;
use act_core::moodspace::{
    act_variants, mds_embed, predict_dimension, predict_term_at, procrustes_align, procrustes_fit, project_track,
    ActVariant, Dimension, MdsOptions, ReferenceSpace,
};
use common::{benchmark, fit_act, planted_recovery, random_matrix, rng};
use nalgebra::{DMatrix, Matrix3, Rotation3, Vector3};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i:02}")).collect()
}

fn reference_for(terms: &[String], anchors: &[(f64, f64)]) -> ReferenceSpace {
    ReferenceSpace::new("test", terms.iter().zip(anchors).map(|(t, &(v, a))| (t.as_str(), v, a))).unwrap()
}

fn euclidean(points: &DMatrix<f64>) -> DMatrix<f64> {
    let n = points.nrows();
    DMatrix::from_fn(n, n, |a, b| (points.row(a) - points.row(b)).norm())
}

fn coords_strategy() -> impl Strategy<Value = (DMatrix<f64>, Vec<(f64, f64)>)> {
    (4usize..15, any::<u64>()).prop_map(|(n, seed)| {
        let mut r = rng(seed);
        let y = DMatrix::from_fn(n, 3, |_, _| r.gen_range(-2.0..2.0));
        let anchors = (0..n)
            .map(|_| (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        (y, anchors)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alignment_is_a_similarity_transform((y, anchors) in coords_strategy()) {
        let terms = names(y.nrows());
        let act = procrustes_align(&terms, &y, &reference_for(&terms, &anchors)).unwrap();
        let rtr = act.rotation.transpose() * act.rotation;
        prop_assert!((rtr - Matrix3::identity()).amax() < 1e-10);
        prop_assert!((act.rotation.determinant().abs() - 1.0).abs() < 1e-10);
        prop_assert!(act.scale > 0.0);
        for a in 0..y.nrows() {
            let xa = act.term_position(a);
            let manual = (y.row(a) * act.rotation * act.scale).transpose() + act.translation;
            prop_assert!((xa - manual).norm() < 1e-9);
            for b in 0..y.nrows() {
                let dx = (xa - act.term_position(b)).norm();
                let dy = (y.row(a) - y.row(b)).norm();
                prop_assert!((dx - act.scale * dy).abs() < 1e-9);
            }
        }
        prop_assert!(act.fit_x2_raw >= 0.0);
        prop_assert!(act.fit_x2_standardized >= 0.0 && act.fit_x2_standardized <= 1.0 + 1e-12);
    }

    #[test]
    fn track_position_stays_in_the_hull_of_its_terms((y, anchors) in coords_strategy(), seed in any::<u64>()) {
        let terms = names(y.nrows());
        let act = procrustes_align(&terms, &y, &reference_for(&terms, &anchors)).unwrap();
        let mut r = rng(seed);
        let n = y.nrows();
        let picked: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
        if picked.is_empty() { return Ok(()) }
        let q = QueryVector::new(n, picked.iter().map(|&i| (i, r.gen_range(0.01..5.0))).collect()).unwrap();
        let p = project_track(&act, &q).unwrap();
        // a point is in the hull iff no direction separates it from the vertices
        for _ in 0..200 {
            let d = Vector3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            let support = picked.iter().map(|&i| act.term_position(i).dot(&d)).fold(f64::MIN, f64::max);
            prop_assert!(p.dot(&d) <= support + 1e-9);
        }
    }

    #[test]
    fn read_off_is_linear((y, anchors) in coords_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>()) {
        let terms = names(y.nrows());
        let act = procrustes_align(&terms, &y, &reference_for(&terms, &anchors)).unwrap();
        let mut r = rng(seed);
        let mut v = || Vector3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let (t1, t2) = (v(), v());
        let mix = t1 * a + t2 * b;
        for dim in Dimension::ALL {
            let lhs = predict_dimension(&mix, dim);
            let rhs = a * predict_dimension(&t1, dim) + b * predict_dimension(&t2, dim);
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
        for i in 0..y.nrows() {
            let lhs = predict_term_at(&act, &mix, i).unwrap();
            let rhs = a * predict_term_at(&act, &t1, i).unwrap() + b * predict_term_at(&act, &t2, i).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}

#[test]
fn alignment_recovers_planted_similarity_transforms() {
    let mut r = rng(77);
    for _ in 0..20 {
        let n = r.gen_range(5..20);
        let x: Vec<(f64, f64)> = (0..n)
            .map(|_| (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let rot = Rotation3::from_euler_angles(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let scale = r.gen_range(0.2..5.0);
        let shift = Vector3::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        // y = (x - shift) R^T / scale, so aligning y should return x exactly
        let y = DMatrix::from_fn(n, 3, |i, c| {
            let xi = Vector3::new(x[i].0, x[i].1, 0.0);
            ((rot.matrix().transpose() * (xi - shift)) / scale)[c]
        });
        let terms = names(n);
        let act = procrustes_align(&terms, &y, &reference_for(&terms, &x)).unwrap();
        assert!(act.fit_x2_raw < 1e-10, "X2 {}", act.fit_x2_raw);
        assert!((act.scale - scale).abs() < 1e-6 * scale);
        for i in 0..n {
            let p = act.term_position(i);
            assert!((p - Vector3::new(x[i].0, x[i].1, 0.0)).norm() < 1e-6);
        }
    }
}

#[test]
fn mds_stress_is_monotone_and_embedding_centered() {
    let mut r = rng(5);
    for _ in 0..5 {
        let n = r.gen_range(6..25);
        let pts = DMatrix::from_fn(n, 4, |_, _| r.gen_range(-1.0..1.0));
        let e = mds_embed(&euclidean(&pts), &names(n), &MdsOptions::new(r.gen())).unwrap();
        assert!((0.0..=1.0).contains(&e.stress1));
        for trace in &e.stress_traces {
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{} then {}", w[0], w[1]);
            }
        }
        let finals: Vec<f64> = e.stress_traces.iter().map(|t| *t.last().unwrap()).collect();
        assert_eq!(e.stress1, finals[e.best_restart]);
        assert!(finals.iter().all(|&s| s >= e.stress1));
        for c in 0..3 {
            assert!(e.coords.column(c).mean().abs() < 1e-10);
        }
    }
}

#[test]
fn permuting_terms_permutes_outputs() {
    let mut r = rng(9);
    let n = 12;
    let pts = DMatrix::from_fn(n, 3, |_, _| r.gen_range(-1.0..1.0));
    let anchors: Vec<(f64, f64)> = (0..n).map(|i| (pts[(i, 0)], pts[(i, 1)])).collect();
    let terms = names(n);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut r);
    let pts_p = DMatrix::from_fn(n, 3, |i, c| pts[(perm[i], c)]);
    let terms_p: Vec<String> = perm.iter().map(|&i| terms[i].clone()).collect();
    let mut opts = MdsOptions::new(3);
    opts.restarts = 1;
    let fit = |p: &DMatrix<f64>, t: &[String]| {
        let e = mds_embed(&euclidean(p), t, &opts).unwrap();
        procrustes_fit(&e, &reference_for(&terms, &anchors)).unwrap()
    };
    let a = fit(&pts, &terms);
    let b = fit(&pts_p, &terms_p);
    assert!((a.fit_x2_raw - b.fit_x2_raw).abs() < 1e-8);
    for i in 0..n {
        let diff = (a.term_position(perm[i]) - b.term_position(i)).norm();
        assert!(
            diff < 1e-6,
            "term {i} moved by {diff}: {:?} vs {:?}",
            a.term_position(perm[i]),
            b.term_position(i)
        );
    }
}

#[test]
fn mds_only_matches_standard_at_full_rank() {
    let matrix = random_matrix(10, 40, 0.5, 13);
    let n = matrix.num_terms();
    let full = term_dissimilarity(&svd_fit(&matrix, n).unwrap()).unwrap();
    let raw = cosine_dissimilarity(&matrix.to_dense()).unwrap();
    assert!((&full - &raw).amax() < 1e-10);

    let mut r = rng(1);
    let anchors: Vec<(f64, f64)> = (0..n)
        .map(|_| (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect();
    let reference = reference_for(matrix.terms(), &anchors);
    let opts = MdsOptions::new(4);
    let std = act_variants(&matrix, &reference, ActVariant::Standard, n, &opts).unwrap();
    let mds = act_variants(&matrix, &reference, ActVariant::MdsOnly, n, &opts).unwrap();
    for j in 0..matrix.num_tracks() {
        let q = matrix.column(j);
        let (p, s) = (project_track(&std, &q).unwrap(), project_track(&mds, &q).unwrap());
        assert!((p - s).norm() < 1e-6, "track {j}: {p:?} vs {s:?}");
    }
}

#[test]
fn standard_variant_is_not_worse_than_alternatives() {
    for seed in [1, 2, 3] {
        let (bench, matrix) = benchmark(seed);
        let score = |v: ActVariant| {
            let (rv, ra) = planted_recovery(&bench, &matrix, &fit_act(&bench, &matrix, v, 16, seed));
            (rv + ra) / 2.0
        };
        let standard = score(ActVariant::Standard);
        for v in [ActVariant::SvdOnly, ActVariant::MdsOnly] {
            let other = score(v);
            assert!(
                standard >= other - 0.05,
                "seed {seed}: standard {standard} vs {v} {other}"
            );
        }
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::artifact::{ensure_writable, file_name, from_body, split_meta, upstream_param, write_json, write_tsv, Meta};
use super::{
    AblateArgs, ActFitArgs, BuildVsmArgs, Command, DissimArgs, EvaluateArgs, FitArgs, FitMethod, HopkinsArgs, MdsArgs,
    Method, Output, PredictArgs, ProxyArgs,
};
use crate::clusterability::{clusterability_protocol, SpacePositions};
use crate::corpus::{
    build_tfidf, filter_corpus, match_terms, track_counts, QueryVector, TagCorpus, TermDocMatrix, Vocabulary,
};
use crate::eval::{
    ablate_sparsity, act_scale_value, evaluate_predictions, resolve_scale, PredictionReport, Predictions, RatingsTable,
    ReportRow, ScaleTarget, TestTrack,
};
use crate::factorize::{nmf_fit, plsa_fit, svd_fit, term_dissimilarity, FitOptions, FoldInOptions, SemanticModel};
use crate::linalg::{cosine_dissimilarity, DissimilarityMatrix};
use crate::moodspace::{
    act_variants, center_of_mass, mds_embed, procrustes_fit, project_track, select_dimension_proxy, ActModel,
    ActVariant, Dimension, MdsEmbedding, ReferenceSpace,
};
use crate::{tsv, Error};

pub(super) enum Failure {
    Usage(String),
    /// a domain error, optionally with the item it concerns
    Domain(Error, Option<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e, None)
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

fn io_paths(cmd: &Command) -> (Vec<&Path>, &Output) {
    fn opt(p: &Option<PathBuf>) -> Option<&Path> {
        p.as_deref()
    }
    match cmd {
        Command::BuildVsm(a) => (vec![&a.tags, &a.vocab], &a.output),
        Command::Fit(a) => (vec![&a.vsm], &a.output),
        Command::Dissim(a) => (opt(&a.model).into_iter().chain(opt(&a.vsm)).collect(), &a.output),
        Command::Mds(a) => (vec![&a.dissim], &a.output),
        Command::ActFit(a) => (
            a.reference
                .iter()
                .map(PathBuf::as_path)
                .chain(opt(&a.mds))
                .chain(opt(&a.vsm))
                .collect(),
            &a.output,
        ),
        Command::Predict(a) => (vec![&a.act, &a.vsm, &a.vocab, &a.tags], &a.output),
        Command::Hopkins(a) => (vec![&a.vsm], &a.output),
        Command::Evaluate(a) => (
            [&a.vsm, &a.vocab, &a.tags, &a.ratings]
                .into_iter()
                .map(PathBuf::as_path)
                .chain(a.reference.iter().map(PathBuf::as_path))
                .chain(opt(&a.proxy))
                .collect(),
            &a.output,
        ),
        Command::Ablate(a) => (
            [&a.vsm, &a.vocab, &a.tags, &a.ratings]
                .into_iter()
                .map(PathBuf::as_path)
                .chain(a.reference.iter().map(PathBuf::as_path))
                .collect(),
            &a.output,
        ),
        Command::Proxy(a) => (vec![&a.act, &a.vsm], &a.output),
    }
}

pub(super) fn execute(cmd: &Command) -> Outcome {
    let (inputs, output) = io_paths(cmd);
    for p in inputs {
        if !p.is_file() {
            return usage(format!("input file {} does not exist", p.display()));
        }
    }
    ensure_writable(&output.out, output.overwrite)?;
    match cmd {
        Command::BuildVsm(a) => build_vsm(a),
        Command::Fit(a) => fit(a),
        Command::Dissim(a) => dissim(a),
        Command::Mds(a) => mds(a),
        Command::ActFit(a) => act_fit(a),
        Command::Predict(a) => predict(a),
        Command::Hopkins(a) => hopkins(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Ablate(a) => ablate(a),
        Command::Proxy(a) => proxy(a),
    }
}

fn load_matrix(meta: &mut Meta, path: &Path) -> Outcome<TermDocMatrix> {
    let text = meta.read("vsm", path)?;
    let (body, _) = split_meta(&text, path)?;
    Ok(from_body(body, path)?)
}

fn load_act(meta: &mut Meta, path: &Path) -> Outcome<ActModel> {
    let text = meta.read("act", path)?;
    let (body, _) = split_meta(&text, path)?;
    Ok(from_body(body, path)?)
}

fn load_vocab(meta: &mut Meta, path: &Path) -> Outcome<Vocabulary> {
    let text = meta.read("vocab", path)?;
    Ok(Vocabulary::from_tsv_str(&file_name(path), &text)?)
}

fn load_tags(meta: &mut Meta, path: &Path) -> Outcome<TagCorpus> {
    let text = meta.read("tags", path)?;
    Ok(TagCorpus::from_tsv_str(&file_name(path), &text)?)
}

fn load_ratings(meta: &mut Meta, path: &Path) -> Outcome<RatingsTable> {
    let text = meta.read("ratings", path)?;
    Ok(RatingsTable::from_tsv_str(&file_name(path), &text)?)
}

fn load_reference(meta: &mut Meta, paths: &[PathBuf]) -> Outcome<ReferenceSpace> {
    let mut merged: Option<ReferenceSpace> = None;
    for (i, p) in paths.iter().enumerate() {
        let role = if paths.len() == 1 {
            "reference".to_string()
        } else {
            format!("reference.{}", i + 1)
        };
        let text = meta.read(&role, p)?;
        let space = ReferenceSpace::from_tsv_str(&file_name(p), &text)?;
        match merged.as_mut() {
            Some(m) => m.merge(&space),
            None => merged = Some(space),
        }
    }
    match merged {
        Some(m) => Ok(m),
        None => usage("at least one --reference is required"),
    }
}

fn check_terms(act: &ActModel, matrix: &TermDocMatrix) -> Outcome {
    if act.terms != matrix.terms() {
        return Err(Error::Config("model terms differ from the TF-IDF matrix terms".into()).into());
    }
    Ok(())
}

/// Queries of all tracks in `tags`, in file order.
fn test_queries(tags: &TagCorpus, vocab: &Vocabulary, matrix: &TermDocMatrix) -> Outcome<Vec<(String, QueryVector)>> {
    tags.track_tags()
        .into_iter()
        .map(|(id, t)| {
            let counts = track_counts(&t, vocab, matrix);
            match matrix.query_from_counts(&counts) {
                Ok(q) => Ok((id, q)),
                Err(e) => Err(Failure::Domain(e, Some(format!("track `{id}`")))),
            }
        })
        .collect()
}

fn fit_acts(
    matrix: &TermDocMatrix,
    reference: &ReferenceSpace,
    variant: ActVariant,
    ks: &[usize],
    mds: &super::MdsFlags,
    seed: u64,
) -> Outcome<Vec<ActModel>> {
    // only the standard variant depends on the rank
    let ks = if variant == ActVariant::Standard { ks } else { &ks[..1] };
    Ok(ks
        .par_iter()
        .map(|&k| act_variants(matrix, reference, variant, k, &mds.options(3, seed)))
        .collect::<crate::Result<Vec<_>>>()?)
}

fn record_mds(meta: &mut Meta, m: &super::MdsFlags) {
    meta.param("restarts", m.restarts);
    meta.param("mds_max_iter", m.mds_max_iter);
    meta.param("mds_tol", m.mds_tol);
}

fn k_param(ks: &[usize]) -> String {
    ks.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn build_vsm(a: &BuildVsmArgs) -> Outcome {
    let mut meta = Meta::new("build-vsm");
    meta.param("min_prevalence", a.min_prevalence);
    meta.param("min_terms", a.min_terms);
    let tags = load_tags(&mut meta, &a.tags)?;
    let vocab = load_vocab(&mut meta, &a.vocab)?;
    let matched = match_terms(&tags, &vocab)?;
    let filtered = filter_corpus(&matched, a.min_prevalence, a.min_terms)?;
    let matrix = build_tfidf(&filtered)?;
    meta.param("num_terms", matrix.num_terms());
    meta.param("num_tracks", matrix.num_tracks());
    let body = serde_json::to_value(&matrix).map_err(|e| Error::Format(e.to_string()))?;
    Ok(write_json(&a.output.out, a.output.overwrite, body, &meta)?)
}

fn fit(a: &FitArgs) -> Outcome {
    let mut meta = Meta::new("fit");
    let matrix = load_matrix(&mut meta, &a.vsm)?;
    let opts = FitOptions {
        k: a.k,
        max_iter: a.max_iter,
        tol: a.tol,
        seed: a.seed,
    };
    meta.param("k", a.k);
    let model = match a.method {
        FitMethod::Svd => SemanticModel::Svd(svd_fit(&matrix, a.k)?),
        FitMethod::Nmf => SemanticModel::Nmf(nmf_fit(&matrix, &opts)?),
        FitMethod::Plsa => SemanticModel::Plsa(plsa_fit(&matrix, &opts)?),
    };
    meta.param("method", model.kind());
    if a.method != FitMethod::Svd {
        meta.param("seed", a.seed);
        meta.param("max_iter", a.max_iter);
        meta.param("tol", a.tol);
    }
    Ok(write_json(
        &a.output.out,
        a.output.overwrite,
        model.to_json_value()?,
        &meta,
    )?)
}

fn dissim(a: &DissimArgs) -> Outcome {
    let mut meta = Meta::new("dissim");
    let doc = if let Some(path) = &a.model {
        let text = meta.read("model", path)?;
        let (body, _) = split_meta(&text, path)?;
        let SemanticModel::Svd(svd) = SemanticModel::from_json_value(body)? else {
            return usage("dissim needs an SVD model (or --vsm)");
        };
        meta.param("source", "svd");
        meta.param("k", svd.k);
        DissimilarityMatrix {
            terms: svd.terms.clone(),
            values: term_dissimilarity(&svd)?,
        }
    } else {
        let path = a.vsm.as_deref().expect("clap requires --model or --vsm");
        let matrix = load_matrix(&mut meta, path)?;
        meta.param("source", "vsm");
        let values =
            cosine_dissimilarity(&matrix.to_dense()).map_err(|i| Error::DegenerateTerm(matrix.terms()[i].clone()))?;
        DissimilarityMatrix {
            terms: matrix.terms().to_vec(),
            values,
        }
    };
    let body = serde_json::to_value(&doc).map_err(|e| Error::Format(e.to_string()))?;
    Ok(write_json(&a.output.out, a.output.overwrite, body, &meta)?)
}

fn mds(a: &MdsArgs) -> Outcome {
    let mut meta = Meta::new("mds");
    let text = meta.read("dissim", &a.dissim)?;
    let (body, upstream) = split_meta(&text, &a.dissim)?;
    let doc: DissimilarityMatrix = from_body(body, &a.dissim)?;
    for key in ["k", "source"] {
        if let Some(v) = upstream_param(&upstream, key) {
            meta.param(key, v);
        }
    }
    meta.param("dims", a.dims);
    meta.param("seed", a.seed);
    record_mds(&mut meta, &a.mds);
    let embedding = mds_embed(&doc.values, &doc.terms, &a.mds.options(a.dims, a.seed))?;
    meta.param("stress1", embedding.stress1);
    let body = serde_json::to_value(&embedding).map_err(|e| Error::Format(e.to_string()))?;
    Ok(write_json(&a.output.out, a.output.overwrite, body, &meta)?)
}

fn act_fit(a: &ActFitArgs) -> Outcome {
    let mut meta = Meta::new("act-fit");
    let act = if let Some(path) = &a.mds {
        let text = meta.read("mds", path)?;
        let (body, upstream) = split_meta(&text, path)?;
        let embedding: MdsEmbedding = from_body(body, path)?;
        if embedding.dims != 3 {
            return usage(format!(
                "act-fit needs a 3-D embedding, got {} dimensions",
                embedding.dims
            ));
        }
        let reference = load_reference(&mut meta, &a.reference)?;
        let mut act = procrustes_fit(&embedding, &reference)?;
        act.provenance.variant = ActVariant::Standard.name().to_string();
        act.provenance.k = upstream_param(&upstream, "k").and_then(|k| k.parse().ok());
        act.provenance.seed = upstream_param(&upstream, "seed").and_then(|s| s.parse().ok());
        act
    } else {
        let path = a.vsm.as_deref().expect("clap requires --mds or --vsm");
        let variant = ActVariant::from(a.variant);
        let k = match (variant, a.k) {
            (ActVariant::Standard, None) => return usage("--k is required for the standard variant"),
            (_, k) => k.unwrap_or(3),
        };
        let matrix = load_matrix(&mut meta, path)?;
        let reference = load_reference(&mut meta, &a.reference)?;
        meta.param("seed", a.seed);
        record_mds(&mut meta, &a.mds_flags);
        act_variants(&matrix, &reference, variant, k, &a.mds_flags.options(3, a.seed))?
    };
    meta.param("variant", &act.provenance.variant);
    if let Some(k) = act.provenance.k {
        meta.param("k", k);
    }
    meta.param("matched_terms", act.matched_terms.len());
    let body = serde_json::to_value(&act).map_err(|e| Error::Format(e.to_string()))?;
    Ok(write_json(&a.output.out, a.output.overwrite, body, &meta)?)
}

fn predict(a: &PredictArgs) -> Outcome {
    let mut meta = Meta::new("predict");
    let act = load_act(&mut meta, &a.act)?;
    let matrix = load_matrix(&mut meta, &a.vsm)?;
    let vocab = load_vocab(&mut meta, &a.vocab)?;
    let tags = load_tags(&mut meta, &a.tags)?;
    check_terms(&act, &matrix)?;
    let mut scales: Vec<(String, ScaleTarget)> = Dimension::ALL
        .iter()
        .map(|&d| (d.name().to_string(), ScaleTarget::Dimension(d)))
        .collect();
    for t in a.terms.iter().flat_map(|l| &l.0) {
        let i = act
            .term_index(&crate::corpus::normalize(t))
            .ok_or_else(|| Error::UnknownTerm(t.clone()))?;
        scales.push((act.terms[i].clone(), ScaleTarget::Term(i)));
    }
    if let Some(terms) = &a.terms {
        meta.param("terms", terms.0.join(","));
    }
    let mut body = String::from("track_id\tscale\tvalue\n");
    for (id, q) in test_queries(&tags, &vocab, &matrix)? {
        let pos = project_track(&act, &q)?;
        for (name, target) in &scales {
            let _ = writeln!(body, "{id}\t{name}\t{}", act_scale_value(&act, &pos, *target)?);
        }
    }
    Ok(write_tsv(&a.output.out, a.output.overwrite, &body, &meta)?)
}

fn proxy(a: &ProxyArgs) -> Outcome {
    let mut meta = Meta::new("proxy");
    meta.param("min_share", a.min_share);
    let act = load_act(&mut meta, &a.act)?;
    let matrix = load_matrix(&mut meta, &a.vsm)?;
    check_terms(&act, &matrix)?;
    let proxies = select_dimension_proxy(&act, matrix.doc_freq(), matrix.num_tracks(), a.min_share)?;
    let mut body = String::from("dimension\tterm\tangle_deg\tprevalence\n");
    for p in proxies {
        let _ = writeln!(body, "{}\t{}\t{}\t{}", p.dimension, p.term, p.angle_deg, p.prevalence);
    }
    Ok(write_tsv(&a.output.out, a.output.overwrite, &body, &meta)?)
}

fn hopkins(a: &HopkinsArgs) -> Outcome {
    let mut meta = Meta::new("hopkins");
    let matrix = load_matrix(&mut meta, &a.vsm)?;
    meta.param("k", k_param(&a.k.0));
    meta.param("seed", a.seed);
    meta.param("runs", a.runs);
    meta.param(
        "schedule",
        a.schedule
            .0
            .iter()
            .map(|b| format!("{}:{}", b.terms, b.tracks))
            .collect::<Vec<_>>()
            .join(","),
    );
    meta.param("rule", format!("{:?}", a.rule).to_lowercase());
    record_mds(&mut meta, &a.mds);
    let columns: Vec<QueryVector> = (0..matrix.num_tracks()).map(|j| matrix.column(j)).collect();
    let terms_per_track: Vec<usize> = (0..matrix.num_tracks()).map(|j| matrix.column_cells(j).len()).collect();
    let positions =
        a.k.0
            .par_iter()
            .map(|&k| {
                let svd = svd_fit(&matrix, k)?;
                let embedding = mds_embed(&term_dissimilarity(&svd)?, matrix.terms(), &a.mds.options(3, a.seed))?;
                let mut pos = DMatrix::zeros(columns.len(), 3);
                for (j, q) in columns.iter().enumerate() {
                    pos.set_row(j, &center_of_mass(&embedding.coords, q)?.transpose());
                }
                Ok(pos)
            })
            .collect::<crate::Result<Vec<_>>>()?;
    let spaces: Vec<SpacePositions<'_>> =
        a.k.0
            .iter()
            .zip(&positions)
            .map(|(&k, p)| SpacePositions { k, positions: p })
            .collect();
    let rows = clusterability_protocol(&spaces, &terms_per_track, &a.schedule.0, a.rule.into(), a.runs, a.seed)?;
    let mut body = String::from("k\tH_mean\tH_sd\truns\n");
    for r in rows {
        let _ = writeln!(body, "{}\t{}\t{}\t{}", r.k, r.h_mean, r.h_sd, r.runs);
    }
    Ok(write_tsv(&a.output.out, a.output.overwrite, &body, &meta)?)
}

fn load_proxies(meta: &mut Meta, path: &Path) -> Outcome<BTreeMap<Dimension, String>> {
    let text = meta.read("proxy", path)?;
    let source = file_name(path);
    let records = tsv::parse(&source, &text, &["dimension", "term", "angle_deg", "prevalence"])?;
    let mut out = BTreeMap::new();
    for r in &records {
        let d: Dimension = r.fields[0].parse().map_err(|e: Error| Error::Parse {
            path: source.clone(),
            line: r.line,
            msg: e.to_string(),
        })?;
        out.insert(d, r.fields[1].trim().to_string());
    }
    Ok(out)
}

/// Resolves every rated scale to a dimension or model term; unknown scales
/// are returned separately.
fn rated_scales(ratings: &RatingsTable, terms: &[String]) -> (Vec<(String, ScaleTarget)>, Vec<String>) {
    let mut known = Vec::new();
    let mut unknown = Vec::new();
    for s in ratings.scales() {
        match resolve_scale(s, terms) {
            Some(t) => known.push((s.clone(), t)),
            None => unknown.push(s.clone()),
        }
    }
    (known, unknown)
}

fn evaluate(a: &EvaluateArgs) -> Outcome {
    let mut meta = Meta::new("evaluate");
    let matrix = load_matrix(&mut meta, &a.vsm)?;
    let vocab = load_vocab(&mut meta, &a.vocab)?;
    let tags = load_tags(&mut meta, &a.tags)?;
    let ratings = load_ratings(&mut meta, &a.ratings)?;
    let queries = test_queries(&tags, &vocab, &matrix)?;
    let (scales, unknown) = rated_scales(&ratings, matrix.terms());
    if scales.is_empty() {
        return Err(Error::Parameter("no rating scale names a dimension or model term".into()).into());
    }
    if !unknown.is_empty() {
        meta.param("skipped_scales", unknown.join(","));
    }
    let method = format!("{:?}", a.method).to_lowercase();
    meta.param("method", &method);
    meta.param("seed", a.seed);

    let mut rows: Vec<ReportRow> = Vec::new();
    match a.method {
        Method::Act => {
            if a.reference.is_empty() {
                return usage("--method act needs --reference");
            }
            let reference = load_reference(&mut meta, &a.reference)?;
            let variant = ActVariant::from(a.variant);
            meta.param("variant", variant.name());
            meta.param("k", k_param(&a.k.0));
            record_mds(&mut meta, &a.mds);
            for act in fit_acts(&matrix, &reference, variant, &a.k.0, &a.mds, a.seed)? {
                let mut predictions = Predictions::new();
                for (id, q) in &queries {
                    let pos = project_track(&act, q)?;
                    for (name, target) in &scales {
                        predictions
                            .entry(name.clone())
                            .or_default()
                            .insert(id.clone(), act_scale_value(&act, &pos, *target)?);
                    }
                }
                rows.extend(evaluate_predictions(&predictions, &ratings, &method, act.provenance.k)?);
            }
        }
        baseline => {
            let proxies = match &a.proxy {
                Some(p) => load_proxies(&mut meta, p)?,
                None => BTreeMap::new(),
            };
            let mut scale_terms = Vec::new();
            for (name, target) in &scales {
                let idx = match target {
                    ScaleTarget::Term(i) => *i,
                    ScaleTarget::Dimension(d) => {
                        let Some(term) = proxies.get(d) else {
                            return usage(format!("scale `{name}` needs a proxy term; pass --proxy"));
                        };
                        matrix
                            .term_index(term)
                            .ok_or_else(|| Error::UnknownTerm(term.clone()))?
                    }
                };
                scale_terms.push((name.clone(), idx));
            }
            let predict_all = |weights: &dyn Fn(&QueryVector) -> crate::Result<Vec<f64>>| -> Outcome<Predictions> {
                let mut predictions = Predictions::new();
                for (id, q) in &queries {
                    let w = weights(q)?;
                    for (name, idx) in &scale_terms {
                        predictions.entry(name.clone()).or_default().insert(id.clone(), w[*idx]);
                    }
                }
                Ok(predictions)
            };
            if baseline == Method::Vsm {
                let predictions = predict_all(&|q| Ok(q.to_dense().iter().copied().collect()))?;
                rows.extend(evaluate_predictions(&predictions, &ratings, &method, None)?);
            } else {
                meta.param("k", k_param(&a.k.0));
                meta.param("max_iter", a.max_iter);
                meta.param("tol", a.tol);
                meta.param("fold_in_iter", a.fold_in_iter);
                meta.param("fold_in_tol", a.fold_in_tol);
                let fold_in = FoldInOptions {
                    max_iter: a.fold_in_iter,
                    tol: a.fold_in_tol,
                };
                for &k in &a.k.0 {
                    let opts = FitOptions {
                        k,
                        max_iter: a.max_iter,
                        tol: a.tol,
                        seed: a.seed,
                    };
                    let model = match baseline {
                        Method::Svd => SemanticModel::Svd(svd_fit(&matrix, k)?),
                        Method::Nmf => SemanticModel::Nmf(nmf_fit(&matrix, &opts)?),
                        _ => SemanticModel::Plsa(plsa_fit(&matrix, &opts)?),
                    };
                    let predictions = predict_all(&|q| model.predict_weights(q, &fold_in))?;
                    rows.extend(evaluate_predictions(&predictions, &ratings, &method, Some(k))?);
                }
            }
        }
    }
    rows.sort_by(|x, y| x.scale.cmp(&y.scale).then(x.k.cmp(&y.k)));
    let report = PredictionReport {
        rows,
        metadata: BTreeMap::new(),
    };
    Ok(write_tsv(&a.output.out, a.output.overwrite, &report.to_tsv(), &meta)?)
}

fn ablate(a: &AblateArgs) -> Outcome {
    let mut meta = Meta::new("ablate");
    let matrix = load_matrix(&mut meta, &a.vsm)?;
    let vocab = load_vocab(&mut meta, &a.vocab)?;
    let tags = load_tags(&mut meta, &a.tags)?;
    let ratings = load_ratings(&mut meta, &a.ratings)?;
    let reference = load_reference(&mut meta, &a.reference)?;
    let variant = ActVariant::from(a.variant);
    meta.param("variant", variant.name());
    meta.param("k", k_param(&a.k.0));
    meta.param("runs", a.runs);
    meta.param("seed", a.seed);
    record_mds(&mut meta, &a.mds);
    let tracks: Vec<TestTrack> = tags
        .track_tags()
        .into_iter()
        .map(|(track_id, t)| TestTrack {
            associations: track_counts(&t, &vocab, &matrix),
            track_id,
        })
        .collect();
    if let Some(t) = tracks.iter().find(|t| t.associations.is_empty()) {
        return Err(Failure::Domain(
            Error::EmptyQuery,
            Some(format!("track `{}`", t.track_id)),
        ));
    }
    let (_, unknown) = rated_scales(&ratings, matrix.terms());
    if !unknown.is_empty() {
        meta.param("skipped_scales", unknown.join(","));
    }
    let acts = fit_acts(&matrix, &reference, variant, &a.k.0, &a.mds, a.seed)?;
    let report = ablate_sparsity(&tracks, &matrix, &acts, &ratings, a.runs, a.seed)?;
    Ok(write_tsv(&a.output.out, a.output.overwrite, &report.to_tsv(), &meta)?)
}

//! Planted valence-arousal benchmark.
//!
//! Thirty mood words sit on a jittered circumplex. Every track gets a planted
//! mood inside the unit disc and is tagged with 2 to 8 distinct words drawn
//! with probability decaying in distance from that mood. A held-out test set
//! is rated by simulated listeners whose ratings follow the planted mood.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::corpus::{TagAssignment, TagCorpus, Track, Vocabulary};
use crate::eval::{Rating, RatingsTable};
use crate::moodspace::ReferenceSpace;
use crate::{derive_seed, Error, Result};

/// Mood words in circumplex order, starting at positive valence and turning
/// towards high arousal.
pub const MOOD_WORDS: [&str; 30] = [
    "pleased",
    "happy",
    "cheerful",
    "joyful",
    "delighted",
    "excited",
    "energetic",
    "alert",
    "astonished",
    "intense",
    "tense",
    "alarmed",
    "afraid",
    "angry",
    "annoyed",
    "frustrated",
    "distressed",
    "miserable",
    "sad",
    "gloomy",
    "depressed",
    "bored",
    "tired",
    "sleepy",
    "dreamy",
    "relaxed",
    "calm",
    "serene",
    "peaceful",
    "content",
];

const INFLECTIONS: [(&str, &str); 6] = [
    ("happy", "happiness"),
    ("sad", "sadness"),
    ("angry", "anger"),
    ("relaxed", "relaxing"),
    ("calm", "calming"),
    ("energetic", "energy"),
];

const NOISE_TAGS: [&str; 8] = [
    "rock",
    "seen live",
    "female vocalists",
    "indie",
    "80s",
    "electronic",
    "favorite",
    "guitar",
];

#[derive(Debug, Clone)]
pub struct SyntheticOptions {
    pub num_tracks: usize,
    pub num_test_tracks: usize,
    pub num_raters: usize,
    pub min_terms: usize,
    pub max_terms: usize,
    /// width of the term-sampling kernel around a track's mood
    pub spread: f64,
    /// rating noise, in unit-disc coordinates
    pub rating_noise: f64,
    pub seed: u64,
}

impl SyntheticOptions {
    pub fn new(seed: u64) -> Self {
        SyntheticOptions {
            num_tracks: 2000,
            num_test_tracks: 300,
            num_raters: 5,
            min_terms: 2,
            max_terms: 8,
            spread: 0.45,
            rating_noise: 0.15,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Planted {
    pub name: String,
    pub valence: f64,
    pub arousal: f64,
}

#[derive(Debug, Clone)]
pub struct SyntheticBenchmark {
    pub terms: Vec<Planted>,
    pub vocabulary: Vocabulary,
    pub train: TagCorpus,
    pub train_moods: Vec<Planted>,
    pub test: TagCorpus,
    pub test_moods: Vec<Planted>,
    pub ratings: RatingsTable,
}

fn disc_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let theta = rng.gen::<f64>() * 2.0 * PI;
    let r = rng.gen::<f64>().sqrt();
    (r * theta.cos(), r * theta.sin())
}

fn planted_terms(rng: &mut ChaCha8Rng) -> Vec<Planted> {
    let step = 2.0 * PI / MOOD_WORDS.len() as f64;
    MOOD_WORDS
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let theta = i as f64 * step + (rng.gen::<f64>() - 0.5) * 0.3 * step;
            let r = 0.6 + 0.4 * rng.gen::<f64>();
            Planted {
                name: w.to_string(),
                valence: r * theta.cos(),
                arousal: r * theta.sin(),
            }
        })
        .collect()
}

fn surface_form(rng: &mut ChaCha8Rng, word: &str) -> String {
    let u: f64 = rng.gen();
    if let Some((_, infl)) = INFLECTIONS.iter().find(|(w, _)| *w == word) {
        if u < 0.3 {
            return infl.to_string();
        }
    }
    match u {
        u if u > 0.95 => format!("very {word}"),
        u if u > 0.9 => word.to_uppercase(),
        _ => word.to_string(),
    }
}

fn tag_tracks(
    rng: &mut ChaCha8Rng,
    terms: &[Planted],
    opts: &SyntheticOptions,
    prefix: &str,
    n: usize,
) -> Result<(TagCorpus, Vec<Planted>)> {
    let mut tracks = Vec::with_capacity(n);
    let mut assignments = Vec::new();
    let mut moods = Vec::with_capacity(n);
    for t in 0..n {
        let id = format!("{prefix}{t:05}");
        let (v, a) = disc_point(rng);
        let kernel: Vec<f64> = terms
            .iter()
            .map(|p| {
                let d2 = (p.valence - v).powi(2) + (p.arousal - a).powi(2);
                (-d2 / (2.0 * opts.spread * opts.spread)).exp()
            })
            .collect();
        let title = if rng.gen::<f64>() < 0.03 {
            format!("{} song", terms[rng.gen_range(0..terms.len())].name)
        } else {
            format!("Track {t}")
        };
        tracks.push(Track {
            track_id: id.clone(),
            artist: format!("Artist {}", rng.gen_range(0..400)),
            title,
        });
        let count = rng.gen_range(opts.min_terms..=opts.max_terms).min(terms.len());
        let mut weights = kernel.clone();
        for _ in 0..count {
            let i = WeightedIndex::new(&weights)
                .map_err(|e| Error::Degenerate(format!("term sampling: {e}")))?
                .sample(rng);
            weights[i] = 0.0;
            let c = 1 + (99.0 * kernel[i] * rng.gen_range(0.3..1.0)).round() as u32;
            assignments.push(TagAssignment {
                track_id: id.clone(),
                tag: surface_form(rng, &terms[i].name),
                count: c.min(100),
            });
        }
        if rng.gen::<f64>() < 0.5 {
            assignments.push(TagAssignment {
                track_id: id.clone(),
                tag: NOISE_TAGS[rng.gen_range(0..NOISE_TAGS.len())].to_string(),
                count: rng.gen_range(1..=100),
            });
        }
        moods.push(Planted {
            name: id,
            valence: v,
            arousal: a,
        });
    }
    Ok((TagCorpus::new(tracks, assignments)?, moods))
}

fn to_likert(x: f64) -> f64 {
    (5.0 + 4.0 * x).round().clamp(1.0, 9.0)
}

pub fn generate(opts: &SyntheticOptions) -> Result<SyntheticBenchmark> {
    if opts.min_terms == 0 || opts.min_terms > opts.max_terms || opts.spread <= 0.0 || opts.num_raters == 0 {
        return Err(Error::Parameter("invalid synthetic benchmark options".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, 0));
    let terms = planted_terms(&mut rng);
    let vocabulary = Vocabulary::new(terms.iter().map(|p| {
        let infl: Vec<String> = INFLECTIONS
            .iter()
            .filter(|(w, _)| *w == p.name)
            .map(|(_, i)| i.to_string())
            .collect();
        (p.name.clone(), infl)
    }))?;

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, 1));
    let (train, train_moods) = tag_tracks(&mut rng, &terms, opts, "tr", opts.num_tracks)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, 2));
    let (test, test_moods) = tag_tracks(&mut rng, &terms, opts, "te", opts.num_test_tracks)?;

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(opts.seed, 3));
    let noise = Normal::new(0.0, opts.rating_noise).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut rows = Vec::new();
    for m in &test_moods {
        let tension = (m.arousal - m.valence) / SQRT_2;
        for r in 0..opts.num_raters {
            for (scale, x) in [("valence", m.valence), ("arousal", m.arousal), ("tension", tension)] {
                rows.push(Rating {
                    track_id: m.name.clone(),
                    rater_id: format!("r{r:02}"),
                    scale: scale.to_string(),
                    value: to_likert(x + noise.sample(&mut rng)),
                });
            }
        }
    }
    Ok(SyntheticBenchmark {
        terms,
        vocabulary,
        train,
        train_moods,
        test,
        test_moods,
        ratings: RatingsTable::new(rows)?,
    })
}

impl SyntheticBenchmark {
    /// Every other planted term (15 of 30) as a reference space.
    pub fn anchors(&self) -> Result<ReferenceSpace> {
        ReferenceSpace::new(
            "planted",
            self.terms
                .iter()
                .step_by(2)
                .map(|p| (p.name.as_str(), p.valence, p.arousal)),
        )
    }

    /// Writes vocab.tsv, corpus.tsv, test.tsv, reference.tsv, ratings.tsv
    /// and planted.tsv into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, text: String| {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))
        };
        let mut vocab = String::from("term\tinflections\n");
        for e in self.vocabulary.entries() {
            let _ = writeln!(vocab, "{}\t{}", e.term, e.inflections.join(","));
        }
        write("vocab.tsv", vocab)?;
        write("corpus.tsv", corpus_tsv(&self.train))?;
        write("test.tsv", corpus_tsv(&self.test))?;

        let mut reference = String::from("# synthetic planted positions, not empirical data\nterm\tvalence\tarousal\n");
        for (t, v, a) in self.anchors()?.entries() {
            let _ = writeln!(reference, "{t}\t{v}\t{a}");
        }
        write("reference.tsv", reference)?;

        let mut ratings = String::from("track_id\trater_id\tscale\tvalue\n");
        for r in self.ratings.rows() {
            let _ = writeln!(ratings, "{}\t{}\t{}\t{}", r.track_id, r.rater_id, r.scale, r.value);
        }
        write("ratings.tsv", ratings)?;

        let mut planted = String::from("kind\tname\tvalence\tarousal\n");
        for (kind, list) in [
            ("term", &self.terms),
            ("train", &self.train_moods),
            ("test", &self.test_moods),
        ] {
            for p in list {
                let _ = writeln!(planted, "{kind}\t{}\t{}\t{}", p.name, p.valence, p.arousal);
            }
        }
        write("planted.tsv", planted)
    }
}

fn corpus_tsv(corpus: &TagCorpus) -> String {
    let mut out = String::from("track_id\tartist\ttitle\ttag\tcount\n");
    let tracks: std::collections::HashMap<&str, &Track> =
        corpus.tracks().iter().map(|t| (t.track_id.as_str(), t)).collect();
    for a in corpus.assignments() {
        let t = tracks[a.track_id.as_str()];
        let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", a.track_id, t.artist, t.title, a.tag, a.count);
    }
    out
}

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::matching::{match_track, MatchedCorpus, TrackTags};
use super::vocab::Vocabulary;
use crate::{Error, Result, FORMAT_VERSION};

/// `(count + 1) * ln(R / f)`.
pub fn tfidf_weight(count: u32, num_tracks: usize, doc_freq: usize) -> f64 {
    (f64::from(count) + 1.0) * (num_tracks as f64 / doc_freq as f64).ln()
}

/// Sparse vector over the terms of a model. Entries are sorted by index with
/// no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl QueryVector {
    pub fn new(dim: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|e| e.0);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidQuery(format!("duplicate index {}", w[0].0)));
            }
        }
        if let Some(&(i, _)) = entries.iter().find(|e| e.0 >= dim) {
            return Err(Error::InvalidQuery(format!("index {i} out of range for {dim} terms")));
        }
        if entries.iter().any(|e| !e.1.is_finite()) {
            return Err(Error::InvalidQuery("non-finite weight".into()));
        }
        Ok(QueryVector { dim, entries })
    }

    /// Builds a query from a dense slice, keeping non-zero entries.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, *v))
            .collect();
        Self::new(values.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|e| e.1 == 0.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.entries
            .binary_search_by_key(&idx, |e| e.0)
            .map(|p| self.entries[p].1)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        for &(i, w) in &self.entries {
            v[i] = w;
        }
        v
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::InvalidQuery(format!(
                "query has {} terms, model has {dim}",
                self.dim
            )));
        }
        Ok(())
    }

    pub(crate) fn require_nonnegative(&self) -> Result<()> {
        if self.entries.iter().any(|e| e.1 < 0.0) {
            return Err(Error::InvalidQuery("negative weight".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub term: usize,
    pub track: usize,
    pub weight: f64,
}

/// Sparse TF-IDF term-document matrix (terms are rows, tracks columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TermDocMatrixDoc", into = "TermDocMatrixDoc")]
pub struct TermDocMatrix {
    terms: Vec<String>,
    track_ids: Vec<String>,
    doc_freq: Vec<usize>,
    num_tracks: usize,
    /// sorted by (track, term)
    cells: Vec<Cell>,
    col_ptr: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct TermDocMatrixDoc {
    version: u32,
    terms: Vec<String>,
    track_ids: Vec<String>,
    doc_freq: Vec<usize>,
    num_tracks: usize,
    cells: Vec<(usize, usize, f64)>,
}

impl From<TermDocMatrix> for TermDocMatrixDoc {
    fn from(m: TermDocMatrix) -> Self {
        TermDocMatrixDoc {
            version: FORMAT_VERSION,
            cells: m.cells.iter().map(|c| (c.term, c.track, c.weight)).collect(),
            terms: m.terms,
            track_ids: m.track_ids,
            doc_freq: m.doc_freq,
            num_tracks: m.num_tracks,
        }
    }
}

impl TryFrom<TermDocMatrixDoc> for TermDocMatrix {
    type Error = Error;

    fn try_from(doc: TermDocMatrixDoc) -> Result<Self> {
        if doc.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported matrix version {}", doc.version)));
        }
        let cells = doc
            .cells
            .into_iter()
            .map(|(term, track, weight)| Cell { term, track, weight })
            .collect();
        TermDocMatrix::from_parts(doc.terms, doc.track_ids, doc.doc_freq, cells)
    }
}

impl TermDocMatrix {
    /// Assembles a matrix from explicit cells, checking every invariant.
    pub fn from_parts(
        terms: Vec<String>,
        track_ids: Vec<String>,
        doc_freq: Vec<usize>,
        mut cells: Vec<Cell>,
    ) -> Result<Self> {
        if doc_freq.len() != terms.len() {
            return Err(Error::Format("doc_freq length differs from terms".into()));
        }
        cells.sort_by_key(|c| (c.track, c.term));
        let mut seen = vec![0usize; terms.len()];
        for (n, c) in cells.iter().enumerate() {
            if c.term >= terms.len() || c.track >= track_ids.len() {
                return Err(Error::Format(format!("cell ({}, {}) out of range", c.term, c.track)));
            }
            if !(c.weight > 0.0 && c.weight.is_finite()) {
                return Err(Error::Format(format!(
                    "cell ({}, {}) has non-positive weight",
                    c.term, c.track
                )));
            }
            if n > 0 && (cells[n - 1].track, cells[n - 1].term) == (c.track, c.term) {
                return Err(Error::Format(format!("duplicate cell ({}, {})", c.term, c.track)));
            }
            seen[c.term] += 1;
        }
        if seen != doc_freq {
            return Err(Error::Format("doc_freq does not match stored cells".into()));
        }
        let mut col_ptr = vec![0usize; track_ids.len() + 1];
        for c in &cells {
            col_ptr[c.track + 1] += 1;
        }
        for j in 0..track_ids.len() {
            col_ptr[j + 1] += col_ptr[j];
        }
        Ok(TermDocMatrix {
            num_tracks: track_ids.len(),
            terms,
            track_ids,
            doc_freq,
            cells,
            col_ptr,
        })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn track_ids(&self) -> &[String] {
        &self.track_ids
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn num_tracks(&self) -> usize {
        self.num_tracks
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }

    /// Stored cells of track `j`, sorted by term.
    pub fn column_cells(&self, j: usize) -> &[Cell] {
        &self.cells[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn column(&self, j: usize) -> QueryVector {
        QueryVector {
            dim: self.terms.len(),
            entries: self.column_cells(j).iter().map(|c| (c.term, c.weight)).collect(),
        }
    }

    /// Dense terms x tracks materialization.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.terms.len(), self.num_tracks);
        for c in &self.cells {
            m[(c.term, c.track)] = c.weight;
        }
        m
    }

    /// Applies the TF-IDF weighting with this matrix's track count and
    /// document frequencies to `(term index, raw count)` pairs.
    pub fn query_from_counts(&self, counts: &[(usize, u32)]) -> Result<QueryVector> {
        let mut merged: HashMap<usize, u32> = HashMap::new();
        for &(i, c) in counts {
            if i >= self.terms.len() {
                return Err(Error::InvalidQuery(format!("term index {i} out of range")));
            }
            *merged.entry(i).or_insert(0) += c;
        }
        if merged.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let entries = merged
            .into_iter()
            .map(|(i, c)| (i, tfidf_weight(c, self.num_tracks, self.doc_freq[i])))
            .collect();
        QueryVector::new(self.terms.len(), entries)
    }
}

/// Builds the TF-IDF matrix of a filtered corpus. Zero-count associations
/// are kept and weighted `ln(R / f)`.
pub fn build_tfidf(corpus: &MatchedCorpus) -> Result<TermDocMatrix> {
    if corpus.associations.is_empty() || corpus.track_ids.is_empty() {
        return Err(Error::EmptyCorpus("tf-idf construction".into()));
    }
    let r = corpus.track_ids.len();
    let doc_freq = corpus.term_prevalence();
    for (i, &f) in doc_freq.iter().enumerate() {
        if f == 0 || f >= r {
            return Err(Error::DegenerateTerm(corpus.terms[i].clone()));
        }
    }
    let cells = corpus
        .associations
        .iter()
        .map(|a| Cell {
            term: a.term,
            track: a.track,
            weight: tfidf_weight(a.count, r, doc_freq[a.term]),
        })
        .collect();
    TermDocMatrix::from_parts(corpus.terms.clone(), corpus.track_ids.clone(), doc_freq, cells)
}

/// Raw matched counts of an unseen track as `(matrix term index, count)`.
/// Tags that match no term of the matrix are ignored.
pub fn track_counts(track: &TrackTags, vocab: &Vocabulary, matrix: &TermDocMatrix) -> Vec<(usize, u32)> {
    let lookup: HashMap<&str, usize> = matrix.terms.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
    match_track(vocab, track)
        .into_iter()
        .filter_map(|(v, c)| lookup.get(vocab.term(v)).map(|&i| (i, c)))
        .collect()
}

/// Turns the raw tags of an unseen track into a query over `matrix`'s terms.
pub fn vectorize_track(track: &TrackTags, vocab: &Vocabulary, matrix: &TermDocMatrix) -> Result<QueryVector> {
    matrix.query_from_counts(&track_counts(track, vocab, matrix))
}

use std::path::Path;

use crate::corpus::normalize;
use crate::{tsv, Error, Result};

/// Valence/arousal positions of anchor terms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReferenceSpace {
    /// (normalized term, valence, arousal), unique terms
    entries: Vec<(String, f64, f64)>,
    pub source_label: String,
}

impl ReferenceSpace {
    /// Later entries for an already-defined term replace the earlier position.
    pub fn new<S: AsRef<str>>(label: &str, entries: impl IntoIterator<Item = (S, f64, f64)>) -> Result<Self> {
        let mut out = ReferenceSpace {
            entries: Vec::new(),
            source_label: label.to_string(),
        };
        for (term, v, a) in entries {
            out.insert(term.as_ref(), v, a)?;
        }
        Ok(out)
    }

    fn insert(&mut self, term: &str, valence: f64, arousal: f64) -> Result<()> {
        let term = normalize(term);
        if term.is_empty() {
            return Err(Error::Config("empty reference term".into()));
        }
        for v in [valence, arousal] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::Config(format!(
                    "reference value {v} for `{term}` outside [-1, 1]"
                )));
            }
        }
        match self.entries.iter_mut().find(|e| e.0 == term) {
            Some(e) => {
                e.1 = valence;
                e.2 = arousal;
            }
            None => self.entries.push((term, valence, arousal)),
        }
        Ok(())
    }

    /// Reads `term<TAB>valence<TAB>arousal`.
    pub fn from_tsv_str(source: &str, text: &str) -> Result<Self> {
        let records = tsv::parse(source, text, &["term", "valence", "arousal"])?;
        let mut out = ReferenceSpace {
            entries: Vec::new(),
            source_label: source.to_string(),
        };
        for r in &records {
            let v: f64 = tsv::field(source, r, 1, "valence")?;
            let a: f64 = tsv::field(source, r, 2, "arousal")?;
            out.insert(r.fields[0], v, a).map_err(|e| Error::Parse {
                path: source.into(),
                line: r.line,
                msg: e.to_string(),
            })?;
        }
        Ok(out)
    }

    pub fn from_tsv_path(path: &Path) -> Result<Self> {
        let text = tsv::read_file(path)?;
        let label = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::from_tsv_str(&label, &text)
    }

    /// Overlays `other` on top of `self`.
    pub fn merge(&mut self, other: &ReferenceSpace) {
        for (t, v, a) in &other.entries {
            // values were validated when `other` was built
            let _ = self.insert(t, *v, *a);
        }
        self.source_label = if self.source_label.is_empty() {
            other.source_label.clone()
        } else {
            format!("{}+{}", self.source_label, other.source_label)
        };
    }

    pub fn get(&self, term: &str) -> Option<(f64, f64)> {
        let key = normalize(term);
        self.entries.iter().find(|e| e.0 == key).map(|e| (e.1, e.2))
    }

    pub fn entries(&self) -> &[(String, f64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

use std::collections::HashMap;
use std::path::Path;

use crate::{tsv, Error, Result};

/// Lowercases, turns every run of non-alphanumeric characters into a single
/// space and trims. Hyphens therefore separate words.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.extend(c.to_lowercase());
        } else {
            pending_space = true;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub term: String,
    pub inflections: Vec<String>,
}

/// Controlled vocabulary of canonical terms and their surface forms.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    /// normalized phrase -> canonical index
    phrases: HashMap<String, usize>,
    max_words: usize,
}

impl Vocabulary {
    pub fn new<I, S>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut out: Vec<VocabEntry> = Vec::new();
        let mut phrases: HashMap<String, usize> = HashMap::new();
        let mut max_words = 0;

        let raw: Vec<(String, Vec<String>)> = entries
            .into_iter()
            .map(|(t, infl)| {
                (
                    normalize(t.as_ref()),
                    infl.iter().map(|s| normalize(s.as_ref())).collect(),
                )
            })
            .collect();

        // canonical terms claim their own phrase first so that an inflection
        // colliding with another canonical term is reported
        for (idx, (term, _)) in raw.iter().enumerate() {
            if term.is_empty() {
                return Err(Error::Config(format!("vocabulary entry {} is empty", idx + 1)));
            }
            if phrases.insert(term.clone(), idx).is_some() {
                return Err(Error::Config(format!("duplicate vocabulary term `{term}`")));
            }
        }
        let names: Vec<String> = raw.iter().map(|(t, _)| t.clone()).collect();
        for (idx, (term, inflections)) in raw.into_iter().enumerate() {
            let mut kept = Vec::new();
            for infl in inflections {
                if infl.is_empty() || infl == term {
                    continue;
                }
                match phrases.get(&infl) {
                    Some(&owner) if owner == idx => continue,
                    Some(&owner) => {
                        return Err(Error::Config(format!(
                            "inflection `{infl}` of `{term}` already belongs to `{}`",
                            names[owner]
                        )))
                    }
                    None => {
                        phrases.insert(infl.clone(), idx);
                        kept.push(infl);
                    }
                }
            }
            out.push(VocabEntry {
                term,
                inflections: kept,
            });
        }
        for p in phrases.keys() {
            max_words = max_words.max(p.split(' ').count());
        }
        if out.is_empty() {
            return Err(Error::Config("vocabulary is empty".into()));
        }
        Ok(Vocabulary {
            entries: out,
            phrases,
            max_words,
        })
    }

    /// Reads the `term<TAB>inflections` format; inflections are comma-separated.
    pub fn from_tsv_str(source: &str, text: &str) -> Result<Self> {
        let records = tsv::parse(source, text, &["term", "inflections"])?;
        let entries: Vec<(String, Vec<String>)> = records
            .iter()
            .map(|r| {
                let infl = r.fields[1]
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
                (r.fields[0].trim().to_string(), infl)
            })
            .collect();
        if entries.is_empty() {
            return Err(Error::Config(format!("{source}: vocabulary is empty")));
        }
        Self::new(entries)
    }

    pub fn from_tsv_path(path: &Path) -> Result<Self> {
        let text = tsv::read_file(path)?;
        Self::from_tsv_str(&path.display().to_string(), &text)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn term(&self, idx: usize) -> &str {
        &self.entries[idx].term
    }

    /// Canonical indices of every vocabulary phrase occurring in `normalized`
    /// as a whole word or a whole run of consecutive words.
    pub fn terms_in(&self, normalized: &str) -> Vec<usize> {
        let words: Vec<&str> = normalized.split(' ').filter(|w| !w.is_empty()).collect();
        let mut found = Vec::new();
        for len in 1..=self.max_words.min(words.len()) {
            for window in words.windows(len) {
                if let Some(&idx) = self.phrases.get(&window.join(" ")) {
                    found.push(idx);
                }
            }
        }
        found.sort_unstable();
        found.dedup();
        found
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(entries: &[(&str, &[&str])]) -> Vocabulary {
        Vocabulary::new(entries.iter().map(|(t, i)| (*t, i.to_vec()))).unwrap()
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize("  Happy--Hardcore!! "), "happy hardcore");
        assert_eq!(normalize("feel-good"), "feel good");
        assert_eq!(normalize("ÜBER  Sad"), "über sad");
        assert_eq!(normalize("!!!"), "");
    }

    #[test]
    fn whole_word_matching() {
        let v = vocab(&[("happy", &[]), ("feel good", &["feelgood"])]);
        assert_eq!(v.terms_in(&normalize("happy hardcore")), vec![0]);
        assert!(v.terms_in(&normalize("unhappy")).is_empty());
        assert_eq!(v.terms_in(&normalize("Feel-Good music")), vec![1]);
        assert_eq!(v.terms_in(&normalize("feelgood")), vec![1]);
        assert!(v.terms_in(&normalize("feel goodness")).is_empty());
    }

    #[test]
    fn rejects_conflicts() {
        let dup = Vocabulary::new(vec![("Sad", vec![]), ("sad ", vec![])]);
        assert!(matches!(dup, Err(Error::Config(_))));
        let clash = Vocabulary::new(vec![("sad", vec!["blue"]), ("blue", vec![])]);
        assert!(matches!(clash, Err(Error::Config(_))));
        let shared = Vocabulary::new(vec![("sad", vec!["down"]), ("low", vec!["down"])]);
        assert!(matches!(shared, Err(Error::Config(_))));
        let empty = Vocabulary::new(Vec::<(&str, Vec<&str>)>::new());
        assert!(matches!(empty, Err(Error::Config(_))));
    }

    #[test]
    fn tsv_format() {
        let v = Vocabulary::from_tsv_str("v", "term\tinflections\nsad\tsadness, saddest\nhappy\t\n").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.entries()[0].inflections, vec!["sadness", "saddest"]);
        assert_eq!(v.terms_in("saddest song"), vec![0]);
        assert!(Vocabulary::from_tsv_str("v", "term\tinflections\n").is_err());
        assert!(Vocabulary::from_tsv_str("v", "word\tforms\nsad\t\n").is_err());
    }
}

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use super::vocab::{normalize, Vocabulary};
use crate::{tsv, Error, Result};

pub const MAX_TAG_COUNT: u32 = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Track {
    pub track_id: String,
    pub artist: String,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagAssignment {
    pub track_id: String,
    pub tag: String,
    /// Normalized count in `0..=100` as delivered by the tag source.
    pub count: u32,
}

/// Metadata and raw tags of a single track, the unit that gets vectorized.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrackTags {
    pub artist: String,
    pub title: String,
    pub tags: Vec<(String, u32)>,
}

/// Raw tag/track corpus. Duplicate `(track, tag)` rows (compared after
/// normalization) are merged by keeping the maximum count.
#[derive(Debug, Clone, PartialEq)]
pub struct TagCorpus {
    tracks: Vec<Track>,
    assignments: Vec<TagAssignment>,
}

impl TagCorpus {
    pub fn new(tracks: Vec<Track>, assignments: Vec<TagAssignment>) -> Result<Self> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, t) in tracks.iter().enumerate() {
            if index.insert(t.track_id.as_str(), i).is_some() {
                return Err(Error::Config(format!("duplicate track id `{}`", t.track_id)));
            }
        }
        let mut merged: BTreeMap<(usize, String), usize> = BTreeMap::new();
        let mut kept: Vec<TagAssignment> = Vec::new();
        for a in assignments {
            if a.count > MAX_TAG_COUNT {
                return Err(Error::Config(format!(
                    "tag count {} for `{}` outside 0..=100",
                    a.count, a.track_id
                )));
            }
            let Some(&ti) = index.get(a.track_id.as_str()) else {
                return Err(Error::Config(format!(
                    "assignment references unknown track `{}`",
                    a.track_id
                )));
            };
            match merged.entry((ti, normalize(&a.tag))) {
                std::collections::btree_map::Entry::Occupied(e) => {
                    let k = &mut kept[*e.get()];
                    k.count = k.count.max(a.count);
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(kept.len());
                    kept.push(a);
                }
            }
        }
        Ok(TagCorpus {
            tracks,
            assignments: kept,
        })
    }

    /// Parses the `track_id<TAB>artist<TAB>title<TAB>tag<TAB>count` format.
    /// Track metadata must agree across the rows of a track.
    pub fn from_tsv_str(source: &str, text: &str) -> Result<Self> {
        let records = tsv::parse(source, text, &["track_id", "artist", "title", "tag", "count"])?;
        let mut tracks: Vec<Track> = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        let mut assignments = Vec::with_capacity(records.len());
        for r in &records {
            let track = Track {
                track_id: r.fields[0].trim().to_string(),
                artist: r.fields[1].to_string(),
                title: r.fields[2].to_string(),
            };
            if track.track_id.is_empty() {
                return Err(Error::Parse {
                    path: source.into(),
                    line: r.line,
                    msg: "empty track_id".into(),
                });
            }
            let count: u32 = tsv::field(source, r, 4, "count")?;
            if count > MAX_TAG_COUNT {
                return Err(Error::Parse {
                    path: source.into(),
                    line: r.line,
                    msg: format!("count {count} outside 0..=100"),
                });
            }
            match seen.get(&track.track_id) {
                Some(&i) if tracks[i] != track => {
                    return Err(Error::Parse {
                        path: source.into(),
                        line: r.line,
                        msg: format!("conflicting artist/title for track `{}`", track.track_id),
                    })
                }
                Some(_) => {}
                None => {
                    seen.insert(track.track_id.clone(), tracks.len());
                    tracks.push(track.clone());
                }
            }
            assignments.push(TagAssignment {
                track_id: track.track_id,
                tag: r.fields[3].to_string(),
                count,
            });
        }
        Self::new(tracks, assignments)
    }

    pub fn from_tsv_path(path: &Path) -> Result<Self> {
        let text = tsv::read_file(path)?;
        Self::from_tsv_str(&path.display().to_string(), &text)
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn assignments(&self) -> &[TagAssignment] {
        &self.assignments
    }

    /// Groups assignments per track, in track order.
    pub fn track_tags(&self) -> Vec<(String, TrackTags)> {
        let mut by_track: HashMap<&str, Vec<(String, u32)>> = HashMap::new();
        for a in &self.assignments {
            by_track
                .entry(a.track_id.as_str())
                .or_default()
                .push((a.tag.clone(), a.count));
        }
        self.tracks
            .iter()
            .map(|t| {
                (
                    t.track_id.clone(),
                    TrackTags {
                        artist: t.artist.clone(),
                        title: t.title.clone(),
                        tags: by_track.remove(t.track_id.as_str()).unwrap_or_default(),
                    },
                )
            })
            .collect()
    }
}

/// One matched `(track, term)` association with its summed raw count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Association {
    pub track: usize,
    pub term: usize,
    pub count: u32,
}

/// Term-level corpus: associations between tracks and canonical terms.
/// `associations` is sorted by `(track, term)` with unique pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchedCorpus {
    pub terms: Vec<String>,
    pub track_ids: Vec<String>,
    pub associations: Vec<Association>,
}

impl MatchedCorpus {
    /// Number of distinct tracks per term.
    pub fn term_prevalence(&self) -> Vec<usize> {
        let mut out = vec![0; self.terms.len()];
        for a in &self.associations {
            out[a.term] += 1;
        }
        out
    }

    /// Number of distinct terms per track.
    pub fn terms_per_track(&self) -> Vec<usize> {
        let mut out = vec![0; self.track_ids.len()];
        for a in &self.associations {
            out[a.track] += 1;
        }
        out
    }

    /// Per-track `(term, count)` lists, in track order.
    pub fn per_track(&self) -> Vec<Vec<(usize, u32)>> {
        let mut out = vec![Vec::new(); self.track_ids.len()];
        for a in &self.associations {
            out[a.track].push((a.term, a.count));
        }
        out
    }

    /// Drops associations outside the keep masks, then every term and track
    /// left without associations, re-indexing the remainder in order.
    fn retain(&self, keep_term: &[bool], keep_track: &[bool]) -> MatchedCorpus {
        let live: Vec<Association> = self
            .associations
            .iter()
            .filter(|a| keep_term[a.term] && keep_track[a.track])
            .copied()
            .collect();
        let used_terms: BTreeSet<usize> = live.iter().map(|a| a.term).collect();
        let used_tracks: BTreeSet<usize> = live.iter().map(|a| a.track).collect();
        let term_map: HashMap<usize, usize> = used_terms.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        let track_map: HashMap<usize, usize> = used_tracks.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        MatchedCorpus {
            terms: used_terms.iter().map(|&i| self.terms[i].clone()).collect(),
            track_ids: used_tracks.iter().map(|&j| self.track_ids[j].clone()).collect(),
            associations: live
                .into_iter()
                .map(|a| Association {
                    track: track_map[&a.track],
                    term: term_map[&a.term],
                    count: a.count,
                })
                .collect(),
        }
    }
}

/// Matches the raw tags of one track. Returns canonical vocabulary index to
/// summed count; terms that appear in the title or artist name are dropped.
pub fn match_track(vocab: &Vocabulary, track: &TrackTags) -> BTreeMap<usize, u32> {
    let mut deduped: BTreeMap<String, u32> = BTreeMap::new();
    for (tag, count) in &track.tags {
        let e = deduped.entry(normalize(tag)).or_insert(0);
        *e = (*e).max(*count);
    }
    let mut blocked: BTreeSet<usize> = vocab.terms_in(&normalize(&track.title)).into_iter().collect();
    blocked.extend(vocab.terms_in(&normalize(&track.artist)));

    let mut out = BTreeMap::new();
    for (tag, count) in &deduped {
        for term in vocab.terms_in(tag) {
            if !blocked.contains(&term) {
                *out.entry(term).or_insert(0) += count;
            }
        }
    }
    out
}

/// Associates tags with vocabulary terms. A tag matches a term when, after
/// normalization, the term or one of its inflections occurs in it as a whole
/// word sequence. Tracks and terms without any association are omitted.
pub fn match_terms(corpus: &TagCorpus, vocab: &Vocabulary) -> Result<MatchedCorpus> {
    if vocab.is_empty() {
        return Err(Error::Config("vocabulary is empty".into()));
    }
    if corpus.tracks.is_empty() {
        return Err(Error::EmptyCorpus("ingest".into()));
    }
    let mut associations = Vec::new();
    for (track_idx, (_, tags)) in corpus.track_tags().into_iter().enumerate() {
        for (term, count) in match_track(vocab, &tags) {
            associations.push(Association {
                track: track_idx,
                term,
                count,
            });
        }
    }
    let full = MatchedCorpus {
        terms: vocab.entries().iter().map(|e| e.term.clone()).collect(),
        track_ids: corpus.tracks.iter().map(|t| t.track_id.clone()).collect(),
        associations,
    };
    let out = full.retain(&vec![true; full.terms.len()], &vec![true; full.track_ids.len()]);
    if out.associations.is_empty() {
        return Err(Error::EmptyCorpus("term matching".into()));
    }
    Ok(out)
}

/// Alternately removes rare terms and sparsely tagged tracks until neither
/// rule removes anything.
pub fn filter_corpus(
    corpus: &MatchedCorpus,
    min_term_prevalence: usize,
    min_terms_per_track: usize,
) -> Result<MatchedCorpus> {
    let mut current = corpus.clone();
    loop {
        let prevalence = current.term_prevalence();
        let keep_term: Vec<bool> = prevalence.iter().map(|&p| p >= min_term_prevalence).collect();
        let after_terms = current.retain(&keep_term, &vec![true; current.track_ids.len()]);

        let per_track = after_terms.terms_per_track();
        let keep_track: Vec<bool> = per_track.iter().map(|&c| c >= min_terms_per_track).collect();
        let next = after_terms.retain(&vec![true; after_terms.terms.len()], &keep_track);

        if next == current {
            break;
        }
        current = next;
    }
    if current.associations.is_empty() {
        return Err(Error::EmptyCorpus("filtering".into()));
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn track(id: &str, artist: &str, title: &str) -> Track {
        Track {
            track_id: id.into(),
            artist: artist.into(),
            title: title.into(),
        }
    }

    fn tag(id: &str, tag: &str, count: u32) -> TagAssignment {
        TagAssignment {
            track_id: id.into(),
            tag: tag.into(),
            count,
        }
    }

    fn vocab() -> Vocabulary {
        Vocabulary::new(vec![("happy", vec![]), ("sad", vec!["sadness"]), ("dark", vec![])]).unwrap()
    }

    #[test]
    fn matches_whole_words_only() {
        let c = TagCorpus::new(
            vec![track("a", "x", "y")],
            vec![
                tag("a", "happy hardcore", 10),
                tag("a", "unhappy", 20),
                tag("a", "Sadness", 5),
            ],
        )
        .unwrap();
        let m = match_terms(&c, &vocab()).unwrap();
        assert_eq!(m.terms, vec!["happy", "sad"]);
        assert_eq!(
            m.associations,
            vec![
                Association {
                    track: 0,
                    term: 0,
                    count: 10
                },
                Association {
                    track: 0,
                    term: 1,
                    count: 5
                },
            ]
        );
    }

    #[test]
    fn drops_terms_in_title_or_artist() {
        let c = TagCorpus::new(
            vec![track("a", "The Sad Band", "Happy"), track("b", "x", "y")],
            vec![
                tag("a", "happy", 50),
                tag("a", "sad", 50),
                tag("a", "dark", 1),
                tag("b", "happy", 3),
            ],
        )
        .unwrap();
        let m = match_terms(&c, &vocab()).unwrap();
        // track a keeps only "dark"; "sad" survives nowhere
        assert_eq!(m.terms, vec!["happy", "dark"]);
        assert_eq!(m.per_track(), vec![vec![(1, 1)], vec![(0, 3)]]);
    }

    #[test]
    fn merges_duplicates() {
        let c = TagCorpus::new(
            vec![track("a", "x", "y")],
            vec![tag("a", "happy", 3), tag("a", " HAPPY", 7), tag("a", "happy mood", 2)],
        )
        .unwrap();
        assert_eq!(c.assignments().len(), 2);
        let m = match_terms(&c, &vocab()).unwrap();
        // max(3, 7) + 2
        assert_eq!(m.associations[0].count, 9);
    }

    #[test]
    fn ingest_errors() {
        assert!(TagCorpus::new(vec![track("a", "", "")], vec![tag("b", "happy", 1)]).is_err());
        assert!(TagCorpus::new(vec![track("a", "", "")], vec![tag("a", "happy", 101)]).is_err());
        let text = "track_id\tartist\ttitle\ttag\tcount\na\tx\ty\thappy\t5\na\tz\ty\tsad\t5\n";
        assert!(matches!(
            TagCorpus::from_tsv_str("c", text),
            Err(Error::Parse { line: 3, .. })
        ));
        let c = TagCorpus::new(vec![track("a", "", "")], vec![tag("a", "nothing here", 1)]).unwrap();
        assert!(matches!(match_terms(&c, &vocab()), Err(Error::EmptyCorpus(_))));
    }

    fn corpus(pairs: &[(usize, usize)], n_terms: usize, n_tracks: usize) -> MatchedCorpus {
        let mut associations: Vec<Association> = pairs
            .iter()
            .map(|&(track, term)| Association { track, term, count: 1 })
            .collect();
        associations.sort();
        MatchedCorpus {
            terms: (0..n_terms).map(|i| format!("t{i}")).collect(),
            track_ids: (0..n_tracks).map(|j| format!("r{j}")).collect(),
            associations,
        }
    }

    #[test]
    fn filter_noop_and_prevalence() {
        let c = corpus(&[(0, 0), (0, 1), (1, 0), (1, 2), (2, 0), (2, 1)], 3, 3);
        assert_eq!(filter_corpus(&c, 0, 0).unwrap(), c);
        let f = filter_corpus(&c, 2, 0).unwrap();
        assert_eq!(f.terms, vec!["t0", "t1"]);
    }

    #[test]
    fn filter_cascades_to_fixed_point() {
        // t2 is rare; removing it leaves r1 with a single term
        let c = corpus(&[(0, 0), (0, 1), (1, 0), (1, 2), (2, 0), (2, 1)], 3, 3);
        let f = filter_corpus(&c, 2, 2).unwrap();
        assert_eq!(f.track_ids, vec!["r0", "r2"]);
        assert_eq!(f.terms, vec!["t0", "t1"]);
        // exhaustive re-scan: every surviving term and track meets both thresholds
        assert!(f.term_prevalence().iter().all(|&p| p >= 2));
        assert!(f.terms_per_track().iter().all(|&p| p >= 2));
        assert_eq!(filter_corpus(&f, 2, 2).unwrap(), f);
    }

    #[test]
    fn filter_can_empty() {
        let c = corpus(&[(0, 0), (1, 1)], 2, 2);
        assert!(matches!(filter_corpus(&c, 2, 1), Err(Error::EmptyCorpus(_))));
    }
}

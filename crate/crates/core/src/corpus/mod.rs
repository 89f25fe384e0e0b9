//! Tag ingestion, vocabulary matching, corpus filtering and TF-IDF.

mod matching;
mod tfidf;
mod vocab;

pub use matching::{
    filter_corpus, match_terms, match_track, Association, MatchedCorpus, TagAssignment, TagCorpus, Track, TrackTags,
    MAX_TAG_COUNT,
};
pub use tfidf::{build_tfidf, tfidf_weight, track_counts, vectorize_track, Cell, QueryVector, TermDocMatrix};
pub use vocab::{normalize, VocabEntry, Vocabulary};

//! Phonotactic anomaly detection for fieldwork wordlists.
//!
//! The pipeline: parse and normalize a wordlist ([`ingest`]), split forms
//! into syllables ([`syllabify`]), fit per-variety n-gram models and score
//! every word's n-grams ([`ngram`]), reduce the scores to feature vectors
//! ([`features`]), flag outliers with an unsupervised detector ([`detect`]),
//! and measure the flags against gold labels ([`eval`]).

pub mod detect;
pub mod error;
pub mod eval;
pub mod features;
pub mod fixture;
pub mod ingest;
pub mod ngram;
pub mod syllabify;

pub use error::{Error, Result};
pub use ingest::{PhonemeSequence, SymbolTable, Wordlist, WordlistEntry};
pub use ngram::{ExtractionMode, NgramModel, NgramParams};
pub use syllabify::{SonorityScale, SyllabifiedForm};

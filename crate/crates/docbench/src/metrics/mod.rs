//! Scores generated documentation against references: smoothed BLEU,
//! Flesch-Kincaid grade level, documentation length, and TF-IDF
//! informativeness.
//!
//! All arithmetic is double precision; rounding to the two decimals shown in
//! reports happens at render time only.

mod bleu;
mod readability;
mod stopwords;
mod tfidf;
mod tokenize;

pub use bleu::{corpus_bleu, sentence_bleu};
pub use readability::{count_syllables, doc_length, flesch_kincaid, sentence_count};
pub use stopwords::{is_stop_word, STOP_WORDS, STOP_WORDS_VERSION};
pub use tfidf::{tfidf_informativeness, IdfTable};
pub use tokenize::{is_word_token, tokenize_text};

use serde::{Deserialize, Serialize};

/// All four metric values for one generated/reference pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    /// Smoothed BLEU in [0, 100].
    pub bleu: f64,
    /// Flesch-Kincaid grade level (may be negative).
    pub fk_grade: f64,
    /// Word-token count of the generated doc.
    pub length_words: usize,
    /// TF-IDF informativeness, >= 0.
    pub tfidf: f64,
}

impl MetricRecord {
    /// Scores one generated doc against its reference with a prebuilt IDF
    /// table. Fails when the generated doc has no word tokens (the grade
    /// level is undefined there).
    pub fn score(generated: &str, reference: &str, idf: &IdfTable) -> crate::Result<Self> {
        let candidate = tokenize_text(generated);
        let reference_tokens = tokenize_text(reference);
        if reference_tokens.is_empty() {
            return Err(crate::Error::Argument("reference doc has no tokens".into()));
        }
        Ok(MetricRecord {
            bleu: sentence_bleu(&candidate, &reference_tokens),
            fk_grade: flesch_kincaid(generated)?,
            length_words: doc_length(generated),
            tfidf: tfidf_informativeness(generated, idf),
        })
    }
}

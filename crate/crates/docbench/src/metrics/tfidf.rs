//! TF-IDF informativeness of a documentation string.

use std::collections::{HashMap, HashSet};

use super::stopwords::is_stop_word;
use super::tokenize::{is_word_token, tokenize_text};

/// Document frequencies over a reference corpus.
///
/// Built once from the reference documentation of a run, then read-only.
#[derive(Debug, Clone)]
pub struct IdfTable {
    doc_count: usize,
    df: HashMap<String, usize>,
}

fn content_tokens(text: &str) -> Vec<String> {
    tokenize_text(text)
        .into_iter()
        .filter(|t| is_word_token(t) && !is_stop_word(t))
        .collect()
}

impl IdfTable {
    /// Counts, for each non-stop-word token, the number of reference
    /// documents containing it (not the number of occurrences).
    pub fn build<S: AsRef<str>>(references: &[S]) -> Self {
        assert!(
            !references.is_empty(),
            "IdfTable requires at least one reference"
        );
        let mut df: HashMap<String, usize> = HashMap::new();
        for doc in references {
            let seen: HashSet<String> = content_tokens(doc.as_ref()).into_iter().collect();
            for token in seen {
                *df.entry(token).or_insert(0) += 1;
            }
        }
        IdfTable {
            doc_count: references.len(),
            df,
        }
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    /// ln(N / df(word)); words never seen in the references fall back to
    /// df = 1 so scores stay finite.
    pub fn idf(&self, word: &str) -> f64 {
        let df = self.df.get(word).copied().unwrap_or(1).max(1);
        ((self.doc_count as f64) / (df as f64)).ln()
    }
}

/// Sum of tf(w) * idf(w) over the doc's non-stop-word, non-punctuation
/// tokens, with tf the raw occurrence count.
pub fn tfidf_informativeness(doc: &str, idf: &IdfTable) -> f64 {
    content_tokens(doc).iter().map(|t| idf.idf(t)).sum()
}

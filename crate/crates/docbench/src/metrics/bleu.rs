//! Smoothed sentence-level BLEU against a single reference.
//!
//! Modified n-gram precisions for n = 1..4 are clipped against the reference.
//! Smoothing adds one to both the matched and total counts for n >= 2 only;
//! unigram precision stays unsmoothed so a candidate sharing no word with the
//! reference scores zero. Orders where the candidate has no n-grams at all
//! contribute (0+1)/(0+1) = 1 under the same rule.

use std::collections::HashMap;

use crate::error::{Error, Result};

const MAX_ORDER: usize = 4;

fn ngram_counts<'a>(tokens: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Smoothed BLEU of one candidate against one reference, on a 0..=100 scale.
///
/// An empty candidate scores 0 by convention; the reference must be non-empty.
pub fn sentence_bleu<C: AsRef<str>, R: AsRef<str>>(candidate: &[C], reference: &[R]) -> f64 {
    assert!(
        !reference.is_empty(),
        "sentence_bleu requires a non-empty reference"
    );
    let cand: Vec<&str> = candidate.iter().map(AsRef::as_ref).collect();
    let refr: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
    if cand.is_empty() {
        return 0.0;
    }

    let mut log_precision_sum = 0.0;
    for n in 1..=MAX_ORDER {
        let total = cand.len().saturating_sub(n - 1);
        let ref_counts = ngram_counts(&refr, n);
        let matched: usize = ngram_counts(&cand, n)
            .iter()
            .map(|(gram, count)| (*count).min(*ref_counts.get(gram).unwrap_or(&0)))
            .sum();
        let p = if n == 1 {
            matched as f64 / total as f64
        } else {
            (matched + 1) as f64 / (total + 1) as f64
        };
        if p == 0.0 {
            // Only possible for n = 1: no word in common with the reference.
            return 0.0;
        }
        log_precision_sum += p.ln();
    }

    let c = cand.len() as f64;
    let r = refr.len() as f64;
    let brevity_penalty = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
    100.0 * brevity_penalty * (log_precision_sum / MAX_ORDER as f64).exp()
}

/// Unweighted arithmetic mean of `sentence_bleu` over (candidate, reference)
/// token-list pairs.
pub fn corpus_bleu<C: AsRef<str>, R: AsRef<str>>(records: &[(Vec<C>, Vec<R>)]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Argument(
            "corpus_bleu requires at least one record".into(),
        ));
    }
    let sum: f64 = records
        .iter()
        .map(|(cand, refr)| sentence_bleu(cand, refr))
        .sum();
    Ok(sum / records.len() as f64)
}

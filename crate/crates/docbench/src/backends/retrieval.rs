//! Offline retrieval baseline: answers with the documentation of the most
//! code-similar training record, so the pipeline is fully testable without
//! a model.

use std::collections::HashSet;

use crate::corpus::CodeDocPair;
use crate::error::{Error, Result};
use crate::metrics::tokenize_text;
use crate::prompts::{extract_target_code, Prompt};

use super::{Backend, GenerationParams, GenerationResult};

fn code_token_set(code: &str) -> HashSet<String> {
    tokenize_text(code).into_iter().collect()
}

fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    intersection as f64 / union as f64
}

fn best_match<'a>(target_code: &str, train: &'a [CodeDocPair]) -> &'a CodeDocPair {
    let target_tokens = code_token_set(target_code);
    let mut best: Option<(&CodeDocPair, f64)> = None;
    for record in train {
        let similarity = jaccard(&target_tokens, &code_token_set(&record.code));
        let better = match best {
            None => true,
            Some((current, best_sim)) => {
                similarity > best_sim || (similarity == best_sim && record.id < current.id)
            }
        };
        if better {
            best = Some((record, similarity));
        }
    }
    best.expect("train is non-empty").0
}

/// Documentation of the training record with the highest unigram Jaccard
/// similarity to the target code; ties go to the smallest origin id.
pub fn retrieval_baseline(target: &CodeDocPair, train: &[CodeDocPair]) -> String {
    assert!(
        !train.is_empty(),
        "retrieval baseline requires a non-empty train split"
    );
    best_match(&target.code, train).doc.clone()
}

/// The offline stand-in backend, seeded with a train split.
pub struct RetrievalBackend {
    train: Vec<CodeDocPair>,
}

impl RetrievalBackend {
    pub fn new(train: Vec<CodeDocPair>) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Config(
                "retrieval backend needs a non-empty train split".into(),
            ));
        }
        Ok(RetrievalBackend { train })
    }
}

impl Backend for RetrievalBackend {
    fn name(&self) -> &str {
        "retrieval"
    }

    fn generate(&self, prompt: &Prompt, params: &GenerationParams) -> Result<GenerationResult> {
        let target_code = extract_target_code(&prompt.text).ok_or_else(|| {
            Error::Backend("prompt does not follow the Code:/Documentation: grammar".into())
        })?;
        let raw = best_match(target_code, &self.train).doc.clone();
        Ok(GenerationResult::from_raw(raw, self.name(), params))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Split;
    use crate::lexers::Language;

    fn pair(id: &str, code: &str, doc: &str) -> CodeDocPair {
        CodeDocPair {
            id: id.into(),
            language: Language::Python,
            code: code.into(),
            doc: doc.into(),
            doc_tokens: None,
            split: Split::Train,
            extra: serde_json::Map::new(),
        }
    }

    #[test]
    fn exact_match_returns_that_doc() {
        let train = vec![
            pair("a", "def add(x, y):\n    return x+y", "Adds two numbers."),
            pair("b", "def neg(x):\n    return -x", "Negates a number."),
        ];
        let target = pair("t", "def add(x, y):\n    return x+y", "");
        assert_eq!(retrieval_baseline(&target, &train), "Adds two numbers.");
    }

    #[test]
    fn no_overlap_falls_back_to_smallest_id() {
        let train = vec![pair("b", "alpha", "B doc"), pair("a", "beta", "A doc")];
        let target = pair("t", "zzz", "");
        assert_eq!(retrieval_baseline(&target, &train), "A doc");
    }

    #[test]
    fn tie_goes_to_the_lower_id() {
        // Overlaps: c -> 0.2, b -> 0.6, a -> 0.6.
        let train = vec![
            pair("c", "p u", "C doc"),
            pair("b", "p q r y", "B doc"),
            pair("a", "p q s z", "A doc"),
        ];
        let target = pair("t", "p q r s", "");
        let brute: Vec<f64> = train
            .iter()
            .map(|r| jaccard(&code_token_set("p q r s"), &code_token_set(&r.code)))
            .collect();
        assert_eq!(brute[1], brute[2]);
        assert!(brute[1] > brute[0]);
        assert_eq!(retrieval_baseline(&target, &train), "A doc");
    }

    #[test]
    fn backend_is_pure() {
        let train = vec![pair("a", "def f(): pass", "Does nothing at all.")];
        let backend = RetrievalBackend::new(train).unwrap();
        let target = pair("t", "def g(): pass", "");
        let prompt = crate::prompts::build_prompt(&target, &[]);
        let params = GenerationParams::default();
        let one = backend.generate(&prompt, &params).unwrap();
        let two = backend.generate(&prompt, &params).unwrap();
        assert_eq!(one, two);
        assert_eq!(one.doc, "Does nothing at all.");
    }
}

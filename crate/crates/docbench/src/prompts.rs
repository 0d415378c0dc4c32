//! Zero-, one-, and few-shot prompt construction.
//!
//! The prompt grammar is fixed and byte-exact:
//!
//! ```text
//! prompt := block* target
//! block  := "Code:\n" code "\nDocumentation: " doc "\n"
//! target := "Code:\n" code "\nDocumentation:"
//! ```
//!
//! Zero-shot is the degenerate form with no blocks. No space follows the
//! trailing "Documentation:"; completions are trimmed instead.

use crate::corpus::{sample_indices, CodeDocPair};
use crate::error::Result;

/// The string whose appearance terminates a completion.
pub const STOP_MARKER: &str = "\nCode:";

/// A code/documentation pair embedded in a prompt, drawn from the train
/// split of the target's language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exemplar {
    pub code: String,
    pub doc: String,
    pub origin_id: String,
}

impl Exemplar {
    pub fn from_pair(pair: &CodeDocPair) -> Self {
        Exemplar {
            code: pair.code.clone(),
            doc: pair.doc.clone(),
            origin_id: pair.id.clone(),
        }
    }
}

/// The exact text sent to a backend, plus what produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompt {
    pub text: String,
    pub shots: usize,
    pub target_id: String,
    pub stop_marker: String,
}

/// Chooses `k` distinct training pairs uniformly, deterministic under
/// `seed`; `k = 0` yields the empty list.
pub fn select_exemplars(train: &[CodeDocPair], k: usize, seed: u64) -> Result<Vec<Exemplar>> {
    let indices = sample_indices(train.len(), k, seed)?;
    Ok(indices
        .into_iter()
        .map(|i| Exemplar::from_pair(&train[i]))
        .collect())
}

/// Collapses a doc onto one line when (and only when) it contains line
/// breaks, so the "Documentation:" line stays unambiguous.
fn single_line(doc: &str) -> String {
    if !doc.contains('\n') && !doc.contains('\r') {
        return doc.to_string();
    }
    doc.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Assembles the prompt for one target with the given exemplars, in
/// exemplar order.
pub fn build_prompt(target: &CodeDocPair, exemplars: &[Exemplar]) -> Prompt {
    let mut text = String::new();
    for exemplar in exemplars {
        text.push_str("Code:\n");
        text.push_str(&exemplar.code);
        text.push_str("\nDocumentation: ");
        text.push_str(&single_line(&exemplar.doc));
        text.push('\n');
    }
    text.push_str("Code:\n");
    text.push_str(&target.code);
    text.push_str("\nDocumentation:");
    Prompt {
        text,
        shots: exemplars.len(),
        target_id: target.id.clone(),
        stop_marker: STOP_MARKER.to_string(),
    }
}

/// The target code of a prompt built by [`build_prompt`]: everything
/// between the last "Code:" marker and the trailing "Documentation:".
/// Used by offline backends that need the code back out of the prompt.
pub fn extract_target_code(prompt_text: &str) -> Option<&str> {
    let tail = prompt_text.strip_suffix("\nDocumentation:")?;
    let start = if let Some(pos) = tail.rfind("\nCode:\n") {
        pos + "\nCode:\n".len()
    } else if tail.starts_with("Code:\n") {
        "Code:\n".len()
    } else {
        return None;
    };
    Some(&tail[start..])
}

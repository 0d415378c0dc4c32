//! Golden-file regression tests for the prompt grammar.

use std::fs;
use std::path::PathBuf;

use docbench::corpus::{CodeDocPair, Split};
use docbench::lexers::Language;
use docbench::prompts::{build_prompt, Exemplar};

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn add_exemplar() -> Exemplar {
    Exemplar {
        code: "def add(x, y):\n    return x+y".into(),
        doc: "Adds two numbers.".into(),
        origin_id: "train-add".into(),
    }
}

fn multiply_exemplar() -> Exemplar {
    Exemplar {
        code: "def multiply(x, y):\n    return x*y".into(),
        doc: "Multiplies two numbers.".into(),
        origin_id: "train-multiply".into(),
    }
}

fn subtract_target() -> CodeDocPair {
    CodeDocPair {
        id: "test-subtract".into(),
        language: Language::Python,
        code: "def subtract(x, y):\n    return x-y".into(),
        doc: "Subtracts two numbers.".into(),
        doc_tokens: None,
        split: Split::Test,
        extra: serde_json::Map::new(),
    }
}

#[test]
fn one_shot_prompt_matches_the_golden_byte_for_byte() {
    let prompt = build_prompt(&subtract_target(), &[add_exemplar()]);
    assert_eq!(prompt.text, golden("prompt_one_shot.txt"));
    assert_eq!(prompt.shots, 1);
    assert_eq!(prompt.stop_marker, "\nCode:");
}

#[test]
fn zero_shot_prompt_is_the_degenerate_form() {
    let prompt = build_prompt(&subtract_target(), &[]);
    assert_eq!(prompt.text, golden("prompt_zero_shot.txt"));
    // The zero-shot text is exactly the one-shot text minus its exemplar block.
    let one_shot = golden("prompt_one_shot.txt");
    assert!(one_shot.ends_with(&prompt.text));
}

#[test]
fn two_shot_prompt_keeps_exemplar_order() {
    let prompt = build_prompt(&subtract_target(), &[add_exemplar(), multiply_exemplar()]);
    assert_eq!(prompt.text, golden("prompt_two_shot.txt"));
    let add_at = prompt.text.find("def add").unwrap();
    let multiply_at = prompt.text.find("def multiply").unwrap();
    assert!(add_at < multiply_at);
}

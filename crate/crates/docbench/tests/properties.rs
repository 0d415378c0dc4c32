//! Property tests for the invariants the modules promise.

mod common;

use std::collections::HashMap;

use docbench::backends::postprocess;
use docbench::corpus::{required_sample_size, sample_indices, SampleSpec};
use docbench::lexers::{strip_comments, Language};
use docbench::metrics::{
    corpus_bleu, flesch_kincaid, sentence_bleu, tfidf_informativeness, IdfTable,
};
use docbench::prompts::{build_prompt, Exemplar};
use proptest::prelude::*;

fn token_vec() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 0..8)
        .prop_map(|v| v.into_iter().map(str::to_string).collect())
}

fn nonempty_token_vec() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 1..8)
        .prop_map(|v| v.into_iter().map(str::to_string).collect())
}

proptest! {
    #[test]
    fn bleu_identity_is_exactly_100(tokens in nonempty_token_vec()) {
        prop_assert_eq!(sentence_bleu(&tokens, &tokens), 100.0);
    }

    #[test]
    fn bleu_stays_in_bounds(cand in token_vec(), refr in nonempty_token_vec()) {
        let score = sentence_bleu(&cand, &refr);
        prop_assert!((0.0..=100.0).contains(&score));
    }

    #[test]
    fn bleu_is_invariant_under_vocabulary_renaming(
        cand in token_vec(),
        refr in nonempty_token_vec(),
    ) {
        let rename: HashMap<&str, &str> =
            [("a", "v"), ("b", "w"), ("c", "x"), ("d", "y"), ("e", "z")].into();
        let map = |tokens: &[String]| -> Vec<String> {
            tokens.iter().map(|t| rename[t.as_str()].to_string()).collect()
        };
        let before = sentence_bleu(&cand, &refr);
        let after = sentence_bleu(&map(&cand), &map(&refr));
        prop_assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn appending_an_unmatched_token_never_helps_a_long_candidate(
        refr in nonempty_token_vec(),
    ) {
        // Candidate already covers the reference length, so BP stays 1 and
        // only the precisions move.
        let mut cand = refr.clone();
        let base = sentence_bleu(&cand, &refr);
        cand.push("zzz".to_string()); // never in the reference alphabet
        let grown = sentence_bleu(&cand, &refr);
        prop_assert!(grown <= base + 1e-12, "{grown} > {base}");
    }

    #[test]
    fn corpus_bleu_is_the_exact_mean(
        records in prop::collection::vec((token_vec(), nonempty_token_vec()), 1..12),
    ) {
        let mean = corpus_bleu(&records).unwrap();
        let manual: f64 =
            records.iter().map(|(c, r)| sentence_bleu(c, r)).sum::<f64>() / records.len() as f64;
        prop_assert!((mean - manual).abs() < 1e-12);
    }

    #[test]
    fn fk_is_invariant_under_whole_text_duplication(
        words in prop::collection::vec(
            prop::sample::select(vec!["adds", "two", "numbers", "path", "value", "table"]),
            1..8,
        ),
    ) {
        let sentence = format!("{}.", words.join(" "));
        let doubled = format!("{sentence} {sentence}");
        let a = flesch_kincaid(&sentence).unwrap();
        let b = flesch_kincaid(&doubled).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn tfidf_is_additive_over_token_multisets(
        left in prop::collection::vec(
            prop::sample::select(vec!["adds", "two", "numbers", "path", "value"]),
            0..6,
        ),
        right in prop::collection::vec(
            prop::sample::select(vec!["adds", "two", "numbers", "path", "value"]),
            0..6,
        ),
    ) {
        let idf = IdfTable::build(&["adds two numbers", "returns the path", "value of two"]);
        let a = tfidf_informativeness(&left.join(" "), &idf);
        let b = tfidf_informativeness(&right.join(" "), &idf);
        let joined = format!("{} {}", left.join(" "), right.join(" "));
        let both = tfidf_informativeness(&joined, &idf);
        prop_assert!((both - (a + b)).abs() < 1e-9);
    }

    #[test]
    fn postprocess_output_is_always_clean(raw in ".{0,120}") {
        let stop = ["\nCode:".to_string()];
        let doc = postprocess(&raw, &stop);
        prop_assert!(!doc.contains("\nCode:"));
        prop_assert!(!doc.contains("  "));
        prop_assert!(!doc.contains('\n'));
        prop_assert_eq!(doc.trim(), &doc);
    }

    #[test]
    fn sample_size_is_monotone(
        population in 1usize..100_000,
        extra in 0usize..100_000,
        margin_milli in 10u32..500,
    ) {
        let margin = margin_milli as f64 / 1000.0;
        let spec = |population, margin| SampleSpec { population, confidence: 0.95, margin, seed: 0 };
        let base = required_sample_size(&spec(population, margin)).unwrap();
        // Non-decreasing in population.
        let bigger = required_sample_size(&spec(population + extra, margin)).unwrap();
        prop_assert!(bigger >= base);
        // Non-increasing in margin.
        let looser = required_sample_size(&spec(population, (margin + 0.1).min(0.9))).unwrap();
        prop_assert!(looser <= base);
    }

    #[test]
    fn sampling_is_deterministic_and_distinct(
        population in 1usize..200,
        seed in 0u64..1000,
    ) {
        let n = population / 2;
        let a = sample_indices(population, n, seed).unwrap();
        let b = sample_indices(population, n, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), a.len(), "indices must be distinct");
    }

    #[test]
    fn strip_comments_is_idempotent_on_arbitrary_text(
        code in "[ -~\n\t]{0,160}",
        language_idx in 0usize..6,
    ) {
        let language = Language::TABLE_ORDER[language_idx];
        let once = strip_comments(&code, language).stripped;
        let twice = strip_comments(&once, language).stripped;
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn prompt_embeds_target_code_exactly_once(
        target_code in "[a-z(){}+=_ \n]{1,60}",
        exemplar_count in 0usize..3,
    ) {
        let exemplar = Exemplar {
            code: "def sample(): pass".into(),
            doc: "Does the sampled thing.".into(),
            origin_id: "x".into(),
        };
        let exemplars = vec![exemplar; exemplar_count];
        let target = docbench::corpus::CodeDocPair {
            id: "t".into(),
            language: Language::Python,
            code: target_code.clone(),
            doc: "ignored".into(),
            doc_tokens: None,
            split: docbench::corpus::Split::Test,
            extra: serde_json::Map::new(),
        };
        let prompt = build_prompt(&target, &exemplars);
        // k + 1 markers, each at a line start.
        let marker_count = prompt
            .text
            .lines()
            .filter(|line| line.starts_with("Code:"))
            .count();
        prop_assert_eq!(marker_count, exemplar_count + 1);
        prop_assert!(prompt.text.ends_with("Documentation:"));
        // The target code sits verbatim after the last marker.
        prop_assert_eq!(
            docbench::prompts::extract_target_code(&prompt.text),
            Some(target_code.as_str())
        );
        // Purity: rebuilding gives identical bytes.
        prop_assert_eq!(build_prompt(&target, &exemplars).text, prompt.text);
    }
}

/// 1000 single-record draws across seeds land near uniform: each of 4
/// records drawn 250 +/- 60 times.
#[test]
fn single_draw_frequencies_are_uniform() {
    let mut counts = [0usize; 4];
    for seed in 0..1000u64 {
        let picked = sample_indices(4, 1, seed).unwrap()[0];
        counts[picked] += 1;
    }
    for (record, count) in counts.iter().enumerate() {
        assert!(
            (190..=310).contains(count),
            "record {record} drawn {count} times, outside 250 +/- 60"
        );
    }
}

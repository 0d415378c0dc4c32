//! Flesch-Kincaid grade level with a deterministic syllable heuristic.

use crate::error::{Error, Result};

use super::tokenize::{is_word_token, tokenize_text};

/// Counts syllables as maximal vowel groups (a, e, i, o, u, y), subtracting
/// one for a trailing silent "e" unless the word ends in consonant + "le".
/// Never returns less than 1.
pub fn count_syllables(word: &str) -> usize {
    let chars: Vec<char> = word.to_lowercase().chars().collect();
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');

    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &chars {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }

    let n = chars.len();
    if n >= 2 && chars[n - 1] == 'e' {
        let consonant_le = n >= 3 && chars[n - 2] == 'l' && !is_vowel(chars[n - 3]);
        if !consonant_le {
            groups = groups.saturating_sub(1);
        }
    }
    groups.max(1)
}

/// Number of sentences: splits on '.', '!' or '?' followed by whitespace or
/// end of text, counting only segments that contain at least one word
/// character. Always at least 1.
pub fn sentence_count(text: &str) -> usize {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = 0usize;
    let mut segment_has_word = false;
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            segment_has_word = true;
        }
        let terminator = matches!(c, '.' | '!' | '?');
        let at_boundary = terminator && chars.get(i + 1).is_none_or(|next| next.is_whitespace());
        if at_boundary && segment_has_word {
            sentences += 1;
            segment_has_word = false;
        }
    }
    if segment_has_word {
        sentences += 1;
    }
    sentences.max(1)
}

/// Flesch-Kincaid grade level:
/// 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59.
///
/// Words are the tokenizer's non-punctuation tokens; texts without any word
/// are rejected.
pub fn flesch_kincaid(text: &str) -> Result<f64> {
    let words: Vec<String> = tokenize_text(text)
        .into_iter()
        .filter(|t| is_word_token(t))
        .collect();
    if words.is_empty() {
        return Err(Error::Argument(
            "flesch_kincaid requires text with at least one word".into(),
        ));
    }
    let syllables: usize = words.iter().map(|w| count_syllables(w)).sum();
    let word_count = words.len() as f64;
    let sentence_count = sentence_count(text) as f64;
    Ok(0.39 * (word_count / sentence_count) + 11.8 * (syllables as f64 / word_count) - 15.59)
}

/// Number of word (non-punctuation) tokens in the text.
pub fn doc_length(text: &str) -> usize {
    tokenize_text(text)
        .iter()
        .filter(|t| is_word_token(t))
        .count()
}

//! Word tokenizer shared by every text metric.

/// Tokenizes documentation text: lowercases, splits into maximal runs of
/// letters/digits, and emits every other non-whitespace character as a
/// single-character punctuation token.
pub fn tokenize_text(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut run = String::new();
    for ch in lowered.chars() {
        if ch.is_alphanumeric() {
            run.push(ch);
        } else {
            if !run.is_empty() {
                tokens.push(std::mem::take(&mut run));
            }
            if !ch.is_whitespace() {
                tokens.push(ch.to_string());
            }
        }
    }
    if !run.is_empty() {
        tokens.push(run);
    }
    tokens
}

/// True for tokens made of letters/digits, false for punctuation tokens.
pub fn is_word_token(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_alphanumeric())
}

//! Delimiter / string-termination / indentation sanity check.

use super::profile::{heredoc_at, Heredoc, Profile};
use super::Language;

/// No line's leading whitespace may mix tabs and spaces.
fn consistent_indentation(code: &str) -> bool {
    for line in code.split('\n') {
        let leading: Vec<char> = line
            .chars()
            .take_while(|c| *c == ' ' || *c == '\t')
            .collect();
        if leading.contains(&' ') && leading.contains(&'\t') {
            return false;
        }
    }
    true
}

pub(super) fn check(code: &str, language: Language) -> bool {
    if language == Language::Python && !consistent_indentation(code) {
        return false;
    }

    let profile = Profile::for_language(language);
    let chars: Vec<char> = code.chars().collect();
    let starts_with = |i: usize, pat: &str| {
        pat.chars()
            .enumerate()
            .all(|(off, p)| chars.get(i + off) == Some(&p))
    };

    let mut stack: Vec<char> = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        if let Some(kind) = profile.strings.iter().find(|k| starts_with(i, k.open)) {
            i += kind.open.chars().count();
            loop {
                match chars.get(i) {
                    None => return false, // unterminated at end of record
                    Some('\\') if kind.escapes => i += 2,
                    Some('\n') if !kind.multiline => return false,
                    Some(_) if starts_with(i, kind.close) => {
                        i += kind.close.chars().count();
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            continue;
        }

        // Opaque heredoc tail: nothing after the marker can be verified.
        if profile.heredoc != Heredoc::None && heredoc_at(profile.heredoc, &chars, i) {
            break;
        }

        match chars[i] {
            '(' => stack.push(')'),
            '[' => stack.push(']'),
            '{' => stack.push('}'),
            c @ (')' | ']' | '}') => {
                if stack.pop() != Some(c) {
                    return false;
                }
            }
            _ => {}
        }
        i += 1;
    }
    stack.is_empty()
}

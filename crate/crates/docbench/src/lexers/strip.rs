//! The comment-stripping scanner.

use super::profile::{heredoc_at, Heredoc, Profile, StringKind};
use super::{Diagnostic, Language, LexOutcome};

struct Cursor {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Cursor {
    fn new(code: &str) -> Self {
        Cursor {
            chars: code.chars().collect(),
            i: 0,
            line: 1,
            col: 1,
        }
    }

    fn eof(&self) -> bool {
        self.i >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn starts_with(&self, pat: &str) -> bool {
        let mut k = self.i;
        for p in pat.chars() {
            if self.chars.get(k) != Some(&p) {
                return false;
            }
            k += 1;
        }
        true
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            if self.bump().is_none() {
                break;
            }
        }
    }

    fn diagnostic(&self, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }
}

/// Pops trailing blanks of the current output line (never crosses newlines).
fn trim_trailing_blanks(out: &mut String) {
    while out.ends_with(' ') || out.ends_with('\t') {
        out.pop();
    }
}

pub(super) fn strip(code: &str, language: Language) -> LexOutcome {
    let profile = Profile::for_language(language);
    let mut cur = Cursor::new(code);
    let mut out = String::new();
    let mut diagnostics = Vec::new();
    let mut balanced = true;
    // Tracked only for the Python docstring rule.
    let mut line_has_code = false;
    let mut bracket_depth = 0usize;

    while let Some(c) = cur.peek() {
        // Ruby =begin/=end blocks: whole lines, column 0 only.
        if profile.equals_begin_blocks
            && cur.col == 1
            && cur.starts_with("=begin")
            && boundary_after(&cur, "=begin")
        {
            let start = cur.diagnostic("");
            cur.bump_n(6);
            skip_rest_of_line(&mut cur, true);
            let mut closed = false;
            while !cur.eof() {
                if cur.col == 1 && cur.starts_with("=end") && boundary_after(&cur, "=end") {
                    skip_rest_of_line(&mut cur, true);
                    closed = true;
                    break;
                }
                skip_rest_of_line(&mut cur, true);
            }
            if !closed {
                balanced = false;
                diagnostics.push(Diagnostic {
                    message: "unterminated =begin block".into(),
                    ..start
                });
            }
            continue;
        }

        // Line comments: remove through end-of-line, trimming the blanks
        // that preceded the marker.
        if profile.line_comments.iter().any(|m| cur.starts_with(m)) {
            trim_trailing_blanks(&mut out);
            skip_rest_of_line(&mut cur, false);
            continue;
        }

        // Block comments become a single space.
        if let Some((open, close)) = profile.block_comment {
            if cur.starts_with(open) {
                let start = cur.diagnostic("unterminated block comment");
                cur.bump_n(open.chars().count());
                let mut closed = false;
                while !cur.eof() {
                    if cur.starts_with(close) {
                        cur.bump_n(close.chars().count());
                        closed = true;
                        break;
                    }
                    cur.bump();
                }
                if !closed {
                    balanced = false;
                    diagnostics.push(start);
                }
                out.push(' ');
                continue;
            }
        }

        // Heredocs are opaque from the marker to end-of-record.
        if profile.heredoc != Heredoc::None && heredoc_at(profile.heredoc, &cur.chars, cur.i) {
            diagnostics.push(cur.diagnostic("heredoc: treated as opaque to end of record"));
            while let Some(c) = cur.bump() {
                out.push(c);
            }
            break;
        }

        // Standalone triple-quoted string statements (docstrings).
        if profile.python_docstrings
            && !line_has_code
            && bracket_depth == 0
            && (cur.starts_with("\"\"\"") || cur.starts_with("'''"))
        {
            let quote = if cur.starts_with("\"\"\"") {
                "\"\"\""
            } else {
                "'''"
            };
            match scan_docstring_statement(&cur, quote) {
                DocstringScan::Standalone { resume_at } => {
                    trim_trailing_blanks(&mut out);
                    while cur.i < resume_at {
                        cur.bump();
                    }
                    continue;
                }
                DocstringScan::NotStandalone { string_end } => {
                    while cur.i < string_end {
                        out.push(cur.bump().expect("in bounds"));
                    }
                    line_has_code = true;
                    continue;
                }
                DocstringScan::Unterminated => {
                    balanced = false;
                    diagnostics.push(cur.diagnostic("unterminated string"));
                    while let Some(c) = cur.bump() {
                        out.push(c);
                    }
                    break;
                }
            }
        }

        // String and character literals pass through untouched.
        if let Some(kind) = profile.strings.iter().find(|k| cur.starts_with(k.open)) {
            consume_string(&mut cur, kind, &mut out, &mut diagnostics, &mut balanced);
            line_has_code = true;
            continue;
        }

        cur.bump();
        out.push(c);
        match c {
            '\n' => line_has_code = false,
            '(' | '[' | '{' => {
                bracket_depth += 1;
                line_has_code = true;
            }
            ')' | ']' | '}' => {
                bracket_depth = bracket_depth.saturating_sub(1);
                line_has_code = true;
            }
            c if c.is_whitespace() => {}
            _ => line_has_code = true,
        }
    }

    LexOutcome {
        stripped: out,
        balanced,
        diagnostics,
    }
}

/// The character right after `marker` must not extend it (so `=endif` is
/// not `=end`).
fn boundary_after(cur: &Cursor, marker: &str) -> bool {
    cur.chars
        .get(cur.i + marker.chars().count())
        .is_none_or(|c| c.is_whitespace())
}

/// Consumes up to the next newline; consumes the newline too when
/// `including_newline` is set.
fn skip_rest_of_line(cur: &mut Cursor, including_newline: bool) {
    while let Some(c) = cur.peek() {
        if c == '\n' {
            if including_newline {
                cur.bump();
            }
            return;
        }
        cur.bump();
    }
}

enum DocstringScan {
    /// Whole statement (indentation through trailing newline) can go;
    /// scanning resumes at `resume_at`.
    Standalone {
        resume_at: usize,
    },
    /// Code follows on the closing line; keep the literal, which ends at
    /// `string_end` (exclusive).
    NotStandalone {
        string_end: usize,
    },
    Unterminated,
}

fn scan_docstring_statement(cur: &Cursor, quote: &str) -> DocstringScan {
    let chars = &cur.chars;
    let qlen = quote.chars().count();
    let mut k = cur.i + qlen;
    let closes_at = |k: usize| {
        quote
            .chars()
            .enumerate()
            .all(|(off, q)| chars.get(k + off) == Some(&q))
    };
    loop {
        match chars.get(k) {
            None => return DocstringScan::Unterminated,
            Some('\\') => k += 2,
            Some(_) if closes_at(k) => {
                k += qlen;
                break;
            }
            Some(_) => k += 1,
        }
    }
    let string_end = k;
    while let Some(&c) = chars.get(k) {
        match c {
            ' ' | '\t' | '\r' => k += 1,
            '\n' => return DocstringScan::Standalone { resume_at: k + 1 },
            _ => return DocstringScan::NotStandalone { string_end },
        }
    }
    DocstringScan::Standalone { resume_at: k }
}

fn consume_string(
    cur: &mut Cursor,
    kind: &StringKind,
    out: &mut String,
    diagnostics: &mut Vec<Diagnostic>,
    balanced: &mut bool,
) {
    let start = cur.diagnostic("unterminated string");
    for c in kind.open.chars() {
        debug_assert_eq!(cur.peek(), Some(c));
        out.push(cur.bump().expect("open matched"));
    }
    loop {
        if cur.eof() {
            *balanced = false;
            diagnostics.push(start);
            return;
        }
        if kind.escapes && cur.peek() == Some('\\') {
            out.push(cur.bump().expect("peeked"));
            if let Some(escaped) = cur.bump() {
                out.push(escaped);
            }
            continue;
        }
        if cur.starts_with(kind.close) {
            for _ in kind.close.chars() {
                out.push(cur.bump().expect("close matched"));
            }
            return;
        }
        if cur.peek() == Some('\n') && !kind.multiline {
            // Leave the newline for the normal scanner.
            *balanced = false;
            diagnostics.push(start);
            return;
        }
        out.push(cur.bump().expect("not eof"));
    }
}

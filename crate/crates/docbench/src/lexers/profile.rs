//! Lexical profiles: which comment markers and string forms each language has.

use super::Language;

/// One string-literal form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StringKind {
    pub open: &'static str,
    pub close: &'static str,
    /// Backslash escapes the next character (matters only for termination).
    pub escapes: bool,
    /// A bare newline is allowed inside the literal.
    pub multiline: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Heredoc {
    None,
    /// `<<<MARKER` introductions.
    Php,
    /// `<<~X` / `<<-X` / `<<UPPER` / `<<"X"` introductions.
    Ruby,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Profile {
    pub line_comments: &'static [&'static str],
    pub block_comment: Option<(&'static str, &'static str)>,
    pub strings: &'static [StringKind],
    /// Ruby `=begin`/`=end` comment blocks at column 0.
    pub equals_begin_blocks: bool,
    /// Remove standalone triple-quoted string statements (docstrings).
    pub python_docstrings: bool,
    pub heredoc: Heredoc,
}

const JAVA_STRINGS: &[StringKind] = &[
    StringKind {
        open: "\"",
        close: "\"",
        escapes: true,
        multiline: false,
    },
    StringKind {
        open: "'",
        close: "'",
        escapes: true,
        multiline: false,
    },
];

const GO_STRINGS: &[StringKind] = &[
    StringKind {
        open: "\"",
        close: "\"",
        escapes: true,
        multiline: false,
    },
    StringKind {
        open: "'",
        close: "'",
        escapes: true,
        multiline: false,
    },
    StringKind {
        open: "`",
        close: "`",
        escapes: false,
        multiline: true,
    },
];

const JS_STRINGS: &[StringKind] = &[
    StringKind {
        open: "\"",
        close: "\"",
        escapes: true,
        multiline: false,
    },
    StringKind {
        open: "'",
        close: "'",
        escapes: true,
        multiline: false,
    },
    StringKind {
        open: "`",
        close: "`",
        escapes: true,
        multiline: true,
    },
];

// Triple-quote forms must come before the single-character forms.
const PYTHON_STRINGS: &[StringKind] = &[
    StringKind {
        open: "\"\"\"",
        close: "\"\"\"",
        escapes: true,
        multiline: true,
    },
    StringKind {
        open: "'''",
        close: "'''",
        escapes: true,
        multiline: true,
    },
    StringKind {
        open: "\"",
        close: "\"",
        escapes: true,
        multiline: false,
    },
    StringKind {
        open: "'",
        close: "'",
        escapes: true,
        multiline: false,
    },
];

const PHP_STRINGS: &[StringKind] = &[
    StringKind {
        open: "\"",
        close: "\"",
        escapes: true,
        multiline: true,
    },
    StringKind {
        open: "'",
        close: "'",
        escapes: true,
        multiline: true,
    },
];

const RUBY_STRINGS: &[StringKind] = &[
    StringKind {
        open: "\"",
        close: "\"",
        escapes: true,
        multiline: true,
    },
    StringKind {
        open: "'",
        close: "'",
        escapes: true,
        multiline: true,
    },
];

impl Profile {
    pub(crate) fn for_language(language: Language) -> Profile {
        match language {
            Language::Java => Profile {
                line_comments: &["//"],
                block_comment: Some(("/*", "*/")),
                strings: JAVA_STRINGS,
                equals_begin_blocks: false,
                python_docstrings: false,
                heredoc: Heredoc::None,
            },
            Language::Go => Profile {
                line_comments: &["//"],
                block_comment: Some(("/*", "*/")),
                strings: GO_STRINGS,
                equals_begin_blocks: false,
                python_docstrings: false,
                heredoc: Heredoc::None,
            },
            Language::Javascript => Profile {
                line_comments: &["//"],
                block_comment: Some(("/*", "*/")),
                strings: JS_STRINGS,
                equals_begin_blocks: false,
                python_docstrings: false,
                heredoc: Heredoc::None,
            },
            Language::Php => Profile {
                line_comments: &["//", "#"],
                block_comment: Some(("/*", "*/")),
                strings: PHP_STRINGS,
                equals_begin_blocks: false,
                python_docstrings: false,
                heredoc: Heredoc::Php,
            },
            Language::Python => Profile {
                line_comments: &["#"],
                block_comment: None,
                strings: PYTHON_STRINGS,
                equals_begin_blocks: false,
                python_docstrings: true,
                heredoc: Heredoc::None,
            },
            Language::Ruby => Profile {
                line_comments: &["#"],
                block_comment: None,
                strings: RUBY_STRINGS,
                equals_begin_blocks: true,
                python_docstrings: false,
                heredoc: Heredoc::Ruby,
            },
        }
    }
}

/// Does text starting at `i` introduce a heredoc for this style?
pub(crate) fn heredoc_at(style: Heredoc, chars: &[char], i: usize) -> bool {
    let peek = |k: usize| chars.get(i + k).copied();
    match style {
        Heredoc::None => false,
        Heredoc::Php => peek(0) == Some('<') && peek(1) == Some('<') && peek(2) == Some('<'),
        Heredoc::Ruby => {
            if peek(0) != Some('<') || peek(1) != Some('<') {
                return false;
            }
            match peek(2) {
                // <<~EOS and <<-EOS need a marker right after.
                Some('~') | Some('-') => peek(3)
                    .is_some_and(|c| c.is_ascii_alphabetic() || c == '_' || c == '"' || c == '\''),
                // Bare markers must look like a constant so `a << b` and
                // `1 << 2` stay shift expressions.
                Some(c) => c.is_ascii_uppercase() || c == '_' || c == '"' || c == '\'',
                None => false,
            }
        }
    }
}

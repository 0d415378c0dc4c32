//! Per-language comment stripping and lightweight structural validation for
//! the six corpus languages, respecting string literals.
//!
//! "Parsable" is deliberately approximated: delimiter nesting, string
//! termination, and (for Python) indentation sanity. The check only gates
//! corpus admission; full grammars are a non-goal.

mod profile;
mod strip;
mod structure;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The six languages of the corpus. Closed enumeration; parsing any other
/// string is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Java,
    Python,
    Php,
    Go,
    Javascript,
    Ruby,
}

impl Language {
    /// Every language, in the column order used by comparison tables
    /// (Ruby, JavaScript, GO, Python, Java, PHP).
    pub const TABLE_ORDER: [Language; 6] = [
        Language::Ruby,
        Language::Javascript,
        Language::Go,
        Language::Python,
        Language::Java,
        Language::Php,
    ];

    /// Lowercase identifier used in file paths and JSON.
    pub fn id(&self) -> &'static str {
        match self {
            Language::Java => "java",
            Language::Python => "python",
            Language::Php => "php",
            Language::Go => "go",
            Language::Javascript => "javascript",
            Language::Ruby => "ruby",
        }
    }

    /// Column label used in rendered tables.
    pub fn table_label(&self) -> &'static str {
        match self {
            Language::Java => "Java",
            Language::Python => "Python",
            Language::Php => "PHP",
            Language::Go => "GO",
            Language::Javascript => "JavaScript",
            Language::Ruby => "Ruby",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "java" => Ok(Language::Java),
            "python" => Ok(Language::Python),
            "php" => Ok(Language::Php),
            "go" => Ok(Language::Go),
            "javascript" => Ok(Language::Javascript),
            "ruby" => Ok(Language::Ruby),
            other => Err(Error::UnknownLanguage(other.to_string())),
        }
    }
}

/// A position-tagged note produced while lexing (1-based line/column).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Result of stripping comments from one record's code.
#[derive(Debug, Clone)]
pub struct LexOutcome {
    /// Code text with comments removed.
    pub stripped: String,
    /// False when an unterminated string or block comment was found.
    pub balanced: bool,
    pub diagnostics: Vec<Diagnostic>,
}

/// Removes comments from `code` per the language's lexical rules.
///
/// Line comments are removed through end-of-line (with the line's trailing
/// blanks), block comments become a single space so token boundaries
/// survive, Ruby `=begin`/`=end` lines are dropped entirely, and standalone
/// triple-quoted Python string statements are dropped. String and character
/// literals are never altered. Unterminated constructs still produce
/// best-effort text, with `balanced = false` and a diagnostic.
pub fn strip_comments(code: &str, language: Language) -> LexOutcome {
    strip::strip(code, language)
}

/// True when all of `()`, `[]`, `{}` nest properly and every string literal
/// terminates; for Python, additionally requires that no line's leading
/// whitespace mixes tabs and spaces. Expects comments to be stripped first.
pub fn check_structure(code: &str, language: Language) -> bool {
    structure::check(code, language)
}

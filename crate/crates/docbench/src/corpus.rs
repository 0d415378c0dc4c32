//! Corpus records, cleaning rules, sample-size math, and reproducible
//! random sampling.

use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;

use crate::error::{Error, Result};
use crate::lexers::{check_structure, Language};
use crate::metrics::tokenize_text;

/// Which part of the dataset a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub fn id(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "valid" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            other => Err(Error::UnknownSplit(other.to_string())),
        }
    }
}

/// One function/method with its reference documentation.
///
/// Serialization mirrors the on-disk JSON-lines schema: `docstring` holds
/// the doc text, `docstring_tokens` the optional pre-tokenized form, and
/// unknown fields (`func_name`, `repo`, `path`, `url`, ...) ride along in
/// `extra` so cleaned output preserves them. The split is implied by the
/// source file, not stored per record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeDocPair {
    #[serde(default)]
    pub id: String,
    pub language: Language,
    pub code: String,
    #[serde(rename = "docstring")]
    pub doc: String,
    #[serde(
        rename = "docstring_tokens",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub doc_tokens: Option<Vec<String>>,
    #[serde(skip, default = "default_split")]
    pub split: Split,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

fn default_split() -> Split {
    Split::Test
}

impl CodeDocPair {
    /// Token count used by the documentation-length filter bound:
    /// the dataset's own tokens when present, else the metric tokenizer.
    pub fn doc_token_count(&self) -> usize {
        match &self.doc_tokens {
            Some(tokens) => tokens.len(),
            None => tokenize_text(&self.doc).len(),
        }
    }
}

/// Why a record was accepted or rejected. Exactly one reason per record;
/// rules run in this order and the first failure wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    Ok,
    UnparsableCode,
    DocTooShort,
    DocTooLong,
    SpecialToken,
    NonEnglish,
}

impl fmt::Display for FilterReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FilterReason::Ok => "ok",
            FilterReason::UnparsableCode => "unparsable_code",
            FilterReason::DocTooShort => "doc_too_short",
            FilterReason::DocTooLong => "doc_too_long",
            FilterReason::SpecialToken => "special_token",
            FilterReason::NonEnglish => "non_english",
        };
        f.write_str(s)
    }
}

/// Verdict of the cleaning rules for one record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterVerdict {
    pub reason: FilterReason,
}

impl FilterVerdict {
    pub fn accepted(&self) -> bool {
        self.reason == FilterReason::Ok
    }
}

/// Documentation token bounds, inclusive.
pub const DOC_TOKENS_MIN: usize = 3;
pub const DOC_TOKENS_MAX: usize = 256;

/// Applies the cleaning rules in their fixed order: structural validity of
/// the (already comment-stripped) code, doc token bounds, special-token
/// screen, English screen.
pub fn filter_pair(pair: &CodeDocPair) -> FilterVerdict {
    let reason = if !check_structure(&pair.code, pair.language) {
        FilterReason::UnparsableCode
    } else {
        let tokens = pair.doc_token_count();
        if tokens < DOC_TOKENS_MIN {
            FilterReason::DocTooShort
        } else if tokens > DOC_TOKENS_MAX {
            FilterReason::DocTooLong
        } else if has_special_token(&pair.doc) {
            FilterReason::SpecialToken
        } else if !is_english(&pair.doc) {
            FilterReason::NonEnglish
        } else {
            FilterReason::Ok
        }
    };
    FilterVerdict { reason }
}

/// The closed special-token list: `<img`, `http://`, `https://`, or any
/// `<letters>` tag-like pattern.
pub fn has_special_token(doc: &str) -> bool {
    if doc.contains("<img") || doc.contains("http://") || doc.contains("https://") {
        return true;
    }
    let chars: Vec<char> = doc.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '<' {
            let mut k = i + 1;
            while k < chars.len() && chars[k].is_ascii_alphabetic() {
                k += 1;
            }
            if k > i + 1 && chars.get(k) == Some(&'>') {
                return true;
            }
        }
        i += 1;
    }
    false
}

/// True when at least 90% of the alphabetic characters are basic Latin
/// letters. Text with no alphabetic characters at all counts as English.
pub fn is_english(text: &str) -> bool {
    assert!(!text.is_empty(), "is_english requires non-empty text");
    let mut alphabetic = 0usize;
    let mut latin = 0usize;
    for c in text.chars() {
        if c.is_alphabetic() {
            alphabetic += 1;
            if c.is_ascii_alphabetic() {
                latin += 1;
            }
        }
    }
    if alphabetic == 0 {
        return true;
    }
    latin as f64 / alphabetic as f64 >= 0.90
}

/// Inputs to Cochran's sample-size formula with finite-population
/// correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub population: usize,
    pub confidence: f64,
    pub margin: f64,
    pub seed: u64,
}

/// Two-sided normal quantile for a confidence level, rounded to the three
/// decimals of conventional z tables (0.95 -> 1.960) so results match
/// standard sample-size calculators.
fn z_score(confidence: f64) -> f64 {
    let normal = statrs::distribution::Normal::new(0.0, 1.0).expect("unit normal");
    let z = normal.inverse_cdf((1.0 + confidence) / 2.0);
    (z * 1000.0).round() / 1000.0
}

/// Cochran's formula at p = 0.5 with finite-population correction:
/// ceil(n0 / (1 + (n0 - 1) / N)) where n0 = z^2 * 0.25 / e^2, capped at the
/// population.
pub fn required_sample_size(spec: &SampleSpec) -> Result<usize> {
    if spec.population == 0 {
        return Err(Error::Argument("population must be positive".into()));
    }
    if !(spec.confidence > 0.0 && spec.confidence < 1.0) {
        return Err(Error::Argument(format!(
            "confidence must be in (0,1), got {}",
            spec.confidence
        )));
    }
    if !(spec.margin > 0.0 && spec.margin < 1.0) {
        return Err(Error::Argument(format!(
            "margin must be in (0,1), got {}",
            spec.margin
        )));
    }
    let z = z_score(spec.confidence);
    let n0 = z * z * 0.25 / (spec.margin * spec.margin);
    let n = n0 / (1.0 + (n0 - 1.0) / spec.population as f64);
    Ok((n.ceil() as usize).min(spec.population))
}

/// Derives a stream-specific sub-seed from the base seed and a label so
/// per-language draws are independent but reproducible.
pub fn derive_seed(base: u64, label: &str) -> u64 {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is long enough"))
}

/// Draws `n` distinct indices from `0..population` uniformly without
/// replacement via a partial Fisher-Yates shuffle over a ChaCha20 stream,
/// so the same seed gives the same indices on every platform.
pub fn sample_indices(population: usize, n: usize, seed: u64) -> Result<Vec<usize>> {
    if n > population {
        return Err(Error::Argument(format!(
            "cannot sample {n} from a population of {population}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..population).collect();
    for i in 0..n {
        let j = rng.random_range(i..population);
        indices.swap(i, j);
    }
    indices.truncate(n);
    Ok(indices)
}

/// `n` distinct records chosen uniformly without replacement; identical
/// (pairs, n, seed) always produce the identical result in the identical
/// order.
pub fn sample(pairs: &[CodeDocPair], n: usize, seed: u64) -> Result<Vec<CodeDocPair>> {
    let indices = sample_indices(pairs.len(), n, seed)?;
    Ok(indices.into_iter().map(|i| pairs[i].clone()).collect())
}

/// Result of loading one JSON-lines file.
#[derive(Debug)]
pub struct LoadedSplit {
    pub pairs: Vec<CodeDocPair>,
    /// Lines skipped because they were malformed or missing required fields.
    pub skipped: usize,
    pub diagnostics: Vec<String>,
}

/// Loads one split file, one JSON record per line, in file order.
/// Malformed lines are skipped and counted, never fatal; an unreadable file
/// is.
pub fn load_corpus(path: &Path, split: Split) -> Result<LoadedSplit> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut pairs = Vec::new();
    let mut skipped = 0usize;
    let mut diagnostics = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CodeDocPair>(&line) {
            Ok(mut pair) => {
                if pair.code.is_empty() || pair.doc.is_empty() {
                    skipped += 1;
                    diagnostics.push(format!(
                        "{}:{lineno}: skipped record with empty code or docstring",
                        path.display()
                    ));
                    continue;
                }
                pair.split = split;
                if pair.id.is_empty() {
                    pair.id = format!("{}-{}-{:06}", pair.language, split, lineno);
                }
                if let Some(tokens) = &pair.doc_tokens {
                    if !tokens_roundtrip(tokens) {
                        diagnostics.push(format!(
                            "{}:{lineno}: docstring_tokens do not survive a whitespace \
                             round-trip; falling back to the text tokenizer",
                            path.display()
                        ));
                        pair.doc_tokens = None;
                    }
                }
                pairs.push(pair);
            }
            Err(e) => {
                skipped += 1;
                diagnostics.push(format!("{}:{lineno}: skipped: {e}", path.display()));
            }
        }
    }
    Ok(LoadedSplit {
        pairs,
        skipped,
        diagnostics,
    })
}

/// Joining with single spaces and re-splitting must reproduce the list.
fn tokens_roundtrip(tokens: &[String]) -> bool {
    let joined = tokens.join(" ");
    let resplit: Vec<&str> = joined.split_whitespace().collect();
    resplit.len() == tokens.len() && resplit.iter().zip(tokens).all(|(a, b)| a == b)
}

/// Writes records as JSON lines (the input schema plus the `id` field).
pub fn write_pairs(path: &Path, pairs: &[CodeDocPair]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    for pair in pairs {
        let line = serde_json::to_string(pair).expect("record serializes");
        writeln!(file, "{line}").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Counts of rejected records by reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionCounts {
    pub unparsable_code: usize,
    pub doc_too_short: usize,
    pub doc_too_long: usize,
    pub special_token: usize,
    pub non_english: usize,
}

impl RejectionCounts {
    pub fn record(&mut self, reason: FilterReason) {
        match reason {
            FilterReason::Ok => {}
            FilterReason::UnparsableCode => self.unparsable_code += 1,
            FilterReason::DocTooShort => self.doc_too_short += 1,
            FilterReason::DocTooLong => self.doc_too_long += 1,
            FilterReason::SpecialToken => self.special_token += 1,
            FilterReason::NonEnglish => self.non_english += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.unparsable_code
            + self.doc_too_short
            + self.doc_too_long
            + self.special_token
            + self.non_english
    }
}

/// Per-language accept/reject statistics for a preprocessing run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub accepted: usize,
    pub rejected: RejectionCounts,
    pub skipped_lines: usize,
}

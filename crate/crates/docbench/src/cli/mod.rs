//! Run configuration and the pipeline subcommands.

pub mod commands;

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::backends::GenerationParams;
use crate::error::{Error, Result};
use crate::lexers::Language;
use crate::prompts::STOP_MARKER;

/// Which generator a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    /// Offline retrieval baseline; fully deterministic.
    Retrieval,
    /// OpenAI-style completions endpoint.
    Remote,
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "retrieval" => Ok(BackendKind::Retrieval),
            "remote" => Ok(BackendKind::Remote),
            other => Err(Error::Config(format!(
                "unknown backend {other:?}; expected \"retrieval\" or \"remote\""
            ))),
        }
    }
}

/// Every config key, its default, and its meaning; shown by `--help` on
/// every subcommand. Flags override file values, file values override
/// defaults.
pub const CONFIG_HELP: &str = "\
Configuration keys (file: flat TOML, `key = value`; precedence CLI > file > default):
  corpus_root        = \"data/cleaned\"   root of <language>/<split>.jsonl files
  languages          = \"ruby,javascript,go,python,java,php\"  comma-separated subset
  shots              = 1                number of prompt exemplars (0..=8)
  samples            = (unset)          per-language sample size; unset derives it
  confidence         = (unset)          with `margin`, derives the sample size
                                        (defaults 0.95/0.05); when neither samples
                                        nor confidence/margin is set, 1000 per
                                        language or the whole split if smaller
  margin             = (unset)          see `confidence`
  seed               = 42               base seed for sampling and exemplars
  backend            = \"retrieval\"      \"retrieval\" or \"remote\"
  endpoint           = \"https://api.openai.com/v1/completions\"
  model              = \"code-davinci-002\"
  temperature        = 0.2
  top_p              = 1.0
  frequency_penalty  = 0.0
  presence_penalty   = 0.0
  max_tokens         = 256
  out_dir            = \"out\"            all outputs land under this directory
  cache_dir          = \"cache\"          response cache; \"\" disables caching
  workers            = 4                parallel generation workers
  max_attempts       = 3                attempts per remote request
  retry_backoff_ms   = 500              initial retry backoff, doubled per retry
  request_timeout_ms = 30000
  rate_limit_per_sec = 2.0              remote token-bucket refill rate
  max_in_flight      = 4                remote in-flight request cap
The remote credential is only ever read from the DOCBENCH_API_KEY
environment variable, never from flags or files.";

/// A fully resolved run configuration. Defaults are documented in
/// [`CONFIG_HELP`].
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub corpus_root: PathBuf,
    pub languages: Vec<Language>,
    pub shots: usize,
    pub samples: Option<usize>,
    pub confidence: Option<f64>,
    pub margin: Option<f64>,
    pub seed: u64,
    pub backend: BackendKind,
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub frequency_penalty: f64,
    pub presence_penalty: f64,
    pub max_tokens: usize,
    pub out_dir: PathBuf,
    /// Empty disables caching.
    pub cache_dir: PathBuf,
    pub workers: usize,
    pub max_attempts: u32,
    pub retry_backoff_ms: u64,
    pub request_timeout_ms: u64,
    pub rate_limit_per_sec: f64,
    pub max_in_flight: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus_root: PathBuf::from("data/cleaned"),
            languages: Language::TABLE_ORDER.to_vec(),
            shots: 1,
            samples: None,
            confidence: None,
            margin: None,
            seed: 42,
            backend: BackendKind::Retrieval,
            endpoint: "https://api.openai.com/v1/completions".into(),
            model: "code-davinci-002".into(),
            temperature: 0.2,
            top_p: 1.0,
            frequency_penalty: 0.0,
            presence_penalty: 0.0,
            max_tokens: 256,
            out_dir: PathBuf::from("out"),
            cache_dir: PathBuf::from("cache"),
            workers: 4,
            max_attempts: 3,
            retry_backoff_ms: 500,
            request_timeout_ms: 30_000,
            rate_limit_per_sec: 2.0,
            max_in_flight: 4,
        }
    }
}

impl RunConfig {
    /// Loads a flat TOML config file over the defaults. Unknown keys are
    /// rejected so typos fail loudly.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let table: toml::Table = text
            .parse()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut config = RunConfig::default();
        config.apply_table(&table)?;
        Ok(config)
    }

    fn apply_table(&mut self, table: &toml::Table) -> Result<()> {
        for (key, value) in table {
            self.apply_key(key, value)?;
        }
        self.validate()
    }

    fn apply_key(&mut self, key: &str, value: &toml::Value) -> Result<()> {
        match key {
            "corpus_root" => self.corpus_root = PathBuf::from(str_value(key, value)?),
            "languages" => self.languages = parse_languages(&str_value(key, value)?)?,
            "shots" => self.shots = int_value(key, value)? as usize,
            "samples" => self.samples = Some(int_value(key, value)? as usize),
            "confidence" => self.confidence = Some(float_value(key, value)?),
            "margin" => self.margin = Some(float_value(key, value)?),
            "seed" => self.seed = int_value(key, value)? as u64,
            "backend" => self.backend = str_value(key, value)?.parse()?,
            "endpoint" => self.endpoint = str_value(key, value)?,
            "model" => self.model = str_value(key, value)?,
            "temperature" => self.temperature = float_value(key, value)?,
            "top_p" => self.top_p = float_value(key, value)?,
            "frequency_penalty" => self.frequency_penalty = float_value(key, value)?,
            "presence_penalty" => self.presence_penalty = float_value(key, value)?,
            "max_tokens" => self.max_tokens = int_value(key, value)? as usize,
            "out_dir" => self.out_dir = PathBuf::from(str_value(key, value)?),
            "cache_dir" => self.cache_dir = PathBuf::from(str_value(key, value)?),
            "workers" => self.workers = int_value(key, value)? as usize,
            "max_attempts" => self.max_attempts = int_value(key, value)? as u32,
            "retry_backoff_ms" => self.retry_backoff_ms = int_value(key, value)? as u64,
            "request_timeout_ms" => self.request_timeout_ms = int_value(key, value)? as u64,
            "rate_limit_per_sec" => self.rate_limit_per_sec = float_value(key, value)?,
            "max_in_flight" => self.max_in_flight = int_value(key, value)? as usize,
            other => {
                return Err(Error::Config(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots > 8 {
            return Err(Error::Config(format!(
                "shots must be in 0..=8, got {}",
                self.shots
            )));
        }
        if self.languages.is_empty() {
            return Err(Error::Config("languages must not be empty".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn generation_params(&self) -> GenerationParams {
        GenerationParams {
            temperature: self.temperature,
            top_p: self.top_p,
            frequency_penalty: self.frequency_penalty,
            presence_penalty: self.presence_penalty,
            max_tokens: self.max_tokens,
            stop: vec![STOP_MARKER.to_string()],
        }
    }

    pub fn caching_enabled(&self) -> bool {
        !self.cache_dir.as_os_str().is_empty()
    }

    pub fn retry_backoff(&self) -> Duration {
        Duration::from_millis(self.retry_backoff_ms)
    }

    pub fn request_timeout(&self) -> Duration {
        Duration::from_millis(self.request_timeout_ms)
    }

    /// Sample size for one language: explicit `samples` wins, then an
    /// explicit confidence/margin pair (Cochran), then 1000 per language
    /// capped at the split size.
    pub fn resolve_sample_size(&self, population: usize, language_seed: u64) -> Result<usize> {
        if let Some(n) = self.samples {
            return Ok(n.min(population));
        }
        if self.confidence.is_some() || self.margin.is_some() {
            let spec = crate::corpus::SampleSpec {
                population,
                confidence: self.confidence.unwrap_or(0.95),
                margin: self.margin.unwrap_or(0.05),
                seed: language_seed,
            };
            return crate::corpus::required_sample_size(&spec);
        }
        Ok(population.min(1000))
    }
}

/// Parses a comma-separated language list.
pub fn parse_languages(raw: &str) -> Result<Vec<Language>> {
    let mut languages = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let language: Language = part.parse()?;
        if !languages.contains(&language) {
            languages.push(language);
        }
    }
    if languages.is_empty() {
        return Err(Error::Config(format!("no languages in {raw:?}")));
    }
    Ok(languages)
}

fn str_value(key: &str, value: &toml::Value) -> Result<String> {
    value
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::Config(format!("config key {key:?} must be a string")))
}

fn int_value(key: &str, value: &toml::Value) -> Result<i64> {
    value
        .as_integer()
        .filter(|v| *v >= 0)
        .ok_or_else(|| Error::Config(format!("config key {key:?} must be a non-negative integer")))
}

fn float_value(key: &str, value: &toml::Value) -> Result<f64> {
    value
        .as_float()
        .or_else(|| value.as_integer().map(|v| v as f64))
        .ok_or_else(|| Error::Config(format!("config key {key:?} must be a number")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_match_the_documented_values() {
        let config = RunConfig::default();
        assert_eq!(config.shots, 1);
        assert_eq!(config.seed, 42);
        assert_eq!(config.backend, BackendKind::Retrieval);
        assert_eq!(config.languages.len(), 6);
        assert_eq!(config.generation_params(), GenerationParams::default());
    }

    #[test]
    fn file_overrides_defaults() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "shots = 0\nlanguages = \"python,ruby\"\nseed = 7").unwrap();
        let config = RunConfig::from_file(file.path()).unwrap();
        assert_eq!(config.shots, 0);
        assert_eq!(config.seed, 7);
        assert_eq!(config.languages, vec![Language::Python, Language::Ruby]);
        assert_eq!(config.backend, BackendKind::Retrieval); // untouched default
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "shotz = 1").unwrap();
        assert!(RunConfig::from_file(file.path()).is_err());
    }

    #[test]
    fn shots_bound_is_enforced() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "shots = 9").unwrap();
        assert!(RunConfig::from_file(file.path()).is_err());
    }

    #[test]
    fn sample_size_resolution_precedence() {
        let mut config = RunConfig::default();
        assert_eq!(config.resolve_sample_size(14918, 0).unwrap(), 1000);
        assert_eq!(config.resolve_sample_size(300, 0).unwrap(), 300);
        config.confidence = Some(0.95);
        config.margin = Some(0.05);
        assert_eq!(config.resolve_sample_size(14918, 0).unwrap(), 375);
        config.samples = Some(50);
        assert_eq!(config.resolve_sample_size(14918, 0).unwrap(), 50);
    }
}

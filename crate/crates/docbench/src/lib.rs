//! docbench: a benchmark toolkit for documentation generation over
//! CodeSearchNet-style corpora.
//!
//! The pipeline is corpus cleaning (comment stripping plus filter rules),
//! few-shot prompt construction, generation through a pluggable backend
//! (an OpenAI-style completions endpoint, or an offline retrieval baseline
//! so everything is testable without model access), and multi-metric
//! evaluation: smoothed BLEU, Flesch-Kincaid grade level, documentation
//! length, and TF-IDF informativeness. Runs are reproducible from a seed
//! and a manifest.

pub mod backends;
pub mod cli;
pub mod corpus;
mod error;
pub mod lexers;
pub mod metrics;
pub mod prompts;
pub mod report;

pub use error::{Error, Result};
pub use lexers::Language;

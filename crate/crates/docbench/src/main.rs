//! The docbench command-line interface.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use docbench::cli::commands::{cmd_preprocess, cmd_report, cmd_run, cmd_sample, cmd_score};
use docbench::cli::{parse_languages, RunConfig, CONFIG_HELP};
use docbench::metrics::{STOP_WORDS, STOP_WORDS_VERSION};

#[derive(Parser)]
#[command(
    name = "docbench",
    version,
    about = "Documentation-generation benchmark: corpus cleaning, prompting, generation, scoring",
    after_help = CONFIG_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args, Debug, Default, Clone)]
struct CommonFlags {
    /// Flat TOML run-configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed for sampling and exemplar selection.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated language subset (ruby,javascript,go,python,java,php).
    #[arg(long)]
    languages: Option<String>,
    /// Number of prompt exemplars (0..=8).
    #[arg(long)]
    shots: Option<usize>,
    /// Backend: "retrieval" or "remote".
    #[arg(long)]
    backend: Option<String>,
    /// Per-language sample size.
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Response cache directory; pass "" to disable caching.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Clean a raw corpus: strip comments, apply the filter rules, write
    /// cleaned splits and rejection statistics.
    #[command(after_help = CONFIG_HELP)]
    Preprocess {
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Draw the per-language evaluation samples and write them out.
    #[command(after_help = CONFIG_HELP)]
    Sample {
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Full evaluation: sample, prompt, generate, score, aggregate, report.
    #[command(after_help = CONFIG_HELP)]
    Run {
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Score pre-existing generations against references (one doc per
    /// line, equal line counts) without any backend.
    #[command(after_help = CONFIG_HELP)]
    Score {
        /// Predictions file.
        predictions: PathBuf,
        /// References file.
        references: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Re-render summary and tables from an existing records file.
    #[command(after_help = CONFIG_HELP)]
    Report {
        /// A records.jsonl produced by `run`.
        #[arg(long)]
        records: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Print the embedded stop-word list.
    Stopwords,
}

fn resolve_config(flags: &CommonFlags) -> docbench::Result<RunConfig> {
    let mut config = match &flags.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = flags.seed {
        config.seed = seed;
    }
    if let Some(languages) = &flags.languages {
        config.languages = parse_languages(languages)?;
    }
    if let Some(shots) = flags.shots {
        config.shots = shots;
    }
    if let Some(backend) = &flags.backend {
        config.backend = backend.parse()?;
    }
    if let Some(samples) = flags.samples {
        config.samples = Some(samples);
    }
    if let Some(out) = &flags.out {
        config.out_dir = out.clone();
    }
    if let Some(cache) = &flags.cache {
        config.cache_dir = cache.clone();
    }
    config.validate()?;
    Ok(config)
}

fn dispatch(command: Command) -> docbench::Result<u8> {
    match command {
        Command::Preprocess { flags } => {
            let config = resolve_config(&flags)?;
            let summary = cmd_preprocess(&config)?;
            println!(
                "total: {} accepted, {} rejected, {} skipped lines",
                summary.total.accepted,
                summary.total.rejected.total(),
                summary.total.skipped_lines
            );
            Ok(0)
        }
        Command::Sample { flags } => {
            let config = resolve_config(&flags)?;
            cmd_sample(&config)?;
            Ok(0)
        }
        Command::Run { flags } => {
            let config = resolve_config(&flags)?;
            let report = cmd_run(&config)?;
            println!(
                "wrote records/summary/tables/manifest under {}",
                report.out_dir.display()
            );
            if report.excessive_failures {
                eprintln!(
                    "warning: {}/{} records failed (>10%); results are unreliable",
                    report.failed, report.total
                );
                return Ok(3);
            }
            Ok(0)
        }
        Command::Score {
            predictions,
            references,
            ..
        } => {
            cmd_score(&predictions, &references)?;
            Ok(0)
        }
        Command::Report { records, flags } => {
            let config = resolve_config(&flags)?;
            cmd_report(&records, &config.out_dir)?;
            Ok(0)
        }
        Command::Stopwords => {
            println!("# stop-word list, version {STOP_WORDS_VERSION}");
            for word in STOP_WORDS {
                println!("{word}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

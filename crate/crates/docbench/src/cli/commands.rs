//! The pipeline subcommands: preprocess, sample, run, score, report.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::backends::{Cache, Generator, RemoteBackend, RemoteConfig, RetrievalBackend};
use crate::corpus::{
    derive_seed, filter_pair, load_corpus, sample, write_pairs, CodeDocPair, FilterStats, Split,
};
use crate::error::{Error, Result};
use crate::lexers::{strip_comments, Language};
use crate::metrics::{sentence_bleu, tokenize_text, IdfTable, MetricRecord};
use crate::prompts::{build_prompt, select_exemplars, Prompt};
use crate::report::{
    aggregate, builtin_baselines, file_digest, manifest_timestamp, render_summary_csv,
    render_table, write_manifest, BackendIdentity, EvalRecord, LanguageSummary, RunManifest,
};

use super::{BackendKind, RunConfig};

const SPLITS: [Split; 3] = [Split::Train, Split::Valid, Split::Test];

fn split_path(root: &Path, language: Language, split: Split) -> PathBuf {
    root.join(language.id()).join(format!("{split}.jsonl"))
}

/// Result of a preprocessing run, also serialized as the stats file.
#[derive(Debug, Clone, Serialize)]
pub struct PreprocessSummary {
    pub per_language: BTreeMap<Language, FilterStats>,
    pub total: FilterStats,
}

/// Cleans the raw corpus under `corpus_root`: strips comments, applies the
/// filter rules in order, writes accepted records (with ids) and the
/// per-language statistics under `<out_dir>/cleaned/`.
pub fn cmd_preprocess(config: &RunConfig) -> Result<PreprocessSummary> {
    let cleaned_root = config.out_dir.join("cleaned");
    let mut per_language: BTreeMap<Language, FilterStats> = BTreeMap::new();
    let mut any_input = false;

    for &language in &config.languages {
        for split in SPLITS {
            let path = split_path(&config.corpus_root, language, split);
            if !path.exists() {
                continue;
            }
            any_input = true;
            let loaded = load_corpus(&path, split)?;
            for diagnostic in &loaded.diagnostics {
                eprintln!("{diagnostic}");
            }
            let stats = per_language.entry(language).or_default();
            stats.skipped_lines += loaded.skipped;

            let mut accepted = Vec::new();
            for mut pair in loaded.pairs {
                let outcome = strip_comments(&pair.code, pair.language);
                pair.code = outcome.stripped;
                let verdict = filter_pair(&pair);
                if verdict.accepted() {
                    stats.accepted += 1;
                    accepted.push(pair);
                } else {
                    stats.rejected.record(verdict.reason);
                }
            }
            write_pairs(&split_path(&cleaned_root, language, split), &accepted)?;
            println!(
                "preprocess {language}/{split}: {} accepted, {} rejected, {} skipped lines",
                accepted.len(),
                stats.rejected.total(),
                loaded.skipped
            );
        }
    }

    if !any_input {
        return Err(Error::Argument(format!(
            "no corpus files found under {} (expected <language>/<split>.jsonl)",
            config.corpus_root.display()
        )));
    }

    let mut total = FilterStats::default();
    for stats in per_language.values() {
        total.accepted += stats.accepted;
        total.skipped_lines += stats.skipped_lines;
        total.rejected.unparsable_code += stats.rejected.unparsable_code;
        total.rejected.doc_too_short += stats.rejected.doc_too_short;
        total.rejected.doc_too_long += stats.rejected.doc_too_long;
        total.rejected.special_token += stats.rejected.special_token;
        total.rejected.non_english += stats.rejected.non_english;
    }
    let summary = PreprocessSummary {
        per_language,
        total,
    };
    let stats_path = cleaned_root.join("stats.json");
    let body = serde_json::to_string_pretty(&summary).expect("stats serialize");
    fs::write(&stats_path, body + "\n").map_err(|e| Error::io(&stats_path, e))?;
    Ok(summary)
}

/// Draws the per-language evaluation samples and writes them under
/// `<out_dir>/sample/`.
pub fn cmd_sample(config: &RunConfig) -> Result<Vec<(Language, usize)>> {
    let mut drawn = Vec::new();
    for &language in &config.languages {
        let path = split_path(&config.corpus_root, language, Split::Test);
        if !path.exists() {
            return Err(Error::Argument(format!(
                "missing test split: {}",
                path.display()
            )));
        }
        let pairs = load_corpus(&path, Split::Test)?.pairs;
        if pairs.is_empty() {
            return Err(Error::Argument(format!(
                "empty test split: {}",
                path.display()
            )));
        }
        let seed = derive_seed(config.seed, &format!("sample:{language}"));
        let n = config.resolve_sample_size(pairs.len(), seed)?;
        let sampled = sample(&pairs, n, seed)?;
        let out = config
            .out_dir
            .join("sample")
            .join(format!("{language}.jsonl"));
        write_pairs(&out, &sampled)?;
        println!("sample {language}: {n} of {}", pairs.len());
        drawn.push((language, n));
    }
    Ok(drawn)
}

/// Everything `cmd_run` produced.
#[derive(Debug)]
pub struct RunReport {
    pub total: usize,
    pub failed: usize,
    pub summaries: Vec<LanguageSummary>,
    pub out_dir: PathBuf,
    /// More than 10% of the records failed; results are written but
    /// unreliable.
    pub excessive_failures: bool,
}

fn make_generator(config: &RunConfig, train: Vec<CodeDocPair>) -> Result<Generator> {
    let cache = if config.caching_enabled() {
        Some(Cache::open(&config.cache_dir)?)
    } else {
        None
    };
    let backend: Box<dyn crate::backends::Backend> = match config.backend {
        BackendKind::Retrieval => Box::new(RetrievalBackend::new(train)?),
        BackendKind::Remote => Box::new(RemoteBackend::new(RemoteConfig {
            endpoint: config.endpoint.clone(),
            model: config.model.clone(),
            api_key: None,
            max_attempts: config.max_attempts,
            initial_backoff: config.retry_backoff(),
            request_timeout: config.request_timeout(),
            max_in_flight: config.max_in_flight,
            rate_limit_per_sec: config.rate_limit_per_sec,
        })?),
    };
    Ok(Generator::new(backend, cache))
}

/// Samples each language's test split, builds prompts, generates, scores,
/// aggregates, and writes records/summary/tables/manifest under
/// `<out_dir>`. Individual record failures are recorded with an error
/// marker and excluded from the means.
pub fn cmd_run(config: &RunConfig) -> Result<RunReport> {
    let params = config.generation_params();
    let mut records: Vec<EvalRecord> = Vec::new();
    let mut corpus_digests: BTreeMap<String, String> = BTreeMap::new();
    let mut exemplar_ids: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut backend_name = String::new();

    for &language in &config.languages {
        let test_path = split_path(&config.corpus_root, language, Split::Test);
        if !test_path.exists() {
            return Err(Error::Argument(format!(
                "missing test split: {}",
                test_path.display()
            )));
        }
        let test = load_corpus(&test_path, Split::Test)?.pairs;
        if test.is_empty() {
            return Err(Error::Argument(format!(
                "empty test split: {}",
                test_path.display()
            )));
        }
        corpus_digests.insert(format!("{language}/test"), file_digest(&test_path)?);

        let needs_train = config.backend == BackendKind::Retrieval || config.shots > 0;
        let train = if needs_train {
            let train_path = split_path(&config.corpus_root, language, Split::Train);
            if !train_path.exists() {
                return Err(Error::Argument(format!(
                    "missing train split: {}",
                    train_path.display()
                )));
            }
            corpus_digests.insert(format!("{language}/train"), file_digest(&train_path)?);
            load_corpus(&train_path, Split::Train)?.pairs
        } else {
            Vec::new()
        };

        let sample_seed = derive_seed(config.seed, &format!("sample:{language}"));
        let n = config.resolve_sample_size(test.len(), sample_seed)?;
        let targets = sample(&test, n, sample_seed)?;

        let exemplar_seed = derive_seed(config.seed, &format!("exemplars:{language}"));
        let exemplars = select_exemplars(&train, config.shots, exemplar_seed)?;
        exemplar_ids.insert(
            language.id().to_string(),
            exemplars.iter().map(|e| e.origin_id.clone()).collect(),
        );

        let prompts: Vec<Prompt> = targets
            .iter()
            .map(|target| build_prompt(target, &exemplars))
            .collect();

        let generator = make_generator(config, train)?;
        backend_name = generator.backend_name().to_string();
        let results = generator.generate_all(&prompts, &params, config.workers);

        let references: Vec<&str> = targets.iter().map(|t| t.doc.as_str()).collect();
        let idf = IdfTable::build(&references);

        let mut language_failed = 0usize;
        for (target, result) in targets.iter().zip(results) {
            let record = match result {
                Ok(generation) if generation.is_empty_output() => EvalRecord {
                    pair_id: target.id.clone(),
                    language,
                    generated: String::new(),
                    reference: target.doc.clone(),
                    metrics: None,
                    backend_name: backend_name.clone(),
                    shots: config.shots,
                    error: Some("backend returned empty output".into()),
                },
                Ok(generation) => match MetricRecord::score(&generation.doc, &target.doc, &idf) {
                    Ok(metrics) => EvalRecord {
                        pair_id: target.id.clone(),
                        language,
                        generated: generation.doc,
                        reference: target.doc.clone(),
                        metrics: Some(metrics),
                        backend_name: backend_name.clone(),
                        shots: config.shots,
                        error: None,
                    },
                    Err(e) => EvalRecord {
                        pair_id: target.id.clone(),
                        language,
                        generated: generation.doc,
                        reference: target.doc.clone(),
                        metrics: None,
                        backend_name: backend_name.clone(),
                        shots: config.shots,
                        error: Some(format!("unscoreable: {e}")),
                    },
                },
                Err(e) => EvalRecord {
                    pair_id: target.id.clone(),
                    language,
                    generated: String::new(),
                    reference: target.doc.clone(),
                    metrics: None,
                    backend_name: backend_name.clone(),
                    shots: config.shots,
                    error: Some(e.to_string()),
                },
            };
            if !record.is_scored() {
                language_failed += 1;
            }
            records.push(record);
        }
        println!(
            "run {language}: {} records, {} failed",
            targets.len(),
            language_failed
        );
    }

    let total = records.len();
    let failed = records.iter().filter(|r| !r.is_scored()).count();

    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
    let records_path = config.out_dir.join("records.jsonl");
    let mut body = String::new();
    for record in &records {
        body.push_str(&serde_json::to_string(record).expect("record serializes"));
        body.push('\n');
    }
    fs::write(&records_path, body).map_err(|e| Error::io(&records_path, e))?;

    let summaries = if failed == total {
        Vec::new()
    } else {
        aggregate(&records)?
    };
    let summary_path = config.out_dir.join("summary.csv");
    fs::write(&summary_path, render_summary_csv(&summaries))
        .map_err(|e| Error::io(&summary_path, e))?;

    let label = format!("docbench {backend_name} ({}-shot)", config.shots);
    let tables = render_table(&summaries, &builtin_baselines(), &label);
    let table_csv_path = config.out_dir.join("table.csv");
    fs::write(&table_csv_path, &tables.delimited).map_err(|e| Error::io(&table_csv_path, e))?;
    let table_md_path = config.out_dir.join("table.md");
    fs::write(&table_md_path, &tables.human).map_err(|e| Error::io(&table_md_path, e))?;

    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: manifest_timestamp(),
        seed: config.seed,
        config: serde_json::to_value(config).expect("config serializes"),
        backend: BackendIdentity {
            name: backend_name.clone(),
            model: match config.backend {
                BackendKind::Remote => Some(config.model.clone()),
                BackendKind::Retrieval => None,
            },
            endpoint: match config.backend {
                BackendKind::Remote => Some(config.endpoint.clone()),
                BackendKind::Retrieval => None,
            },
            params,
        },
        corpus_digests,
        exemplar_ids,
    };
    write_manifest(&config.out_dir.join("manifest.json"), &manifest)?;

    if failed > 0 {
        println!("excluded {failed} failed records of {total} from the means");
    }
    Ok(RunReport {
        total,
        failed,
        summaries,
        out_dir: config.out_dir.clone(),
        excessive_failures: failed * 10 > total,
    })
}

/// Mean smoothed BLEU of pre-existing generations against references,
/// line-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSummary {
    pub n: usize,
    pub mean_bleu: f64,
}

/// Scores a predictions file against a references file (one doc per line,
/// equal line counts) without any backend.
pub fn cmd_score(predictions: &Path, references: &Path) -> Result<ScoreSummary> {
    let pred_text = fs::read_to_string(predictions).map_err(|e| Error::io(predictions, e))?;
    let ref_text = fs::read_to_string(references).map_err(|e| Error::io(references, e))?;
    let pred_lines: Vec<&str> = pred_text.lines().collect();
    let ref_lines: Vec<&str> = ref_text.lines().collect();
    if pred_lines.len() != ref_lines.len() {
        return Err(Error::Argument(format!(
            "line count mismatch: {} predictions vs {} references",
            pred_lines.len(),
            ref_lines.len()
        )));
    }
    if pred_lines.is_empty() {
        return Err(Error::Argument("nothing to score: files are empty".into()));
    }
    let mut sum = 0.0;
    for (lineno, (pred, reference)) in pred_lines.iter().zip(&ref_lines).enumerate() {
        let reference_tokens = tokenize_text(reference);
        if reference_tokens.is_empty() {
            return Err(Error::Argument(format!(
                "reference line {} has no tokens",
                lineno + 1
            )));
        }
        sum += sentence_bleu(&tokenize_text(pred), &reference_tokens);
    }
    let summary = ScoreSummary {
        n: pred_lines.len(),
        mean_bleu: sum / pred_lines.len() as f64,
    };
    println!(
        "scored {} pairs: mean smoothed BLEU {:.2}",
        summary.n, summary.mean_bleu
    );
    Ok(summary)
}

/// Re-aggregates an existing records file and rewrites the summary and
/// tables under `out_dir`.
pub fn cmd_report(records_path: &Path, out_dir: &Path) -> Result<Vec<LanguageSummary>> {
    let text = fs::read_to_string(records_path).map_err(|e| Error::io(records_path, e))?;
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: EvalRecord = serde_json::from_str(line).map_err(|e| {
            Error::Argument(format!(
                "{}:{}: bad record: {e}",
                records_path.display(),
                lineno + 1
            ))
        })?;
        records.push(record);
    }
    let summaries = aggregate(&records)?;
    let label = records
        .iter()
        .find(|r| r.is_scored())
        .map(|r| format!("docbench {} ({}-shot)", r.backend_name, r.shots))
        .unwrap_or_else(|| "docbench".to_string());

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let summary_path = out_dir.join("summary.csv");
    fs::write(&summary_path, render_summary_csv(&summaries))
        .map_err(|e| Error::io(&summary_path, e))?;
    let tables = render_table(&summaries, &builtin_baselines(), &label);
    let table_csv_path = out_dir.join("table.csv");
    fs::write(&table_csv_path, &tables.delimited).map_err(|e| Error::io(&table_csv_path, e))?;
    let table_md_path = out_dir.join("table.md");
    fs::write(&table_md_path, &tables.human).map_err(|e| Error::io(&table_md_path, e))?;
    println!("{}", tables.human);
    Ok(summaries)
}

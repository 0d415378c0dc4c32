//! Documentation generation through a pluggable backend: a remote
//! completion endpoint, or a deterministic offline retrieval baseline so
//! the whole pipeline runs without model access.

mod cache;
mod postprocess;
mod remote;
mod retrieval;

pub use cache::{cache_key, Cache};
pub use postprocess::postprocess;
pub use remote::{RemoteBackend, RemoteConfig, API_KEY_ENV};
pub use retrieval::{retrieval_baseline, RetrievalBackend};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::prompts::{Prompt, STOP_MARKER};

/// Decoding controls for a completion request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub temperature: f64,
    pub top_p: f64,
    pub frequency_penalty: f64,
    pub presence_penalty: f64,
    pub max_tokens: usize,
    pub stop: Vec<String>,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            temperature: 0.2,
            top_p: 1.0,
            frequency_penalty: 0.0,
            presence_penalty: 0.0,
            max_tokens: 256,
            stop: vec![STOP_MARKER.to_string()],
        }
    }
}

/// One backend completion, raw and post-processed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub raw: String,
    pub doc: String,
    pub backend_name: String,
    pub cached: bool,
    pub latency_ms: u64,
}

impl GenerationResult {
    /// Builds a result from a raw completion; `doc` is always the
    /// post-processed form of `raw`.
    pub fn from_raw(raw: String, backend_name: &str, params: &GenerationParams) -> Self {
        let doc = postprocess(&raw, &params.stop);
        GenerationResult {
            raw,
            doc,
            backend_name: backend_name.to_string(),
            cached: false,
            latency_ms: 0,
        }
    }

    /// Explicit marker for completions that post-process to nothing.
    pub fn is_empty_output(&self) -> bool {
        self.doc.is_empty()
    }
}

/// A documentation generator.
pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn generate(&self, prompt: &Prompt, params: &GenerationParams) -> Result<GenerationResult>;
}

/// Wraps a backend with an optional content-addressed cache; identical
/// requests are answered from the cache without touching the backend.
pub struct Generator {
    backend: Box<dyn Backend>,
    cache: Option<Cache>,
}

impl Generator {
    pub fn new(backend: Box<dyn Backend>, cache: Option<Cache>) -> Self {
        Generator { backend, cache }
    }

    pub fn backend_name(&self) -> &str {
        self.backend.name()
    }

    pub fn generate(&self, prompt: &Prompt, params: &GenerationParams) -> Result<GenerationResult> {
        let key = cache_key(self.backend.name(), &prompt.text, params);
        if let Some(cache) = &self.cache {
            if let Some(mut hit) = cache.get(&key) {
                hit.cached = true;
                hit.latency_ms = 0;
                return Ok(hit);
            }
        }
        let started = Instant::now();
        let mut result = self.backend.generate(prompt, params)?;
        result.latency_ms = started.elapsed().as_millis() as u64;
        if let Some(cache) = &self.cache {
            cache.put(&key, &result)?;
        }
        Ok(result)
    }

    /// Generates for every prompt with up to `workers` threads. Results
    /// come back in input order no matter how the work is scheduled.
    pub fn generate_all(
        &self,
        prompts: &[Prompt],
        params: &GenerationParams,
        workers: usize,
    ) -> Vec<Result<GenerationResult>> {
        if prompts.is_empty() {
            return Vec::new();
        }
        let workers = workers.clamp(1, prompts.len());
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<Result<GenerationResult>>>> =
            prompts.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= prompts.len() {
                        break;
                    }
                    let result = self.generate(&prompts[i], params);
                    *slots[i].lock().expect("slot lock") = Some(result);
                });
            }
        });
        slots
            .into_iter()
            .map(|slot| {
                slot.into_inner()
                    .expect("slot lock")
                    .expect("every slot filled")
            })
            .collect()
    }
}

//! Blocking client for an OpenAI-style completions endpoint, with
//! exponential-backoff retries, a token-bucket rate limit, and a cap on
//! concurrent in-flight requests.

use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prompts::Prompt;

use super::{Backend, GenerationParams, GenerationResult};

/// Environment variable holding the bearer token. The credential is never
/// read from flags or config files, so manifests stay shareable.
pub const API_KEY_ENV: &str = "DOCBENCH_API_KEY";

/// Connection settings for the remote backend.
#[derive(Debug, Clone)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub model: String,
    /// Bearer token; when `None`, `DOCBENCH_API_KEY` is consulted.
    pub api_key: Option<String>,
    /// Total attempts per request, including the first.
    pub max_attempts: u32,
    pub initial_backoff: Duration,
    pub request_timeout: Duration,
    pub max_in_flight: usize,
    pub rate_limit_per_sec: f64,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        RemoteConfig {
            endpoint: "https://api.openai.com/v1/completions".into(),
            model: "code-davinci-002".into(),
            api_key: None,
            max_attempts: 3,
            initial_backoff: Duration::from_millis(500),
            request_timeout: Duration::from_secs(30),
            max_in_flight: 4,
            rate_limit_per_sec: 2.0,
        }
    }
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    temperature: f64,
    top_p: f64,
    frequency_penalty: f64,
    presence_penalty: f64,
    max_tokens: usize,
    stop: &'a [String],
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    text: String,
}

struct TokenBucket {
    capacity: f64,
    refill_per_sec: f64,
    state: Mutex<(f64, Instant)>,
}

impl TokenBucket {
    fn new(rate_per_sec: f64) -> Self {
        let capacity = rate_per_sec.max(1.0);
        TokenBucket {
            capacity,
            refill_per_sec: rate_per_sec.max(f64::MIN_POSITIVE),
            state: Mutex::new((capacity, Instant::now())),
        }
    }

    fn acquire(&self) {
        loop {
            let wait = {
                let mut state = self.state.lock().expect("bucket lock");
                let (ref mut tokens, ref mut last) = *state;
                let now = Instant::now();
                *tokens = (*tokens + now.duration_since(*last).as_secs_f64() * self.refill_per_sec)
                    .min(self.capacity);
                *last = now;
                if *tokens >= 1.0 {
                    *tokens -= 1.0;
                    return;
                }
                Duration::from_secs_f64((1.0 - *tokens) / self.refill_per_sec)
            };
            std::thread::sleep(wait);
        }
    }
}

struct InFlightLimit {
    permits: Mutex<usize>,
    freed: Condvar,
}

impl InFlightLimit {
    fn new(max: usize) -> Self {
        InFlightLimit {
            permits: Mutex::new(max.max(1)),
            freed: Condvar::new(),
        }
    }

    fn run<T>(&self, work: impl FnOnce() -> T) -> T {
        let mut permits = self.permits.lock().expect("permit lock");
        while *permits == 0 {
            permits = self.freed.wait(permits).expect("permit lock");
        }
        *permits -= 1;
        drop(permits);
        let out = work();
        *self.permits.lock().expect("permit lock") += 1;
        self.freed.notify_one();
        out
    }
}

/// The remote completion backend.
pub struct RemoteBackend {
    config: RemoteConfig,
    api_key: String,
    client: reqwest::blocking::Client,
    bucket: TokenBucket,
    in_flight: InFlightLimit,
}

impl RemoteBackend {
    /// Fails before any request when no credential is available.
    pub fn new(config: RemoteConfig) -> Result<Self> {
        let api_key = config
            .api_key
            .clone()
            .or_else(|| std::env::var(API_KEY_ENV).ok())
            .filter(|k| !k.is_empty())
            .ok_or_else(|| {
                Error::Config(format!(
                    "missing credential: set {API_KEY_ENV} in the environment"
                ))
            })?;
        let client = reqwest::blocking::Client::builder()
            .timeout(config.request_timeout)
            .build()
            .map_err(|e| Error::Config(format!("http client: {e}")))?;
        let bucket = TokenBucket::new(config.rate_limit_per_sec);
        let in_flight = InFlightLimit::new(config.max_in_flight);
        Ok(RemoteBackend {
            config,
            api_key,
            client,
            bucket,
            in_flight,
        })
    }

    fn request_once(&self, body: &CompletionRequest<'_>) -> std::result::Result<String, RetryOr> {
        self.bucket.acquire();
        let response = self
            .client
            .post(&self.config.endpoint)
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| RetryOr::Retry(format!("transport: {e}")))?;

        let status = response.status();
        if status.is_success() {
            let parsed: CompletionResponse = response
                .json()
                .map_err(|e| RetryOr::Fatal(format!("malformed response body: {e}")))?;
            let choice = parsed
                .choices
                .into_iter()
                .next()
                .ok_or_else(|| RetryOr::Fatal("response carried no choices".into()))?;
            return Ok(choice.text);
        }
        let message = format!("{status}: {}", response.text().unwrap_or_default());
        if status.as_u16() == 429 || status.is_server_error() {
            Err(RetryOr::Retry(message))
        } else {
            Err(RetryOr::Fatal(message))
        }
    }
}

enum RetryOr {
    Retry(String),
    Fatal(String),
}

impl Backend for RemoteBackend {
    fn name(&self) -> &str {
        "remote"
    }

    fn generate(&self, prompt: &Prompt, params: &GenerationParams) -> Result<GenerationResult> {
        self.in_flight.run(|| {
            let body = CompletionRequest {
                model: &self.config.model,
                prompt: &prompt.text,
                temperature: params.temperature,
                top_p: params.top_p,
                frequency_penalty: params.frequency_penalty,
                presence_penalty: params.presence_penalty,
                max_tokens: params.max_tokens,
                stop: &params.stop,
            };
            let mut backoff = self.config.initial_backoff;
            let mut last_cause = String::new();
            for attempt in 1..=self.config.max_attempts.max(1) {
                match self.request_once(&body) {
                    Ok(raw) => return Ok(GenerationResult::from_raw(raw, self.name(), params)),
                    Err(RetryOr::Fatal(cause)) => return Err(Error::Backend(cause)),
                    Err(RetryOr::Retry(cause)) => last_cause = cause,
                }
                if attempt < self.config.max_attempts {
                    std::thread::sleep(backoff);
                    backoff *= 2;
                }
            }
            Err(Error::Backend(format!(
                "gave up after {} attempts; last cause: {last_cause}",
                self.config.max_attempts.max(1)
            )))
        })
    }
}

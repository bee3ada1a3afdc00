use std::io;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{CompletionRequest, Model, ModelDescriptor, ModelError};

pub const DEFAULT_API_KEY_ENV: &str = "MODEL_API_KEY";

/// Connection settings for an OpenAI-style chat completions endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelEndpoint {
    pub base_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub temperature: f64,
    pub max_tokens: u32,
    #[serde(with = "secs")]
    pub timeout: Duration,
    pub max_retries: u32,
    /// First retry delay; doubles on each further retry.
    #[serde(with = "secs")]
    pub backoff_base: Duration,
    /// Requests per second across all threads; `None` for unlimited.
    pub rate_limit: Option<f64>,
    pub max_in_flight: usize,
}

mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

impl Default for ModelEndpoint {
    fn default() -> Self {
        Self {
            base_url: String::new(),
            model_name: String::new(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            temperature: 0.0,
            max_tokens: 256,
            timeout: Duration::from_secs(60),
            max_retries: 5,
            backoff_base: Duration::from_millis(500),
            rate_limit: None,
            max_in_flight: 4,
        }
    }
}

impl ModelEndpoint {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidConfig(m.into()));
        if self.base_url.is_empty() {
            return bad("base_url is required");
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return bad("temperature must lie in [0, 2]");
        }
        if self.timeout.is_zero() {
            return bad("timeout must be positive");
        }
        if matches!(self.rate_limit, Some(r) if r.is_nan() || r <= 0.0) {
            return bad("rate_limit must be positive");
        }
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be at least 1");
        }
        Ok(())
    }
}

pub struct HttpModel {
    endpoint: ModelEndpoint,
    agent: ureq::Agent,
    api_key: Option<String>,
    next_slot: Mutex<Instant>,
}

impl HttpModel {
    /// Reads the API key from the configured environment variable; a
    /// missing key sends no authorization header.
    pub fn new(endpoint: ModelEndpoint) -> Result<Self, ModelError> {
        endpoint.validate()?;
        let api_key = std::env::var(&endpoint.api_key_env).ok().filter(|k| !k.is_empty());
        let agent = ureq::AgentBuilder::new().timeout(endpoint.timeout).build();
        Ok(Self { endpoint, agent, api_key, next_slot: Mutex::new(Instant::now()) })
    }

    pub fn endpoint(&self) -> &ModelEndpoint {
        &self.endpoint
    }

    fn wait_for_slot(&self) {
        let Some(rate) = self.endpoint.rate_limit else { return };
        let interval = Duration::from_secs_f64(1.0 / rate);
        let wake = {
            let mut next = self.next_slot.lock().unwrap();
            let now = Instant::now();
            let slot = (*next).max(now);
            *next = slot + interval;
            slot
        };
        let now = Instant::now();
        if wake > now {
            thread::sleep(wake - now);
        }
    }

    fn url(&self) -> String {
        format!("{}/chat/completions", self.endpoint.base_url.trim_end_matches('/'))
    }

    fn attempt(&self, prompt: &str) -> Result<String, ModelError> {
        self.wait_for_slot();
        let body = json!({
            "model": self.endpoint.model_name,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.endpoint.temperature,
            "max_tokens": self.endpoint.max_tokens,
        });
        let mut req = self.agent.post(&self.url()).set("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let resp = req.send_json(body).map_err(map_ureq)?;
        let value: Value = resp.into_json().map_err(|e| {
            if is_timeout(&e) {
                ModelError::Timeout
            } else {
                ModelError::MalformedResponse(e.to_string())
            }
        })?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_owned)
            .ok_or_else(|| ModelError::MalformedResponse("missing choices[0].message.content".into()))
    }
}

fn is_timeout(e: &io::Error) -> bool {
    matches!(e.kind(), io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock)
}

fn map_ureq(e: ureq::Error) -> ModelError {
    match e {
        ureq::Error::Status(code, _) => ModelError::HttpStatus(code),
        ureq::Error::Transport(t) => {
            let timed_out =
                std::error::Error::source(&t).and_then(|s| s.downcast_ref::<io::Error>()).is_some_and(is_timeout);
            if timed_out {
                ModelError::Timeout
            } else {
                ModelError::Transport(t.to_string())
            }
        }
    }
}

impl Model for HttpModel {
    /// Retries transient failures with exponential backoff, up to
    /// `max_retries` extra attempts, then returns the last error.
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ModelError> {
        let mut delay = self.endpoint.backoff_base;
        let mut retries = 0;
        loop {
            match self.attempt(request.prompt) {
                Ok(text) => return Ok(text),
                Err(e) if e.is_transient() && retries < self.endpoint.max_retries => {
                    retries += 1;
                    thread::sleep(delay);
                    delay = delay.saturating_mul(2);
                }
                Err(e) => return Err(e),
            }
        }
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor {
            name: self.endpoint.model_name.clone(),
            endpoint: Some(self.endpoint.base_url.clone()),
            mock: None,
        }
    }
}

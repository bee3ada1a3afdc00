//! Text-completion backends: an HTTP chat endpoint and a mock oracle with a
//! known success probability.

mod http;
mod mock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use http::{HttpModel, ModelEndpoint, DEFAULT_API_KEY_ENV};
pub use mock::{mock_complete, mock_seed_for, MockMode, MockModel, MockOracleConfig};

/// Facts about the prompt the harness knows but a real model does not.
/// Only the mock reads them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PromptMetadata {
    pub correct_index: usize,
    pub distractor_index: Option<usize>,
    pub hops: usize,
    pub num_options: usize,
    pub sample_index: u64,
}

#[derive(Clone, Debug)]
pub struct CompletionRequest<'a> {
    pub prompt: &'a str,
    pub metadata: PromptMetadata,
}

/// How a certificate names the model it was issued for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mock: Option<String>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("request timed out")]
    Timeout,
    #[error("endpoint returned HTTP {0}")]
    HttpStatus(u16),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
}

impl ModelError {
    /// Worth retrying: timeouts, transport failures, 429 and 5xx.
    pub fn is_transient(&self) -> bool {
        match self {
            ModelError::Timeout | ModelError::Transport(_) => true,
            ModelError::HttpStatus(code) => *code == 429 || *code >= 500,
            _ => false,
        }
    }
}

pub trait Model: Send + Sync {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ModelError>;
    fn descriptor(&self) -> ModelDescriptor;
}

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::Prompt;
use crate::sampling::SpecConfig;

/// One line of a prompt export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub spec: SpecConfig,
    pub index: usize,
    pub hops: usize,
    pub query: String,
    pub options: Vec<String>,
    pub correct_index: usize,
    pub prompt: String,
}

impl PromptRecord {
    pub fn new(spec: &SpecConfig, index: usize, prompt: &Prompt) -> Self {
        Self {
            spec: spec.clone(),
            index,
            hops: prompt.query.path.hops(),
            query: prompt.query.rendered.clone(),
            options: prompt.options.options.clone(),
            correct_index: prompt.options.correct_index,
            prompt: prompt.rendered.clone(),
        }
    }
}

/// Appends the record as one JSON line.
pub fn write_prompt_record<W: Write>(record: &PromptRecord, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer(&mut out, record)?;
    out.write_all(b"\n")
}

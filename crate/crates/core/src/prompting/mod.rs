//! Turning a sampled query into the final prompt text: evidence selection,
//! budgeted context, block arrangement and the fixed template.

mod context;
mod evidence;
mod export;
mod template;

use thiserror::Error;

pub use context::{arrange_context, build_blocks, build_context, estimate_tokens, render_context, ContextBlock, Tier};
pub use evidence::{collect_evidence, Evidence, SentenceRef};
pub use export::{write_prompt_record, PromptRecord};
pub use template::{few_shot_block, render_prompt, Prompt, FEW_SHOT_BANK, PROMPT_TEMPLATE, TEMPLATE_VERSION};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PromptError {
    #[error("required evidence needs {needed} tokens but only {budget} are available")]
    QueryEvidenceOverflow { needed: usize, budget: usize },
}

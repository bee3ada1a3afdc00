use rand::Rng;
use thiserror::Error;

use crate::prompting::{
    arrange_context, build_blocks, build_context, collect_evidence, estimate_tokens, render_prompt, Prompt, PromptError,
};
use crate::sampling::{
    generate_answer_options, sample_distractor, sample_path, sample_query, Distractor, SamplingError, SpecConfig,
    SubgraphView,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

/// One sampled prompt together with the choices behind it.
#[derive(Clone, Debug)]
pub struct Instance {
    pub distractor: Option<Distractor>,
    pub prompt: Prompt,
}

impl Instance {
    pub fn hops(&self) -> usize {
        self.prompt.query.path.hops()
    }
}

/// Draws path, query, distractor (for the distractor kind), options and
/// context, and renders the prompt. The token budget covers the whole
/// prompt, so the context gets what the template, examples, query and
/// options leave over.
pub fn generate_instance<R: Rng + ?Sized>(
    sub: &SubgraphView<'_>,
    spec: &SpecConfig,
    rng: &mut R,
) -> Result<Instance, InstanceError> {
    let graph = sub.graph();
    let path = sample_path(sub, spec.max_hops, rng)?;
    let query = sample_query(graph, &path, rng);
    let distractor =
        if spec.kind.uses_distractor() { sample_distractor(graph, &path, spec.distractor_mode, rng) } else { None };
    let options = generate_answer_options(graph, &path, distractor.as_ref(), spec, rng)?;
    let evidence = collect_evidence(graph, &path, &options, distractor.as_ref());

    let skeleton = render_prompt(spec.few_shot_count, Vec::new(), query.clone(), options.clone());
    let overhead = estimate_tokens(&skeleton.rendered);
    let context_budget = spec
        .token_budget
        .checked_sub(overhead)
        .ok_or(PromptError::QueryEvidenceOverflow { needed: overhead, budget: spec.token_budget })?;

    let mut required = evidence.query.clone();
    required.extend(evidence.distractor.iter().cloned());
    let selected = build_context(&required, &evidence.options, &evidence.all, context_budget, |s| s.text(graph))?;
    let (blocks, distractor_block) =
        build_blocks(graph, &selected, &path, &evidence.options, distractor.as_ref().map(|d| &d.node));
    let context = arrange_context(blocks, spec.kind, distractor_block, &path, rng);
    let prompt = render_prompt(spec.few_shot_count, context, query, options);
    debug_assert!(prompt.token_estimate <= spec.token_budget);
    Ok(Instance { distractor, prompt })
}

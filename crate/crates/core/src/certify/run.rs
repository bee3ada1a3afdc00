use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{generate_instance, CertifyError, Instance};
use crate::evaluation::{check_response, CHECKER_VERSION};
use crate::kg::KnowledgeGraph;
use crate::model::{CompletionRequest, Model, ModelDescriptor, PromptMetadata};
use crate::prompting::TEMPLATE_VERSION;
use crate::sampling::{extract_subgraph, SpecConfig, SubgraphView};
use crate::seed::derive_rng;
use crate::stats::clopper_pearson;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Worker threads; 0 uses the global rayon pool.
    pub threads: usize,
    /// Fresh sub-seeds tried after a sampler failure before giving up.
    pub max_redraws: usize,
    /// Timestamp written into the certificate. Passed in rather than read
    /// from the clock so that reruns can be byte-identical.
    pub created_at: String,
    /// Where the per-sample log will be written, recorded in the certificate.
    pub sample_log: Option<String>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { threads: 0, max_redraws: 16, created_at: "1970-01-01T00:00:00Z".into(), sample_log: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HopTally {
    pub hops: usize,
    pub n: usize,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Results {
    pub n: usize,
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    pub accuracy: f64,
    pub per_hop: Vec<HopTally>,
    /// Sampler failures that were replaced by a fresh sub-seed.
    pub redraws: usize,
    /// Distractor-kind samples whose path admitted no distractor.
    pub samples_without_distractor: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub spec: SpecConfig,
    pub model: ModelDescriptor,
    pub results: Results,
    pub checker_version: String,
    pub template_version: u32,
    pub created_at: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_log: Option<String>,
    pub incomplete: bool,
}

/// One line of the per-sample log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub hops: usize,
    pub prompt_sha256: String,
    pub verdict: bool,
    pub chosen_option: Option<usize>,
    pub redraws: usize,
}

struct Outcome {
    record: SampleRecord,
    missing_distractor: bool,
}

/// Generates the instance for sample `index`, redrawing with fresh
/// sub-seeds on sampler failure. Returns the instance and the number of
/// redraws it took.
pub fn draw_instance(
    sub: &SubgraphView<'_>,
    spec: &SpecConfig,
    index: usize,
    max_redraws: usize,
) -> Result<(Instance, usize), CertifyError> {
    let mut attempt = 0;
    loop {
        let mut rng = derive_rng(spec.seed, &[index as u64, attempt as u64]);
        match generate_instance(sub, spec, &mut rng) {
            Ok(inst) => return Ok((inst, attempt)),
            Err(last) if attempt >= max_redraws => {
                return Err(CertifyError::RedrawsExhausted { index, attempts: attempt + 1, last })
            }
            Err(_) => attempt += 1,
        }
    }
}

fn run_sample(
    sub: &SubgraphView<'_>,
    spec: &SpecConfig,
    model: &dyn Model,
    opts: &CertifyOptions,
    index: usize,
) -> Result<Outcome, CertifyError> {
    let (instance, attempt) = draw_instance(sub, spec, index, opts.max_redraws)?;
    let prompt = &instance.prompt;
    let metadata = PromptMetadata {
        correct_index: prompt.options.correct_index,
        distractor_index: prompt.options.distractor_index(),
        hops: instance.hops(),
        num_options: prompt.options.len(),
        sample_index: index as u64,
    };
    let response = model
        .complete(&CompletionRequest { prompt: &prompt.rendered, metadata })
        .map_err(|source| CertifyError::Model { index, source })?;
    let verdict = check_response(&response, prompt.options.correct_index);
    Ok(Outcome {
        record: SampleRecord {
            index,
            hops: instance.hops(),
            prompt_sha256: hex::encode(Sha256::digest(prompt.rendered.as_bytes())),
            verdict: verdict.correct,
            chosen_option: verdict.chosen_option,
            redraws: attempt,
        },
        missing_distractor: spec.kind.uses_distractor() && instance.distractor.is_none(),
    })
}

/// Draws `spec.n_samples` prompts, asks the model, and bounds its accuracy.
///
/// Sample `i` uses the RNG stream `(seed, i, attempt)`, so results do not
/// depend on thread count or scheduling. Sampler failures are redrawn;
/// model failures abort the run.
pub fn certify(
    graph: &KnowledgeGraph,
    spec: &SpecConfig,
    model: &dyn Model,
    opts: &CertifyOptions,
) -> Result<(Certificate, Vec<SampleRecord>), CertifyError> {
    spec.validate()?;
    let sub = extract_subgraph(graph, &spec.pivot, spec.max_hops)?;
    let work = || {
        (0..spec.n_samples)
            .into_par_iter()
            .map(|i| run_sample(&sub, spec, model, opts, i))
            .collect::<Result<Vec<_>, _>>()
    };
    let outcomes = if opts.threads == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| CertifyError::Io { path: "<thread pool>".into(), message: e.to_string() })?
            .install(work)?
    };

    let n = outcomes.len();
    let k = outcomes.iter().filter(|o| o.record.verdict).count();
    let mut per_hop: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for o in &outcomes {
        let t = per_hop.entry(o.record.hops).or_default();
        t.0 += 1;
        t.1 += usize::from(o.record.verdict);
    }
    let interval = clopper_pearson::<f64>(k as u64, n as u64, spec.delta())?;
    let accuracy = k as f64 / n as f64;
    assert!(interval.contains(accuracy), "point estimate outside its interval");

    let results = Results {
        n,
        k,
        lower: interval.lower,
        upper: interval.upper,
        accuracy,
        per_hop: per_hop.into_iter().map(|(hops, (n, k))| HopTally { hops, n, k }).collect(),
        redraws: outcomes.iter().map(|o| o.record.redraws).sum(),
        samples_without_distractor: outcomes.iter().filter(|o| o.missing_distractor).count(),
    };
    let cert = Certificate {
        schema_version: SCHEMA_VERSION,
        spec: spec.clone(),
        model: model.descriptor(),
        results,
        checker_version: CHECKER_VERSION.into(),
        template_version: TEMPLATE_VERSION,
        created_at: opts.created_at.clone(),
        sample_log: opts.sample_log.clone(),
        incomplete: false,
    };
    Ok((cert, outcomes.into_iter().map(|o| o.record).collect()))
}

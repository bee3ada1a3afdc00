use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{PromptError, SentenceRef};
use crate::kg::{KnowledgeGraph, NodeId};
use crate::sampling::{Path, SpecKind};

/// Token proxy: one token per four bytes, rounded up.
pub fn estimate_tokens(text: &str) -> usize {
    text.len().div_ceil(4)
}

/// Bytes a sentence occupies in the rendered context, counting the one
/// separator that follows it.
fn cost(text: &str) -> usize {
    text.len() + 1
}

/// Greedy budgeted context.
///
/// `required` (query evidence, plus distractor evidence when present) must
/// fit or the call fails. Then `options` followed by `all` are appended in
/// order, skipping sentences already taken, until the first one that does
/// not fit. A sentence whose owner's lead is not yet present is taken
/// together with that lead. Stopping at the first misfit makes the result
/// prefix-stable in `budget`.
pub fn build_context<'a>(
    required: &[SentenceRef],
    options: &[SentenceRef],
    all: &[SentenceRef],
    budget: usize,
    text: impl Fn(&SentenceRef) -> &'a str,
) -> Result<Vec<SentenceRef>, PromptError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut bytes = 0usize;
    for s in required {
        if seen.insert(s.clone()) {
            bytes += cost(text(s));
            out.push(s.clone());
        }
    }
    let needed = bytes.div_ceil(4);
    if needed > budget {
        return Err(PromptError::QueryEvidenceOverflow { needed, budget });
    }
    for s in options.iter().chain(all) {
        if seen.contains(s) {
            continue;
        }
        let lead = SentenceRef::new(&s.owner, 0);
        let mut unit = Vec::with_capacity(2);
        if s.index != 0 && !seen.contains(&lead) {
            unit.push(lead);
        }
        unit.push(s.clone());
        let extra: usize = unit.iter().map(|u| cost(text(u))).sum();
        if (bytes + extra).div_ceil(4) > budget {
            break;
        }
        bytes += extra;
        for u in unit {
            seen.insert(u.clone());
            out.push(u);
        }
    }
    Ok(out)
}

/// Why a block is in the context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    QueryEvidence,
    OptionEvidence,
    Background,
}

/// The included sentences of one node, in text order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextBlock {
    pub owner: NodeId,
    pub indices: Vec<usize>,
    pub sentences: Vec<String>,
    pub tier: Tier,
}

impl ContextBlock {
    pub fn render(&self) -> String {
        self.sentences.join(" ")
    }
}

/// Groups selected sentences into one block per owner, in order of first
/// appearance. The distractor's block, if any, is returned separately.
pub fn build_blocks(
    graph: &KnowledgeGraph,
    selected: &[SentenceRef],
    path: &Path,
    option_evidence: &[SentenceRef],
    distractor: Option<&NodeId>,
) -> (Vec<ContextBlock>, Option<ContextBlock>) {
    let option_owners: BTreeSet<&NodeId> = option_evidence.iter().map(|s| &s.owner).collect();
    let mut order: Vec<&NodeId> = Vec::new();
    let mut grouped: BTreeMap<&NodeId, Vec<usize>> = BTreeMap::new();
    for s in selected {
        let entry = grouped.entry(&s.owner).or_insert_with(|| {
            order.push(&s.owner);
            Vec::new()
        });
        entry.push(s.index);
    }
    let mut blocks = Vec::new();
    let mut distractor_block = None;
    for owner in order {
        let mut indices = grouped.remove(owner).unwrap();
        indices.sort_unstable();
        let node = graph.node(owner).expect("owner in graph");
        let tier = if path.contains(owner) {
            Tier::QueryEvidence
        } else if option_owners.contains(owner) || Some(owner) == distractor {
            Tier::OptionEvidence
        } else {
            Tier::Background
        };
        let block = ContextBlock {
            owner: owner.clone(),
            sentences: indices.iter().map(|&i| node.context_sentences[i].clone()).collect(),
            indices,
            tier,
        };
        if Some(owner) == distractor {
            distractor_block = Some(block);
        } else {
            blocks.push(block);
        }
    }
    (blocks, distractor_block)
}

/// Orders blocks for the given kind. Vanilla puts path blocks in path order
/// followed by the rest in their given order and never includes the
/// distractor. Shuffle permutes uniformly. ShuffleDistractor adds the
/// distractor block and then permutes.
pub fn arrange_context<R: Rng + ?Sized>(
    mut blocks: Vec<ContextBlock>,
    kind: SpecKind,
    distractor_block: Option<ContextBlock>,
    path: &Path,
    rng: &mut R,
) -> Vec<ContextBlock> {
    match kind {
        SpecKind::Vanilla => {
            let pos = |b: &ContextBlock| path.nodes.iter().position(|n| *n == b.owner).unwrap_or(usize::MAX);
            blocks.sort_by_key(pos);
        }
        SpecKind::Shuffle => blocks.shuffle(rng),
        SpecKind::ShuffleDistractor => {
            blocks.extend(distractor_block);
            blocks.shuffle(rng);
        }
    }
    blocks
}

/// Blocks joined by newlines, sentences within a block by spaces.
pub fn render_context(blocks: &[ContextBlock]) -> String {
    blocks.iter().map(ContextBlock::render).collect::<Vec<_>>().join("\n")
}

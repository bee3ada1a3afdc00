use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Distractor, Path, SamplingError, SpecConfig};
use crate::kg::{KnowledgeGraph, NodeId};

/// Which pool an answer option was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptionSource {
    Correct,
    Distractor,
    PathEntity,
    RelatedEntity,
}

/// Shuffled multiple-choice options for one query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnswerOptions {
    pub options: Vec<String>,
    pub nodes: Vec<NodeId>,
    pub sources: Vec<OptionSource>,
    /// 1-based.
    pub correct_index: usize,
}

impl AnswerOptions {
    pub fn len(&self) -> usize {
        self.options.len()
    }

    pub fn is_empty(&self) -> bool {
        self.options.is_empty()
    }

    /// 1-based index of the distractor option, if one was included.
    pub fn distractor_index(&self) -> Option<usize> {
        self.sources.iter().position(|s| *s == OptionSource::Distractor).map(|i| i + 1)
    }

    /// Numbered option lines, `1. x` through `n. z`.
    pub fn render(&self) -> String {
        self.options.iter().enumerate().map(|(i, o)| format!("{}. {}", i + 1, o)).collect::<Vec<_>>().join("\n")
    }
}

/// Fills options in priority order (tail, distractor, other path entities,
/// then shuffled neighbors of the path) up to `config.min_num_options`, then
/// shuffles them.
///
/// Each option shows one uniformly drawn alias. A candidate whose drawn alias
/// repeats an earlier option's text, or matches any alias of the tail, is
/// skipped so the correct answer stays unambiguous. The distractor is only
/// used when the spec kind calls for one.
pub fn generate_answer_options<R: Rng + ?Sized>(
    graph: &KnowledgeGraph,
    path: &Path,
    distractor: Option<&Distractor>,
    config: &SpecConfig,
    rng: &mut R,
) -> Result<AnswerOptions, SamplingError> {
    let tail = path.tail();
    let distractor = distractor.filter(|_| config.kind.uses_distractor()).map(|d| &d.node);

    let mut related: BTreeSet<&NodeId> = BTreeSet::new();
    for node in &path.nodes {
        related.extend(graph.out_edges(node).iter().map(|e| &e.dst));
        related.extend(graph.in_neighbors(node));
    }
    let mut related: Vec<&NodeId> =
        related.into_iter().filter(|n| !path.contains(n) && Some(*n) != distractor).collect();
    related.shuffle(rng);

    let mut candidates: Vec<(&NodeId, OptionSource)> = vec![(tail, OptionSource::Correct)];
    if let Some(d) = distractor {
        candidates.push((d, OptionSource::Distractor));
    }
    candidates.extend(path.nodes[..path.nodes.len() - 1].iter().map(|n| (n, OptionSource::PathEntity)));
    candidates.extend(related.into_iter().map(|n| (n, OptionSource::RelatedEntity)));

    let tail_aliases: BTreeSet<String> = graph.aliases(tail).iter().map(|a| a.to_lowercase()).collect();
    let mut seen_nodes = BTreeSet::new();
    let mut seen_text = BTreeSet::new();
    let mut picked: Vec<(String, NodeId, OptionSource)> = Vec::new();
    for (node, source) in candidates {
        if picked.len() == config.min_num_options {
            break;
        }
        if !seen_nodes.insert(node) {
            continue;
        }
        let alias = graph.aliases(node).choose(rng).expect("graph nodes carry aliases");
        let key = alias.to_lowercase();
        if source != OptionSource::Correct && tail_aliases.contains(&key) {
            continue;
        }
        if !seen_text.insert(key) {
            continue;
        }
        picked.push((alias.clone(), node.clone(), source));
    }
    if picked.len() < 2 {
        return Err(SamplingError::InsufficientCandidates(picked.len()));
    }

    picked.shuffle(rng);
    let correct_index = picked.iter().position(|p| p.2 == OptionSource::Correct).unwrap() + 1;
    let mut out = AnswerOptions { options: Vec::new(), nodes: Vec::new(), sources: Vec::new(), correct_index };
    for (text, node, source) in picked {
        out.options.push(text);
        out.nodes.push(node);
        out.sources.push(source);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::graph_from_edges;
    use crate::sampling::{enumerate_distractors, SpecKind};
    use crate::seed::derive_rng;

    fn two_hop() -> (KnowledgeGraph, Path) {
        let g =
            graph_from_edges(&[("A", "B", "r"), ("B", "C", "s"), ("A", "D", "r"), ("C", "E", "t"), ("F", "B", "u")]);
        let path = Path {
            nodes: vec!["A".into(), "B".into(), "C".into()],
            edges: vec![g.out_edges(&"A".into())[0].clone(), g.out_edges(&"B".into())[0].clone()],
        };
        (g, path)
    }

    #[test]
    fn distractor_setting_fills_in_priority_order() {
        let (g, path) = two_hop();
        let d = enumerate_distractors(&g, &path);
        assert_eq!(d.len(), 1);
        let cfg = SpecConfig::new("A".into(), SpecKind::ShuffleDistractor);
        let opts = generate_answer_options(&g, &path, d.first(), &cfg, &mut derive_rng(3, &[])).unwrap();
        assert_eq!(opts.len(), 5);
        let count = |s| opts.sources.iter().filter(|&&x| x == s).count();
        assert_eq!(count(OptionSource::Correct), 1);
        assert_eq!(count(OptionSource::Distractor), 1);
        assert_eq!(count(OptionSource::PathEntity), 2);
        assert_eq!(count(OptionSource::RelatedEntity), 1);
        assert_eq!(opts.options[opts.correct_index - 1], "C");
        assert_eq!(opts.options[opts.distractor_index().unwrap() - 1], "D");
    }

    #[test]
    fn vanilla_ignores_distractor_and_is_deterministic() {
        let (g, path) = two_hop();
        let d = enumerate_distractors(&g, &path);
        let cfg = SpecConfig::new("A".into(), SpecKind::Vanilla);
        let a = generate_answer_options(&g, &path, d.first(), &cfg, &mut derive_rng(9, &[])).unwrap();
        let b = generate_answer_options(&g, &path, d.first(), &cfg, &mut derive_rng(9, &[])).unwrap();
        assert_eq!(a, b);
        assert!(a.distractor_index().is_none());
        assert!(!a.sources.contains(&OptionSource::Distractor));
    }

    #[test]
    fn insufficient_candidates() {
        let g = crate::fixtures::graph_with_aliases(&[("A", &["same"]), ("B", &["Same"])], &[("A", "B", "r")]);
        let path = Path { nodes: vec!["A".into(), "B".into()], edges: g.edges().cloned().collect() };
        let cfg = SpecConfig::new("A".into(), SpecKind::Vanilla);
        assert_eq!(
            generate_answer_options(&g, &path, None, &cfg, &mut derive_rng(0, &[])),
            Err(SamplingError::InsufficientCandidates(1))
        );
    }

    #[test]
    fn render_numbering() {
        let o = AnswerOptions {
            options: vec!["x".into(), "y".into(), "z".into()],
            nodes: vec!["X".into(), "Y".into(), "Z".into()],
            sources: vec![OptionSource::PathEntity, OptionSource::Correct, OptionSource::RelatedEntity],
            correct_index: 2,
        };
        assert_eq!(o.render(), "1. x\n2. y\n3. z");
    }
}

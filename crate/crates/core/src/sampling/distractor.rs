use std::collections::BTreeSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::{DistractorMode, Path};
use crate::kg::{KnowledgeGraph, NodeId};

/// An off-path node reachable from path position `attach_index` (1-based)
/// by the same relation the path takes at that position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distractor {
    pub node: NodeId,
    pub attach_index: usize,
}

/// All distractors of `path`, sorted by `(attach_index, node)`.
///
/// Positions run over `1..=len-2`; neighbors of the second-to-last node are
/// never included.
pub fn enumerate_distractors(graph: &KnowledgeGraph, path: &Path) -> Vec<Distractor> {
    let len = path.nodes.len();
    let mut out = BTreeSet::new();
    for j in 1..len.saturating_sub(1) {
        let at = &path.nodes[j - 1];
        let step = &path.edges[j - 1];
        for edge in graph.out_edges(at) {
            if edge.same_relation(step) && !path.contains(&edge.dst) {
                out.insert((j, edge.dst.clone()));
            }
        }
    }
    out.into_iter().map(|(attach_index, node)| Distractor { node, attach_index }).collect()
}

fn weight(mode: DistractorMode, attach_index: usize, path_len: usize) -> f64 {
    match mode {
        DistractorMode::TailWeighted => attach_index as f64,
        DistractorMode::HeadWeighted => (path_len - 1 - attach_index) as f64,
        DistractorMode::Uniform => 1.0,
    }
}

/// Weighted draw over [`enumerate_distractors`]; `None` when there are none.
pub fn sample_distractor<R: Rng + ?Sized>(
    graph: &KnowledgeGraph,
    path: &Path,
    mode: DistractorMode,
    rng: &mut R,
) -> Option<Distractor> {
    let mut candidates = enumerate_distractors(graph, path);
    if candidates.is_empty() {
        return None;
    }
    let len = path.nodes.len();
    let weights: Vec<f64> = candidates.iter().map(|d| weight(mode, d.attach_index, len)).collect();
    let dist = WeightedIndex::new(&weights).expect("distractor weights are positive");
    Some(candidates.swap_remove(dist.sample(rng)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::graph_from_edges;
    use crate::seed::derive_rng;

    fn path_along(g: &KnowledgeGraph, ids: &[&str]) -> Path {
        let nodes: Vec<NodeId> = ids.iter().map(|&s| s.into()).collect();
        let edges =
            nodes.windows(2).map(|w| g.out_edges(&w[0]).iter().find(|e| e.dst == w[1]).unwrap().clone()).collect();
        Path { nodes, edges }
    }

    #[test]
    fn direct_instance() {
        let g = graph_from_edges(&[("v1", "v2", "r"), ("v2", "v3", "s"), ("v1", "d", "r"), ("v2", "x", "s")]);
        let p = path_along(&g, &["v1", "v2", "v3"]);
        assert_eq!(enumerate_distractors(&g, &p), vec![Distractor { node: "d".into(), attach_index: 1 }]);
    }

    #[test]
    fn none_when_empty() {
        let g = graph_from_edges(&[("v1", "v2", "r")]);
        let p = path_along(&g, &["v1", "v2"]);
        assert_eq!(sample_distractor(&g, &p, DistractorMode::TailWeighted, &mut derive_rng(0, &[])), None);
    }

    #[test]
    fn weighting_modes() {
        // Path v1..v5 with candidates attached at positions 1 and 3.
        let g = graph_from_edges(&[
            ("v1", "v2", "a"),
            ("v2", "v3", "b"),
            ("v3", "v4", "c"),
            ("v4", "v5", "e"),
            ("v1", "d1", "a"),
            ("v3", "d3", "c"),
        ]);
        let p = path_along(&g, &["v1", "v2", "v3", "v4", "v5"]);
        let n = 10_000u64;
        let freq = |mode| {
            (0..n)
                .filter(|&s| sample_distractor(&g, &p, mode, &mut derive_rng(s, &[])).unwrap().attach_index == 3)
                .count() as f64
                / n as f64
        };
        // sd of a proportion near 3/4 at n=1e4 is ~0.0043
        assert!((freq(DistractorMode::TailWeighted) - 0.75).abs() < 0.013);
        assert!((freq(DistractorMode::HeadWeighted) - 0.25).abs() < 0.013);
        assert!((freq(DistractorMode::Uniform) - 0.5).abs() < 0.015);
    }
}

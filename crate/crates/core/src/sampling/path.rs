use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{SamplingError, SubgraphView};
use crate::kg::{Edge, KnowledgeGraph, NodeId};

/// Attempts per drawn hop count before that length is given up on.
pub const RETRY_CAP: usize = 128;
/// Node expansions allowed in one randomized DFS before it is abandoned.
pub const DFS_EXPANSION_BUDGET: usize = 20_000;

/// A simple path: distinct nodes joined by the listed edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<Edge>,
}

impl Path {
    pub fn hops(&self) -> usize {
        self.edges.len()
    }

    pub fn head(&self) -> &NodeId {
        &self.nodes[0]
    }

    pub fn tail(&self) -> &NodeId {
        self.nodes.last().expect("paths have at least two nodes")
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains(id)
    }

    /// Checks the path shape against `graph`: at least two nodes, no
    /// repeats, and every listed edge present and joining its neighbors.
    pub fn is_well_formed(&self, graph: &KnowledgeGraph) -> bool {
        if self.nodes.len() < 2 || self.edges.len() + 1 != self.nodes.len() {
            return false;
        }
        let distinct: BTreeSet<&NodeId> = self.nodes.iter().collect();
        if distinct.len() != self.nodes.len() {
            return false;
        }
        self.edges
            .iter()
            .zip(self.nodes.windows(2))
            .all(|(e, pair)| e.src == pair[0] && e.dst == pair[1] && graph.out_edges(&e.src).contains(e))
    }
}

/// True iff following the path's relation sequence from its head, taking
/// every edge with the same alias set at each step, ends at exactly one node.
pub fn is_unique_path(graph: &KnowledgeGraph, path: &Path) -> bool {
    let mut frontier: BTreeSet<&NodeId> = BTreeSet::from([path.head()]);
    for step in &path.edges {
        let mut next = BTreeSet::new();
        for node in &frontier {
            for edge in graph.out_edges(node) {
                if edge.same_relation(step) {
                    next.insert(&edge.dst);
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        frontier = next;
    }
    frontier.len() == 1
}

enum Dfs {
    Found(Path),
    Exhausted,
    OverBudget,
}

/// Randomized depth-first search for a simple path of exactly `hops` edges
/// from the pivot. Neighbors are visited in a uniformly shuffled order; when
/// several edges join the same pair one is picked uniformly.
fn dfs_path<R: Rng + ?Sized>(sub: &SubgraphView<'_>, hops: usize, rng: &mut R) -> Dfs {
    struct Walk<'a, 'g, R: ?Sized> {
        sub: &'a SubgraphView<'g>,
        rng: &'a mut R,
        hops: usize,
        nodes: Vec<NodeId>,
        edges: Vec<Edge>,
        budget: usize,
    }

    impl<R: Rng + ?Sized> Walk<'_, '_, R> {
        fn go(&mut self) -> Option<bool> {
            if self.edges.len() == self.hops {
                return Some(true);
            }
            if self.budget == 0 {
                return None;
            }
            self.budget -= 1;
            let current = self.nodes.last().unwrap().clone();
            let mut neighbors: Vec<&NodeId> = Vec::new();
            for e in self.sub.out_edges(&current) {
                if !self.nodes.contains(&e.dst) && neighbors.last() != Some(&&e.dst) {
                    neighbors.push(&e.dst);
                }
            }
            neighbors.shuffle(self.rng);
            for next in neighbors {
                let parallel: Vec<&Edge> = self.sub.out_edges(&current).filter(|e| &e.dst == next).collect();
                let edge = (*parallel.choose(self.rng).unwrap()).clone();
                self.nodes.push(next.clone());
                self.edges.push(edge);
                match self.go() {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {
                        self.nodes.pop();
                        self.edges.pop();
                    }
                }
            }
            Some(false)
        }
    }

    let mut walk =
        Walk { sub, rng, hops, nodes: vec![sub.pivot().clone()], edges: Vec::new(), budget: DFS_EXPANSION_BUDGET };
    match walk.go() {
        Some(true) => Dfs::Found(Path { nodes: walk.nodes, edges: walk.edges }),
        Some(false) => Dfs::Exhausted,
        None => Dfs::OverBudget,
    }
}

/// Samples a path from the subgraph pivot.
///
/// The hop count is drawn uniformly from the lengths in `1..=max_hops` not
/// yet ruled out, then a randomized DFS proposes a path of that length; paths
/// failing [`is_unique_path`] are rejected. A length is ruled out when the DFS
/// proves no simple path of that length exists or after [`RETRY_CAP`]
/// rejected proposals. When every length is ruled out the result is
/// [`SamplingError::NoPath`].
pub fn sample_path<R: Rng + ?Sized>(
    sub: &SubgraphView<'_>,
    max_hops: usize,
    rng: &mut R,
) -> Result<Path, SamplingError> {
    let no_path = || SamplingError::NoPath(sub.pivot().clone());
    if max_hops == 0 || sub.out_edges(sub.pivot()).next().is_none() {
        return Err(no_path());
    }
    let graph = sub.graph();
    let mut open: Vec<usize> = (1..=max_hops.min(sub.radius())).collect();
    while !open.is_empty() {
        let slot = rng.gen_range(0..open.len());
        let hops = open[slot];
        let mut found = None;
        for _ in 0..RETRY_CAP {
            match dfs_path(sub, hops, rng) {
                Dfs::Found(path) if is_unique_path(graph, &path) => {
                    found = Some(path);
                    break;
                }
                Dfs::Found(_) | Dfs::OverBudget => continue,
                Dfs::Exhausted => break,
            }
        }
        match found {
            Some(path) => return Ok(path),
            None => {
                open.remove(slot);
            }
        }
    }
    Err(no_path())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::graph_from_edges;
    use crate::sampling::extract_subgraph;
    use crate::seed::derive_rng;

    #[test]
    fn chain_lengths_are_uniform() {
        let g = graph_from_edges(&[("A", "B", "r1"), ("B", "C", "r2")]);
        let sub = extract_subgraph(&g, &"A".into(), 2).unwrap();
        let mut counts = [0usize; 3];
        let n = 4000;
        for s in 0..n {
            let p = sample_path(&sub, 2, &mut derive_rng(s, &[])).unwrap();
            assert!(p.is_well_formed(&g));
            counts[p.hops()] += 1;
        }
        // sd = sqrt(4000 * .25) ~ 31.6
        assert!((counts[1] as f64 - 2000.0).abs() < 3.0 * 31.7, "{counts:?}");
    }

    #[test]
    fn pivot_without_out_edges() {
        let g = graph_from_edges(&[("A", "B", "r")]);
        let sub = extract_subgraph(&g, &"B".into(), 3).unwrap();
        assert!(matches!(sample_path(&sub, 3, &mut derive_rng(0, &[])), Err(SamplingError::NoPath(_))));
    }

    #[test]
    fn same_relation_fork_is_never_traversed() {
        // A -r-> B and A -r-> C, both continue with s.
        let g =
            graph_from_edges(&[("A", "B", "r"), ("A", "C", "r"), ("B", "D", "s"), ("C", "E", "s"), ("A", "F", "t")]);
        let sub = extract_subgraph(&g, &"A".into(), 2).unwrap();
        for seed in 0..300 {
            let p = sample_path(&sub, 2, &mut derive_rng(seed, &[])).unwrap();
            assert_eq!(p.nodes, vec![NodeId::from("A"), NodeId::from("F")]);
        }
    }

    #[test]
    fn uniqueness_predicate() {
        let g = graph_from_edges(&[("A", "B", "r"), ("B", "C", "s")]);
        let path = Path { nodes: vec!["A".into(), "B".into(), "C".into()], edges: g.edges().cloned().collect() };
        assert!(is_unique_path(&g, &path));

        let g = graph_from_edges(&[("A", "B", "r"), ("A", "X", "r"), ("B", "C", "s")]);
        let ab = g.out_edges(&"A".into())[0].clone();
        assert!(!is_unique_path(&g, &Path { nodes: vec!["A".into(), "B".into()], edges: vec![ab.clone()] }));
        // The fork dead-ends on the second relation, so the full sequence resolves uniquely.
        let bc = g.out_edges(&"B".into())[0].clone();
        assert!(is_unique_path(&g, &Path { nodes: vec!["A".into(), "B".into(), "C".into()], edges: vec![ab, bc] }));

        // Off-path same-relation edge at the second-to-last node.
        let g = graph_from_edges(&[("A", "B", "r"), ("B", "C", "s"), ("B", "D", "s")]);
        let path = Path {
            nodes: vec!["A".into(), "B".into(), "C".into()],
            edges: vec![g.out_edges(&"A".into())[0].clone(), g.out_edges(&"B".into())[0].clone()],
        };
        assert!(!is_unique_path(&g, &path));
    }
}

use std::collections::{BTreeMap, VecDeque};

use super::SamplingError;
use crate::kg::{Edge, KnowledgeGraph, NodeId};

/// Nodes reachable from a pivot within `radius` hops along out-edges.
#[derive(Clone, Debug)]
pub struct SubgraphView<'g> {
    graph: &'g KnowledgeGraph,
    pivot: NodeId,
    radius: usize,
    depth: BTreeMap<NodeId, usize>,
}

impl<'g> SubgraphView<'g> {
    pub fn graph(&self) -> &'g KnowledgeGraph {
        self.graph
    }

    pub fn pivot(&self) -> &NodeId {
        &self.pivot
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.depth.contains_key(id)
    }

    pub fn members(&self) -> impl Iterator<Item = &NodeId> {
        self.depth.keys()
    }

    pub fn len(&self) -> usize {
        self.depth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depth.is_empty()
    }

    /// BFS depth of a member.
    pub fn depth(&self, id: &NodeId) -> Option<usize> {
        self.depth.get(id).copied()
    }

    /// Out-edges of `id` that stay inside the subgraph.
    pub fn out_edges<'a>(&'a self, id: &NodeId) -> impl Iterator<Item = &'g Edge> + 'a {
        let inside = self.contains(id);
        self.graph.out_edges(id).iter().filter(move |e| inside && self.contains(&e.dst))
    }
}

/// Breadth-first closure over out-edges from `pivot` up to `radius` hops.
pub fn extract_subgraph<'g>(
    graph: &'g KnowledgeGraph,
    pivot: &NodeId,
    radius: usize,
) -> Result<SubgraphView<'g>, SamplingError> {
    if !graph.contains(pivot) {
        return Err(SamplingError::UnknownPivot(pivot.clone()));
    }
    let mut depth = BTreeMap::new();
    depth.insert(pivot.clone(), 0);
    let mut queue = VecDeque::from([pivot.clone()]);
    while let Some(node) = queue.pop_front() {
        let d = depth[&node];
        if d == radius {
            continue;
        }
        for edge in graph.out_edges(&node) {
            if !depth.contains_key(&edge.dst) {
                depth.insert(edge.dst.clone(), d + 1);
                queue.push_back(edge.dst.clone());
            }
        }
    }
    Ok(SubgraphView { graph, pivot: pivot.clone(), radius, depth })
}

/// Size of the radius-bounded subgraph, stopping once `cap` members are seen.
pub(crate) fn subgraph_size_capped(graph: &KnowledgeGraph, pivot: &NodeId, radius: usize, cap: usize) -> usize {
    let mut seen = std::collections::BTreeSet::from([pivot]);
    let mut frontier = vec![pivot];
    for _ in 0..radius {
        let mut next = Vec::new();
        for node in frontier {
            for edge in graph.out_edges(node) {
                if seen.insert(&edge.dst) {
                    if seen.len() >= cap {
                        return seen.len();
                    }
                    next.push(&edge.dst);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::graph_from_edges;

    #[test]
    fn chain_radius_one() {
        let g = graph_from_edges(&[("A", "B", "r"), ("B", "C", "r")]);
        let s = extract_subgraph(&g, &"A".into(), 1).unwrap();
        assert_eq!(s.members().map(|n| n.as_str()).collect::<Vec<_>>(), vec!["A", "B"]);
        assert_eq!(s.out_edges(&"B".into()).count(), 0);
        assert_eq!(s.out_edges(&"A".into()).count(), 1);
    }

    #[test]
    fn radius_zero_is_pivot_only() {
        let g = graph_from_edges(&[("A", "B", "r")]);
        let s = extract_subgraph(&g, &"A".into(), 0).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.contains(&"A".into()));
    }

    #[test]
    fn unknown_pivot() {
        let g = graph_from_edges(&[("A", "B", "r")]);
        assert!(matches!(extract_subgraph(&g, &"Z".into(), 2), Err(SamplingError::UnknownPivot(_))));
    }

    #[test]
    fn capped_size() {
        let g = graph_from_edges(&[("A", "B", "r"), ("A", "C", "r"), ("C", "D", "r")]);
        assert_eq!(subgraph_size_capped(&g, &"A".into(), 2, 100), 4);
        assert_eq!(subgraph_size_capped(&g, &"A".into(), 1, 100), 3);
        assert_eq!(subgraph_size_capped(&g, &"A".into(), 2, 2), 2);
    }
}

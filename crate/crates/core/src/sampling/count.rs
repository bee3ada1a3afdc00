use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::Zero;

use super::{Path, SubgraphView};
use crate::kg::{Edge, KnowledgeGraph, NodeId};

fn step_frontier<'g>(graph: &'g KnowledgeGraph, frontier: &BTreeSet<&'g NodeId>, step: &Edge) -> BTreeSet<&'g NodeId> {
    let mut next = BTreeSet::new();
    for node in frontier {
        for e in graph.out_edges(node) {
            if e.same_relation(step) {
                next.insert(&e.dst);
            }
        }
    }
    next
}

/// Every path from the pivot with `1..=max_hops` edges inside the subgraph
/// that passes the uniqueness predicate, one per distinct relation
/// alias-set sequence, in depth-first order.
pub fn unique_paths(sub: &SubgraphView<'_>, max_hops: usize) -> Vec<Path> {
    let graph = sub.graph();
    let mut out = Vec::new();
    let mut seen_sequences: BTreeSet<Vec<&[String]>> = BTreeSet::new();
    let mut nodes = vec![sub.pivot().clone()];
    let mut edges: Vec<&Edge> = Vec::new();
    let start: BTreeSet<&NodeId> = graph.node(sub.pivot()).map(|n| &n.id).into_iter().collect();
    walk(sub, graph, max_hops, &mut nodes, &mut edges, start, &mut seen_sequences, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn walk<'g>(
    sub: &SubgraphView<'g>,
    graph: &'g KnowledgeGraph,
    max_hops: usize,
    nodes: &mut Vec<NodeId>,
    edges: &mut Vec<&'g Edge>,
    frontier: BTreeSet<&'g NodeId>,
    seen: &mut BTreeSet<Vec<&'g [String]>>,
    out: &mut Vec<Path>,
) {
    if edges.len() == max_hops {
        return;
    }
    let current = nodes.last().unwrap().clone();
    for edge in sub.out_edges(&current) {
        if nodes.contains(&edge.dst) {
            continue;
        }
        let next = step_frontier(graph, &frontier, edge);
        nodes.push(edge.dst.clone());
        edges.push(edge);
        if next.len() == 1 {
            let key: Vec<&[String]> = edges.iter().map(|e| e.rel_aliases.as_slice()).collect();
            if seen.insert(key) {
                out.push(Path { nodes: nodes.clone(), edges: edges.iter().map(|e| (*e).clone()).collect() });
            }
        }
        walk(sub, graph, max_hops, nodes, edges, next, seen, out);
        nodes.pop();
        edges.pop();
    }
}

/// Number of distinct queries the spec can produce from this subgraph:
/// for every unique path, head alias count times the product of relation
/// alias counts.
pub fn count_unique_queries(sub: &SubgraphView<'_>, max_hops: usize) -> BigUint {
    let graph = sub.graph();
    let mut total = BigUint::zero();
    for path in unique_paths(sub, max_hops) {
        let mut term = BigUint::from(graph.aliases(path.head()).len());
        for e in &path.edges {
            term *= e.rel_aliases.len();
        }
        total += term;
    }
    total
}

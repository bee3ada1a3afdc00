//! Brute-force reference implementations shared by the oracle and
//! acceptance tests. They work from the raw edge list and avoid the
//! library's traversal helpers on purpose.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use kgcert::fixtures::{alias_tree, graph_from_edges, graph_with_aliases, random_graph, toy_graph};
use kgcert::kg::{Edge, KnowledgeGraph, NodeId};
use kgcert::sampling::Path;
use kgcert::seed::derive_rng;

pub fn alias_set(e: &Edge) -> HashSet<&str> {
    e.rel_aliases.iter().map(String::as_str).collect()
}

/// Every simple path with `1..=max_hops` edges starting at `from`, found by
/// scanning the full edge list at each step.
pub fn simple_paths(graph: &KnowledgeGraph, from: &NodeId, max_hops: usize) -> Vec<Path> {
    let edges: Vec<&Edge> = graph.edges().collect();
    let mut out = Vec::new();
    let mut stack = vec![Path { nodes: vec![from.clone()], edges: vec![] }];
    while let Some(p) = stack.pop() {
        if p.edges.len() == max_hops {
            continue;
        }
        let last = p.nodes.last().unwrap();
        for e in &edges {
            if &e.src == last && !p.nodes.contains(&e.dst) {
                let mut q = p.clone();
                q.nodes.push(e.dst.clone());
                q.edges.push((*e).clone());
                out.push(q.clone());
                stack.push(q);
            }
        }
    }
    out
}

/// Distractor definition applied literally: node `d` off the path with an
/// edge from the `j`-th path node (1-based, `j <= len - 2`) whose alias set
/// equals that of the path's `j`-th edge.
pub fn brute_distractors(graph: &KnowledgeGraph, path: &Path) -> BTreeSet<(usize, NodeId)> {
    let len = path.nodes.len();
    let mut out = BTreeSet::new();
    for d in graph.node_ids() {
        if path.nodes.contains(d) {
            continue;
        }
        for e in graph.edges() {
            if &e.dst != d {
                continue;
            }
            for j in 1..=len.saturating_sub(2) {
                if e.src == path.nodes[j - 1] && alias_set(e) == alias_set(&path.edges[j - 1]) {
                    out.insert((j, d.clone()));
                }
            }
        }
    }
    out
}

/// End nodes of all walks (repeats allowed) from the path head that follow
/// the path's alias-set sequence.
pub fn walk_ends(graph: &KnowledgeGraph, path: &Path) -> BTreeSet<NodeId> {
    fn go(graph: &KnowledgeGraph, at: &NodeId, steps: &[Edge], out: &mut BTreeSet<NodeId>) {
        let Some((step, rest)) = steps.split_first() else {
            out.insert(at.clone());
            return;
        };
        for e in graph.edges() {
            if &e.src == at && alias_set(e) == alias_set(step) {
                go(graph, &e.dst, rest, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(graph, &path.nodes[0], &path.edges, &mut out);
    out
}

pub fn brute_unique(graph: &KnowledgeGraph, path: &Path) -> bool {
    walk_ends(graph, path).len() == 1
}

/// Hop distance from `pivot` by repeated relaxation over the edge list.
pub fn brute_reach(graph: &KnowledgeGraph, pivot: &NodeId, radius: usize) -> BTreeMap<NodeId, usize> {
    let mut dist = BTreeMap::from([(pivot.clone(), 0usize)]);
    for _ in 0..radius {
        let mut changed = false;
        for e in graph.edges() {
            if let Some(&d) = dist.get(&e.src) {
                if d < radius && dist.get(&e.dst).is_none_or(|&x| x > d + 1) {
                    dist.insert(e.dst.clone(), d + 1);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Number of distinct `(head alias, relation alias sequence)` queries over
/// unique paths inside the pivot's subgraph, by listing them all.
pub fn brute_query_count(graph: &KnowledgeGraph, pivot: &NodeId, max_hops: usize) -> usize {
    let members = brute_reach(graph, pivot, max_hops);
    let mut queries: HashSet<(String, Vec<String>)> = HashSet::new();
    for path in simple_paths(graph, pivot, max_hops) {
        if !path.nodes.iter().all(|n| members.contains_key(n)) || !brute_unique(graph, &path) {
            continue;
        }
        let mut seqs: Vec<Vec<String>> = vec![vec![]];
        for e in &path.edges {
            seqs = seqs
                .into_iter()
                .flat_map(|s| {
                    e.rel_aliases.iter().map(move |a| {
                        let mut t = s.clone();
                        t.push(a.clone());
                        t
                    })
                })
                .collect();
        }
        for head in graph.aliases(pivot) {
            for s in &seqs {
                queries.insert((head.clone(), s.clone()));
            }
        }
    }
    queries.len()
}

/// The synthetic graphs (at most 15 nodes each) the oracles run over.
pub fn fixture_graphs() -> Vec<(String, KnowledgeGraph)> {
    let mut out = vec![
        ("toy".to_owned(), toy_graph().0),
        (
            "fork".to_owned(),
            graph_from_edges(&[
                ("A", "B", "r"),
                ("A", "C", "r"),
                ("B", "D", "s"),
                ("C", "E", "s"),
                ("A", "F", "t"),
                ("F", "G", "r"),
                ("F", "H", "r"),
                ("G", "I", "u"),
            ]),
        ),
        (
            "diamond".to_owned(),
            graph_from_edges(&[
                ("A", "B", "r"),
                ("B", "C", "s"),
                ("C", "D", "t"),
                ("A", "X", "r"),
                ("B", "Y", "s"),
                ("X", "C", "s"),
                ("C", "A", "u"),
                ("D", "B", "v"),
            ]),
        ),
        (
            "aliases".to_owned(),
            graph_with_aliases(
                &[("A", &["a", "alpha"]), ("B", &["b"]), ("C", &["c", "gamma", "cee"])],
                &[("A", "B", "r"), ("B", "C", "s"), ("A", "D", "r"), ("D", "E", "s"), ("C", "E", "t")],
            ),
        ),
        ("tree".to_owned(), alias_tree(2, 2, 2)),
    ];
    for seed in 0..40u64 {
        let mut rng = derive_rng(seed, &[0x6f72_6163]);
        let n = 4 + (seed as usize % 12);
        let prob = [0.15, 0.25, 0.35][seed as usize % 3];
        let relations = 1 + seed as usize % 3;
        out.push((format!("random-{seed}"), random_graph(&mut rng, n, prob, relations, 3)));
    }
    for (_, g) in &out {
        assert!(g.node_count() <= 15);
    }
    out
}

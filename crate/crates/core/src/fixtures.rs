//! Small graphs for tests, oracles and demos: a bundled 12-node toy
//! dataset plus synthetic builders.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::kg::raw::{default_banned, parse_aliases, parse_corpus, parse_triples};
use crate::kg::{
    preprocess, BuildStats, Edge, GraphBuilder, KnowledgeGraph, Node, NodeId, ParseMode, RawDataset, RelationId,
};

pub const TOY_TRIPLES: &str = include_str!("../fixtures/toy/triples.tsv");
pub const TOY_ENTITY_ALIASES: &str = include_str!("../fixtures/toy/entity_aliases.tsv");
pub const TOY_RELATION_ALIASES: &str = include_str!("../fixtures/toy/relation_aliases.tsv");
pub const TOY_CORPUS: &str = include_str!("../fixtures/toy/corpus.tsv");

/// The bundled toy dataset, parsed strictly.
pub fn toy_raw() -> RawDataset {
    let strict = ParseMode::Strict;
    let (triples, _) = parse_triples(TOY_TRIPLES.as_bytes(), strict, "triples.tsv").expect("toy triples parse");
    let (entities, _) =
        parse_aliases(TOY_ENTITY_ALIASES.as_bytes(), strict, "entity_aliases.tsv").expect("toy aliases parse");
    let (relations, _) =
        parse_aliases(TOY_RELATION_ALIASES.as_bytes(), strict, "relation_aliases.tsv").expect("toy aliases parse");
    let (corpus, _) = parse_corpus(TOY_CORPUS.as_bytes(), strict, "corpus.tsv").expect("toy corpus parses");
    RawDataset {
        triples,
        entity_aliases: entities.into_iter().map(|(k, v)| (NodeId::new(k), v)).collect(),
        relation_aliases: relations.into_iter().map(|(k, v)| (RelationId::new(k), v)).collect(),
        corpus,
    }
}

/// The toy dataset after default preprocessing.
pub fn toy_graph() -> (KnowledgeGraph, BuildStats) {
    preprocess(toy_raw(), &default_banned()).expect("toy graph builds")
}

/// Builds a graph from explicit alias lists. Nodes not listed get their id
/// as sole alias. Each node's text is a lead sentence followed by one
/// sentence per out-edge, which serves as that edge's evidence.
pub fn synthetic_graph(nodes: &[(&str, &[&str])], edges: &[(&str, &str, &[&str])]) -> KnowledgeGraph {
    let mut aliases: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (id, list) in nodes {
        aliases.insert(id, list.iter().map(|s| s.to_string()).collect());
    }
    let mut sentences: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut built_edges = Vec::new();
    for &(src, dst, rel) in edges {
        for id in [src, dst] {
            aliases.entry(id).or_insert_with(|| vec![id.to_owned()]);
            sentences.entry(id).or_insert_with(|| vec![format!("{id} is an entity.")]);
        }
        let rel_name = rel.first().copied().unwrap_or("related to");
        let text = sentences.get_mut(src).unwrap();
        text.push(format!("{src} {rel_name} {dst}."));
        built_edges.push(Edge {
            src: src.into(),
            dst: dst.into(),
            relation: RelationId::new(rel.join("|")),
            rel_aliases: rel.iter().map(|s| s.to_string()).collect(),
            evidence_src: vec![text.len() - 1],
            evidence_dst: vec![],
        });
    }
    let mut b = GraphBuilder::new();
    for (id, text) in sentences {
        b.add_node(Node { id: id.into(), aliases: aliases[id].clone(), context_sentences: text });
    }
    for e in built_edges {
        b.add_edge(e);
    }
    b.build().expect("synthetic graph is valid")
}

/// Single-alias graph from `(src, dst, relation)` triples.
pub fn graph_from_edges(edges: &[(&str, &str, &str)]) -> KnowledgeGraph {
    let rels: Vec<[&str; 1]> = edges.iter().map(|e| [e.2]).collect();
    let edges: Vec<(&str, &str, &[&str])> = edges.iter().zip(&rels).map(|(e, r)| (e.0, e.1, &r[..])).collect();
    synthetic_graph(&[], &edges)
}

/// Like [`graph_from_edges`] with explicit node aliases.
pub fn graph_with_aliases(nodes: &[(&str, &[&str])], edges: &[(&str, &str, &str)]) -> KnowledgeGraph {
    let rels: Vec<[&str; 1]> = edges.iter().map(|e| [e.2]).collect();
    let edges: Vec<(&str, &str, &[&str])> = edges.iter().zip(&rels).map(|(e, r)| (e.0, e.1, &r[..])).collect();
    synthetic_graph(nodes, &edges)
}

/// Random graph on nodes `N0..N{n-1}`. Each ordered pair gets an edge with
/// probability `edge_prob`, labeled with one of `relations` relation types
/// (few types make same-relation forks common). Node and relation alias
/// counts are drawn from `1..=max_aliases`.
pub fn random_graph<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    edge_prob: f64,
    relations: usize,
    max_aliases: usize,
) -> KnowledgeGraph {
    assert!(n >= 2 && relations >= 1 && max_aliases >= 1);
    let names: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
    let rel_aliases: Vec<Vec<String>> = (0..relations)
        .map(|r| {
            let k = rng.gen_range(1..=max_aliases);
            (0..k).map(|a| if a == 0 { format!("r{r}") } else { format!("r{r} alt{a}") }).collect()
        })
        .collect();
    let node_aliases: Vec<Vec<String>> = names
        .iter()
        .map(|name| {
            let k = rng.gen_range(1..=max_aliases);
            (0..k).map(|a| if a == 0 { name.clone() } else { format!("{name} alt{a}") }).collect()
        })
        .collect();
    let mut triples: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.gen_bool(edge_prob) {
                triples.push((i, j, rng.gen_range(0..relations)));
            }
        }
    }
    if triples.is_empty() {
        triples.push((0, 1, 0));
    }
    let node_refs: Vec<Vec<&str>> = node_aliases.iter().map(|v| v.iter().map(String::as_str).collect()).collect();
    let rel_refs: Vec<Vec<&str>> = rel_aliases.iter().map(|v| v.iter().map(String::as_str).collect()).collect();
    let nodes: Vec<(&str, &[&str])> = names.iter().zip(&node_refs).map(|(n, a)| (n.as_str(), &a[..])).collect();
    let edges: Vec<(&str, &str, &[&str])> =
        triples.iter().map(|&(i, j, r)| (names[i].as_str(), names[j].as_str(), &rel_refs[r][..])).collect();
    synthetic_graph(&nodes, &edges)
}

/// Complete `branching`-ary out-tree of the given depth rooted at `T`. The
/// edge to child `c` at depth `d` carries relation `R{d}.{c}`, so siblings
/// never share a relation and every root path is unique. Every node and
/// relation has `aliases` aliases.
pub fn alias_tree(branching: usize, depth: usize, aliases: usize) -> KnowledgeGraph {
    let alias_list = |id: &str| (0..aliases).map(|a| format!("{id} a{a}")).collect::<Vec<_>>();
    let mut ids = vec!["T".to_owned()];
    let mut frontier = vec!["T".to_owned()];
    let mut triples = Vec::new();
    for d in 1..=depth {
        let mut next = Vec::new();
        for parent in &frontier {
            for c in 0..branching {
                let child = format!("{parent}.{c}");
                triples.push((parent.clone(), child.clone(), format!("R{d}.{c}")));
                ids.push(child.clone());
                next.push(child);
            }
        }
        frontier = next;
    }
    let node_aliases: Vec<Vec<String>> = ids.iter().map(|id| alias_list(id)).collect();
    let node_refs: Vec<Vec<&str>> = node_aliases.iter().map(|v| v.iter().map(String::as_str).collect()).collect();
    let rels: Vec<Vec<String>> = triples.iter().map(|t| alias_list(&t.2)).collect();
    let rel_refs: Vec<Vec<&str>> = rels.iter().map(|v| v.iter().map(String::as_str).collect()).collect();
    let nodes: Vec<(&str, &[&str])> = ids.iter().zip(&node_refs).map(|(n, a)| (n.as_str(), &a[..])).collect();
    let edges: Vec<(&str, &str, &[&str])> =
        triples.iter().zip(&rel_refs).map(|((p, c, _), r)| (p.as_str(), c.as_str(), &r[..])).collect();
    synthetic_graph(&nodes, &edges)
}

/// Pick of `count` distinct node ids, handy for fuzzing pivots.
pub fn some_nodes<R: Rng + ?Sized>(graph: &KnowledgeGraph, count: usize, rng: &mut R) -> Vec<NodeId> {
    let ids: Vec<&NodeId> = graph.node_ids().collect();
    ids.choose_multiple(rng, count).map(|&id| id.clone()).collect()
}

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::raw::{filter_relations, RawDataset};
use super::text::{contains_on_word_boundary, normalize_ascii, split_sentences};
use super::{Edge, GraphBuilder, KgError, KnowledgeGraph, Node, NodeId};

/// Counts produced while turning raw triples into a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub triples_in: usize,
    pub dropped_banned_relation: usize,
    pub dropped_duplicate: usize,
    pub dropped_self_loop: usize,
    pub dropped_missing_entity: usize,
    pub dropped_no_evidence: usize,
    pub nodes: usize,
    pub edges: usize,
}

/// Nodes and evidenced edges before orphan removal.
#[derive(Clone, Debug, Default)]
pub struct EvidencedEdges {
    pub nodes: BTreeMap<NodeId, Node>,
    pub edges: Vec<Edge>,
    pub stats: BuildStats,
}

fn clean(s: &str) -> String {
    normalize_ascii(s).split_whitespace().collect::<Vec<_>>().join(" ")
}

fn prepare_node(raw: &RawDataset, id: &NodeId) -> Option<Node> {
    let mut aliases: Vec<String> = Vec::new();
    for alias in raw.entity_aliases.get(id)? {
        let alias = clean(alias);
        if !alias.is_empty() && !aliases.contains(&alias) {
            aliases.push(alias);
        }
    }
    let sentences = split_sentences(&normalize_ascii(raw.corpus.get(id)?));
    if aliases.is_empty() || sentences.is_empty() {
        return None;
    }
    Some(Node { id: id.clone(), aliases, context_sentences: sentences })
}

struct Lowered {
    aliases: Vec<String>,
    sentences: Vec<String>,
}

fn mentions(sentences: &[String], aliases: &[String]) -> Vec<usize> {
    sentences
        .iter()
        .enumerate()
        .filter(|(_, s)| aliases.iter().any(|a| contains_on_word_boundary(s, a)))
        .map(|(i, _)| i)
        .collect()
}

/// Normalizes the text of every referenced entity, then keeps each triple
/// whose endpoints mention each other: evidence for `(u, v)` is the
/// sentences of `u` containing an alias of `v` and vice versa. Triples with
/// no evidence on either side are dropped. The lead sentence of each node is
/// sentence 0 of its context.
pub fn attach_edge_evidence(raw: &RawDataset) -> EvidencedEdges {
    let mut stats = BuildStats { triples_in: raw.triples.len(), ..Default::default() };

    let referenced: BTreeSet<&NodeId> = raw.triples.iter().flat_map(|t| [&t.head, &t.tail]).collect();
    let mut prepared: BTreeMap<NodeId, (Node, Lowered)> = BTreeMap::new();
    for id in referenced {
        if let Some(node) = prepare_node(raw, id) {
            let lowered = Lowered {
                aliases: node.aliases.iter().map(|a| a.to_ascii_lowercase()).collect(),
                sentences: node.context_sentences.iter().map(|s| s.to_ascii_lowercase()).collect(),
            };
            prepared.insert(id.clone(), (node, lowered));
        }
    }

    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for t in &raw.triples {
        if !seen.insert((&t.head, &t.relation, &t.tail)) {
            stats.dropped_duplicate += 1;
            continue;
        }
        if t.head == t.tail {
            stats.dropped_self_loop += 1;
            continue;
        }
        let (Some((_, src)), Some((_, dst))) = (prepared.get(&t.head), prepared.get(&t.tail)) else {
            stats.dropped_missing_entity += 1;
            continue;
        };
        let evidence_src = mentions(&src.sentences, &dst.aliases);
        let evidence_dst = mentions(&dst.sentences, &src.aliases);
        if evidence_src.is_empty() && evidence_dst.is_empty() {
            stats.dropped_no_evidence += 1;
            continue;
        }
        let mut rel_aliases: Vec<String> = raw
            .relation_aliases
            .get(&t.relation)
            .map(|v| v.iter().map(|a| clean(a)).filter(|a| !a.is_empty()).collect())
            .unwrap_or_default();
        if rel_aliases.is_empty() {
            rel_aliases.push(t.relation.as_str().to_owned());
        }
        rel_aliases.sort();
        rel_aliases.dedup();
        edges.push(Edge {
            src: t.head.clone(),
            dst: t.tail.clone(),
            relation: t.relation.clone(),
            rel_aliases,
            evidence_src,
            evidence_dst,
        });
    }

    let nodes = prepared.into_iter().map(|(k, (node, _))| (k, node)).collect();
    EvidencedEdges { nodes, edges, stats }
}

/// Builds the immutable graph from an already filtered dataset. Nodes left
/// without edges are removed.
pub fn build_graph(raw: &RawDataset) -> Result<(KnowledgeGraph, BuildStats), KgError> {
    let EvidencedEdges { nodes, edges, mut stats } = attach_edge_evidence(raw);
    let mut builder = GraphBuilder::new();
    for node in nodes.into_values() {
        builder.add_node(node);
    }
    for edge in edges {
        builder.add_edge(edge);
    }
    let graph = builder.build()?;
    stats.nodes = graph.node_count();
    stats.edges = graph.edge_count();
    Ok((graph, stats))
}

/// Relation filtering followed by [`build_graph`].
pub fn preprocess(raw: RawDataset, banned: &BTreeSet<String>) -> Result<(KnowledgeGraph, BuildStats), KgError> {
    let before = raw.triples.len();
    let filtered = filter_relations(raw, banned);
    let removed = before - filtered.triples.len();
    let (graph, mut stats) = build_graph(&filtered)?;
    stats.triples_in = before;
    stats.dropped_banned_relation = removed;
    Ok((graph, stats))
}

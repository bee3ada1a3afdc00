use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::KgError;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

string_id!(
    /// Entity identifier such as `Q42`.
    NodeId
);
string_id!(
    /// Relation identifier such as `P50`.
    RelationId
);

/// An entity with its aliases and its text split into sentences.
///
/// Sentence 0 is the node's lead sentence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub aliases: Vec<String>,
    pub context_sentences: Vec<String>,
}

impl Node {
    pub fn lead_sentence(&self) -> Option<&str> {
        self.context_sentences.first().map(String::as_str)
    }
}

/// A directed relation between two entities together with the sentences
/// that support it on either side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub relation: RelationId,
    /// Sorted and deduplicated, so two edges express the same relation iff
    /// these vectors are equal.
    pub rel_aliases: Vec<String>,
    pub evidence_src: Vec<usize>,
    pub evidence_dst: Vec<usize>,
}

impl Edge {
    /// True when both edges carry the same relation alias set.
    pub fn same_relation(&self, other: &Edge) -> bool {
        self.rel_aliases == other.rel_aliases
    }
}

/// Immutable knowledge graph. Build it with [`GraphBuilder`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeGraph {
    nodes: BTreeMap<NodeId, Node>,
    out_edges: BTreeMap<NodeId, Vec<Edge>>,
    in_neighbors: BTreeMap<NodeId, Vec<NodeId>>,
    relation_aliases: BTreeMap<RelationId, Vec<String>>,
    edge_count: usize,
}

impl KnowledgeGraph {
    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Out-edges of `id`, ordered by `(dst, relation)`.
    pub fn out_edges(&self, id: &NodeId) -> &[Edge] {
        self.out_edges.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Distinct sources of edges pointing at `id`, sorted.
    pub fn in_neighbors(&self, id: &NodeId) -> &[NodeId] {
        self.in_neighbors.get(id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn out_degree(&self, id: &NodeId) -> usize {
        self.out_edges(id).len()
    }

    /// All edges, grouped by source in id order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.out_edges.values().flatten()
    }

    pub fn relation_aliases(&self) -> &BTreeMap<RelationId, Vec<String>> {
        &self.relation_aliases
    }

    /// Aliases of a node; empty if the node is unknown.
    pub fn aliases(&self, id: &NodeId) -> &[String] {
        self.nodes.get(id).map(|n| n.aliases.as_slice()).unwrap_or(&[])
    }
}

/// Collects nodes and edges and validates the graph invariants on
/// [`build`](GraphBuilder::build).
#[derive(Debug, Default)]
pub struct GraphBuilder {
    nodes: BTreeMap<NodeId, Node>,
    edges: Vec<Edge>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, node: Node) -> &mut Self {
        self.nodes.insert(node.id.clone(), node);
        self
    }

    pub fn add_edge(&mut self, mut edge: Edge) -> &mut Self {
        edge.rel_aliases.sort();
        edge.rel_aliases.dedup();
        edge.evidence_src.sort_unstable();
        edge.evidence_src.dedup();
        edge.evidence_dst.sort_unstable();
        edge.evidence_dst.dedup();
        self.edges.push(edge);
        self
    }

    /// Validates and freezes the graph. Nodes without any incident edge are
    /// discarded; duplicate `(src, dst, relation)` edges are rejected.
    pub fn build(self) -> Result<KnowledgeGraph, KgError> {
        let GraphBuilder { mut nodes, edges } = self;
        if edges.is_empty() {
            return Err(KgError::EmptyGraph);
        }
        for node in nodes.values() {
            if node.id.as_str().is_empty() {
                return Err(KgError::Invalid("empty node id".into()));
            }
            if node.aliases.is_empty() {
                return Err(KgError::Invalid(format!("node {} has no aliases", node.id)));
            }
        }

        let mut out_edges: BTreeMap<NodeId, Vec<Edge>> = BTreeMap::new();
        let mut in_sets: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        let mut relation_aliases = BTreeMap::new();
        let mut seen = BTreeSet::new();
        let mut used = BTreeSet::new();
        let edge_count = edges.len();

        for edge in edges {
            if edge.src == edge.dst {
                return Err(KgError::Invalid(format!("self loop on {}", edge.src)));
            }
            let src =
                nodes.get(&edge.src).ok_or_else(|| KgError::Invalid(format!("edge source {} missing", edge.src)))?;
            let dst =
                nodes.get(&edge.dst).ok_or_else(|| KgError::Invalid(format!("edge target {} missing", edge.dst)))?;
            if edge.rel_aliases.is_empty() {
                return Err(KgError::Invalid(format!("relation {} has no aliases", edge.relation)));
            }
            if edge.evidence_src.is_empty() && edge.evidence_dst.is_empty() {
                return Err(KgError::Invalid(format!("edge {} -> {} has no evidence", edge.src, edge.dst)));
            }
            let in_range = |idx: &[usize], n: &Node| idx.iter().all(|&i| i < n.context_sentences.len());
            if !in_range(&edge.evidence_src, src) || !in_range(&edge.evidence_dst, dst) {
                return Err(KgError::Invalid(format!(
                    "edge {} -> {} has evidence outside the node text",
                    edge.src, edge.dst
                )));
            }
            if !seen.insert((edge.src.clone(), edge.dst.clone(), edge.relation.clone())) {
                return Err(KgError::Invalid(format!("duplicate edge {} -{}-> {}", edge.src, edge.relation, edge.dst)));
            }
            relation_aliases.entry(edge.relation.clone()).or_insert_with(|| edge.rel_aliases.clone());
            used.insert(edge.src.clone());
            used.insert(edge.dst.clone());
            in_sets.entry(edge.dst.clone()).or_default().insert(edge.src.clone());
            out_edges.entry(edge.src.clone()).or_default().push(edge);
        }

        nodes.retain(|id, _| used.contains(id));
        for list in out_edges.values_mut() {
            list.sort_by(|a, b| (&a.dst, &a.relation).cmp(&(&b.dst, &b.relation)));
        }
        let in_neighbors = in_sets.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect();

        Ok(KnowledgeGraph { nodes, out_edges, in_neighbors, relation_aliases, edge_count })
    }
}

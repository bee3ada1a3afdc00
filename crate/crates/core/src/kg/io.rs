//! Line-delimited graph artifact.
//!
//! ```text
//! {"format":"kgcert-graph","version":1,"nodes":N,"edges":M}
//! {"type":"node","id":"Q1","aliases":[...],"sentences":[...]}
//! ...
//! {"type":"edge","src":"Q1","dst":"Q2","relation":"P1","rel_aliases":[...],"evidence_src":[...],"evidence_dst":[...]}
//! ```
//!
//! Nodes come first in id order, then edges ordered by `(src, dst, relation)`.
//! The output is a pure function of the graph, so identical graphs produce
//! identical bytes.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Edge, GraphBuilder, KgError, KnowledgeGraph, Node, NodeId, RelationId};

pub const GRAPH_FORMAT: &str = "kgcert-graph";
pub const GRAPH_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    nodes: usize,
    edges: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Record {
    Node {
        id: NodeId,
        aliases: Vec<String>,
        sentences: Vec<String>,
    },
    Edge {
        src: NodeId,
        dst: NodeId,
        relation: RelationId,
        rel_aliases: Vec<String>,
        evidence_src: Vec<usize>,
        evidence_dst: Vec<usize>,
    },
}

fn io_err(e: std::io::Error) -> KgError {
    KgError::Io { path: "<graph stream>".into(), source: e }
}

pub fn write_graph<W: Write>(graph: &KnowledgeGraph, mut out: W) -> Result<(), KgError> {
    let header = Header {
        format: GRAPH_FORMAT.into(),
        version: GRAPH_VERSION,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
    };
    let mut line = |value: &dyn erased::Json| -> Result<(), KgError> {
        out.write_all(value.to_json().as_bytes()).map_err(io_err)?;
        out.write_all(b"\n").map_err(io_err)
    };
    line(&header)?;
    for node in graph.nodes() {
        line(&Record::Node {
            id: node.id.clone(),
            aliases: node.aliases.clone(),
            sentences: node.context_sentences.clone(),
        })?;
    }
    for e in graph.edges() {
        line(&Record::Edge {
            src: e.src.clone(),
            dst: e.dst.clone(),
            relation: e.relation.clone(),
            rel_aliases: e.rel_aliases.clone(),
            evidence_src: e.evidence_src.clone(),
            evidence_dst: e.evidence_dst.clone(),
        })?;
    }
    out.flush().map_err(io_err)
}

mod erased {
    pub trait Json {
        fn to_json(&self) -> String;
    }
    impl<T: serde::Serialize> Json for T {
        fn to_json(&self) -> String {
            serde_json::to_string(self).expect("graph records always serialize")
        }
    }
}

pub fn read_graph<R: BufRead>(input: R) -> Result<KnowledgeGraph, KgError> {
    let mut lines = input.lines().enumerate();
    let format_err = |line: usize, message: String| KgError::Format { file: "graph".into(), line, message };

    let (_, first) = lines.next().ok_or_else(|| format_err(1, "missing header".into()))?;
    let header: Header = serde_json::from_str(&first.map_err(io_err)?).map_err(|e| format_err(1, e.to_string()))?;
    if header.format != GRAPH_FORMAT || header.version != GRAPH_VERSION {
        return Err(format_err(1, format!("unsupported graph format {} v{}", header.format, header.version)));
    }

    let mut builder = GraphBuilder::new();
    let (mut nodes, mut edges) = (0, 0);
    for (i, line) in lines {
        let line = line.map_err(io_err)?;
        if line.is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| format_err(i + 1, e.to_string()))?;
        match record {
            Record::Node { id, aliases, sentences } => {
                nodes += 1;
                builder.add_node(Node { id, aliases, context_sentences: sentences });
            }
            Record::Edge { src, dst, relation, rel_aliases, evidence_src, evidence_dst } => {
                edges += 1;
                builder.add_edge(Edge { src, dst, relation, rel_aliases, evidence_src, evidence_dst });
            }
        }
    }
    if nodes != header.nodes || edges != header.edges {
        return Err(format_err(
            1,
            format!("header declares {}/{} nodes/edges, found {nodes}/{edges}", header.nodes, header.edges),
        ));
    }
    builder.build()
}

pub fn graph_to_string(graph: &KnowledgeGraph) -> String {
    let mut buf = Vec::new();
    write_graph(graph, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("graph records are UTF-8")
}

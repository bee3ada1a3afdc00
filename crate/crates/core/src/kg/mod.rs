//! Knowledge graph ingestion: raw Wikidata5m-style files in, an immutable
//! evidence-annotated graph out.

mod build;
mod graph;
pub mod io;
pub mod raw;
pub mod text;

use std::path::PathBuf;

use thiserror::Error;

pub use build::{attach_edge_evidence, build_graph, preprocess, BuildStats, EvidencedEdges};
pub use graph::{Edge, GraphBuilder, KnowledgeGraph, Node, NodeId, RelationId};
pub use raw::{filter_relations, parse_raw_dataset, ParseMode, ParseReport, RawDataset, RawPaths, Triple};
pub use text::{normalize_ascii, split_sentences};

#[derive(Debug, Error)]
pub enum KgError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Format { file: String, line: usize, message: String },
    #[error("no edges survived preprocessing")]
    EmptyGraph,
    #[error("invalid graph: {0}")]
    Invalid(String),
}

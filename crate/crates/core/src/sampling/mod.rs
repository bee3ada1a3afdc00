//! Random choices that turn a graph and a spec into one query instance:
//! pivots, subgraphs, paths, queries, distractors and answer options.

mod config;
mod count;
mod distractor;
mod options;
mod path;
mod pivots;
mod query;
mod subgraph;

use thiserror::Error;

use crate::kg::NodeId;

pub use config::{
    DistractorMode, SpecConfig, SpecKind, DEFAULT_CONFIDENCE, DEFAULT_FEW_SHOT, DEFAULT_MAX_HOPS, DEFAULT_MIN_OPTIONS,
    DEFAULT_N_SAMPLES, DEFAULT_TOKEN_BUDGET, MAX_FEW_SHOT,
};
pub use count::{count_unique_queries, unique_paths};
pub use distractor::{enumerate_distractors, sample_distractor, Distractor};
pub use options::{generate_answer_options, AnswerOptions, OptionSource};
pub use path::{is_unique_path, sample_path, Path, DFS_EXPANSION_BUDGET, RETRY_CAP};
pub use pivots::{read_pivots, select_pivots, write_pivots, PivotCriteria};
pub use query::{sample_query, Query};
pub use subgraph::{extract_subgraph, SubgraphView};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("pivot {0} is not in the graph")]
    UnknownPivot(NodeId),
    #[error("no unique path from pivot {0}")]
    NoPath(NodeId),
    #[error("pivot pool has {available} qualifying nodes, {requested} requested")]
    PoolTooSmall { available: usize, requested: usize },
    #[error("only {0} answer option(s) available")]
    InsufficientCandidates(usize),
    #[error("invalid spec config: {0}")]
    InvalidConfig(String),
}

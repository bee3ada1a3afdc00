//! Probabilistic certification of knowledge comprehension: sample multi-hop
//! questions from a knowledge graph, ask a model, and bound its accuracy
//! with an exact binomial confidence interval.

pub mod certify;
pub mod cli;
pub mod evaluation;
pub mod fixtures;
pub mod kg;
pub mod model;
pub mod prompting;
pub mod sampling;
pub mod seed;
pub mod stats;

/// `f64` Clopper-Pearson interval.
pub type Interval = stats::Interval<f64>;
/// `f32` Clopper-Pearson interval.
pub type Interval32 = stats::Interval<f32>;

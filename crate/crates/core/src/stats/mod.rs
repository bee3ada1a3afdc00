//! Exact binomial statistics, generic over the floating point scalar.
//!
//! Everything here is written against [`Probability`], which is implemented
//! for `f32` and `f64`. The crate root re-exports `f64` aliases for the
//! common case.

mod binomial;
mod clopper;
mod special;

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use thiserror::Error;

pub use binomial::{binomial_at_least, binomial_cdf};
pub use clopper::{clopper_pearson, Interval};
pub use special::{betainc, ln_beta, ln_gamma};

/// Scalar used for probabilities: `f32` or `f64`.
pub trait Probability: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {}

impl Probability for f32 {}
impl Probability for f64 {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("continued fraction did not converge")]
    NoConvergence,
}

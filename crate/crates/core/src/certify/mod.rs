//! Sampling loop, certificates and their aggregation.

mod instance;
mod report;
mod run;
mod store;

use thiserror::Error;

use crate::model::ModelError;
use crate::sampling::SamplingError;
use crate::stats::StatsError;

pub use instance::{generate_instance, Instance, InstanceError};
pub use report::{aggregate, hop_table, per_hop_report, HopRow, MeanStd, Summary, SummaryRow};
pub use run::{certify, draw_instance, Certificate, CertifyOptions, HopTally, Results, SampleRecord, SCHEMA_VERSION};
pub use store::{
    certificate_file_name, read_certificate, read_certificates, read_sample_log, sample_log_file_name, write_atomic,
    write_certificate, write_sample_log,
};

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("sample {index}: no valid instance after {attempts} attempts ({last})")]
    RedrawsExhausted { index: usize, attempts: usize, last: InstanceError },
    #[error("sample {index}: {source}")]
    Model {
        index: usize,
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("no certificates to aggregate")]
    EmptyInput,
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

//! Experiment driver: configuration, deterministic parallel Monte Carlo,
//! aggregation against predictions, and CSV/JSON reports.

mod config;
mod emit;
mod experiments;
mod stats;

use std::path::PathBuf;

use thiserror::Error;

use crate::combinatorics::CombinatoricsError;
use crate::ensemble::EnsembleError;
use crate::grassmann::GrassmannError;
use crate::nodal::NodalError;

pub use config::{ExperimentConfig, ExperimentKind, OutputFormat};
pub use emit::{emit, emit_to_path, CSV_HEADER};
pub use experiments::{dump_mesh, run};
pub use stats::{mean_and_stderr, pairwise_sum};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown experiment kind `{0}`")]
    UnknownKind(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("trial {trial}: no non-degenerate sample after {attempts} attempts")]
    ResampleExhausted { trial: u64, attempts: u32 },
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Nodal(#[from] NodalError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One output row. Exact kinds report `stderr = 0` and no `z`.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExperimentResult {
    pub kind: String,
    pub n: usize,
    pub lambda: Option<f64>,
    pub samples: usize,
    pub mean: f64,
    pub stderr: f64,
    pub predicted: f64,
    /// `mean / predicted`, absent when the prediction is zero.
    pub ratio: Option<f64>,
    /// `(mean − predicted) / stderr`.
    pub z: Option<f64>,
    pub discards: usize,
    pub seconds: f64,
    pub seed: u64,
    /// Formula the prediction comes from.
    pub source: String,
}

impl ExperimentResult {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        kind: impl Into<String>,
        n: usize,
        lambda: Option<f64>,
        samples: usize,
        mean: f64,
        stderr: f64,
        predicted: f64,
        seed: u64,
        source: &str,
    ) -> Self {
        let ratio = (predicted != 0.0).then(|| mean / predicted);
        let z = if stderr > 0.0 {
            Some((mean - predicted) / stderr)
        } else {
            None
        };
        Self {
            kind: kind.into(),
            n,
            lambda,
            samples,
            mean,
            stderr,
            predicted,
            ratio,
            z,
            discards: 0,
            seconds: 0.0,
            seed,
            source: source.to_string(),
        }
    }
}

/// Pass/fail verdict attached to a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub results: Vec<ExperimentResult>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

//! Evaluation harness: metrics, dataset runs, ablations and the deepfake
//! backend comparison. Rendering lives in [`report`].

pub mod dataset;
pub mod deepfake;
pub mod metrics;
pub mod report;
pub mod runner;

use std::path::PathBuf;

pub use dataset::{Dataset, DatasetRecord};
pub use deepfake::{compare_deepfake_backends, BackendRow, DeepfakeBench, DeepfakeMetrics};
pub use metrics::{compute_metrics, BinaryConfusion, ClassMetrics, Metrics};
pub use runner::{run_ablation, run_eval, run_eval_with, AblationTable, EvalReport, Prediction, Skipped};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{golds} gold labels but {preds} predictions")]
    LengthMismatch { golds: usize, preds: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("every record was skipped ({} records)", skipped.len())]
    NothingEvaluated { skipped: Vec<Skipped> },
    #[error("unknown module {0:?}")]
    UnknownModule(String),
    #[error("{origin} line {line}: {reason}")]
    BadDataset { origin: String, line: usize, reason: String },
    #[error("cannot read {path}: {reason}")]
    Io { path: PathBuf, reason: String },
}

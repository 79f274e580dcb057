//! Checkworthiness triage for short-form video.
//!
//! The crate turns a video into per-modality signals (transcript, on-screen
//! text, visual summary, deepfake score, buzzwords, claim stances) using
//! remote model backends, then fuses them with a configurable rule-based
//! scorer into a `Checkworthy` / `Not_Checkworthy` label with a ledger of
//! contributing signals. The `eval` module measures the scorer against
//! labelled datasets and runs module-removal ablations.

pub mod buzzword;
pub mod canonical;
pub mod claims;
pub mod config;
pub mod decision;
pub mod eval;
pub mod fixtures;
pub mod inference;
pub mod media;
pub mod model;
pub mod pipeline;
pub mod record;
pub mod store;

pub use config::PipelineConfig;
pub use model::*;

//! The persisted result of one analysis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::inference::{FrameScore, FrameText, Segment};
use crate::model::{CheckworthinessResult, ModalitySignals, VideoItem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleStatus {
    Ok,
    Failed,
    Disabled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleReport {
    pub status: ModuleStatus,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ModuleReport {
    pub fn disabled() -> Self {
        Self { status: ModuleStatus::Disabled, elapsed_ms: 0, detail: None }
    }
}

/// Raw per-module outputs kept for reviewers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Intermediates {
    pub frame_timestamps: Vec<f64>,
    pub captions: Vec<String>,
    pub transcript_segments: Vec<Segment>,
    pub ocr_frames: Vec<FrameText>,
    pub deepfake_frames: Vec<FrameScore>,
    pub claims: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classifier_reply: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub video_id: String,
    pub config_digest: String,
    /// RFC 3339, UTC.
    pub created_at: String,
    pub video: VideoItem,
    pub signals: ModalitySignals,
    pub result: CheckworthinessResult,
    /// Keyed by transcript, ocr, video_summary, deepfake, classify,
    /// buzzword, fact_check.
    pub modules: BTreeMap<String, ModuleReport>,
    pub intermediates: Intermediates,
}

impl AnalysisRecord {
    pub fn status(&self, module: &str) -> Option<ModuleStatus> {
        self.modules.get(module).map(|m| m.status)
    }

    /// Copy with wall-clock fields and the local source location cleared,
    /// for comparing two runs over the same bytes.
    pub fn without_volatile(&self) -> Self {
        let mut copy = self.clone();
        copy.created_at = String::new();
        copy.video.source = String::new();
        for m in copy.modules.values_mut() {
            m.elapsed_ms = 0;
        }
        copy
    }
}

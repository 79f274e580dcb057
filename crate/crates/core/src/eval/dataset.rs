//! Labelled datasets, one JSON record per line:
//!
//! ```text
//! {"video_id": "nb-0001", "gold_label": "Checkworthy", "language": "nb",
//!  "signals": {...}, "media": "clips/nb-0001.y4m"}
//! ```
//!
//! `signals` holds recorded modality signals for offline runs, `media` a
//! path (relative to the dataset file) or URL for live runs. At least one of
//! the two is required.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::model::{Label, ModalitySignals};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRecord {
    pub video_id: String,
    pub gold_label: Label,
    #[serde(default)]
    pub language: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signals: Option<ModalitySignals>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub media: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub records: Vec<DatasetRecord>,
}

impl Dataset {
    pub fn parse(name: &str, text: &str, base: Option<&Path>) -> Result<Self, EvalError> {
        let mut records = Vec::new();
        let mut ids = HashSet::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| EvalError::BadDataset {
                origin: name.to_string(),
                line: n + 1,
                reason,
            };
            let mut record: DatasetRecord =
                serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            if record.signals.is_none() && record.media.is_none() {
                return Err(bad("record has neither signals nor media".into()));
            }
            if let Some(signals) = &record.signals {
                signals.check().map_err(bad)?;
            }
            if !ids.insert(record.video_id.clone()) {
                return Err(bad(format!("duplicate video_id {}", record.video_id)));
            }
            if let (Some(media), Some(base)) = (&record.media, base) {
                if !media.contains("://") && Path::new(media).is_relative() {
                    record.media = Some(base.join(media).display().to_string());
                }
            }
            records.push(record);
        }
        Ok(Self { name: name.to_string(), records })
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EvalError::Io { path: path.to_path_buf(), reason: e.to_string() })?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::parse(&name, &text, path.parent())
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&crate::canonical::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_jsonl())
    }

    /// (checkworthy, not checkworthy) gold counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let cw = self.records.iter().filter(|r| r.gold_label.is_checkworthy()).count();
        (cw, self.records.len() - cw)
    }

    pub fn media_paths(&self) -> Vec<PathBuf> {
        self.records.iter().filter_map(|r| r.media.as_ref().map(PathBuf::from)).collect()
    }
}

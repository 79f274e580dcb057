//! Side-by-side evaluation of deepfake backends on labelled frame sets.
//!
//! Bench files are JSON lines `{"id": .., "label": "fake"|"real", "frames":
//! ["x.png", ..]}` with frame paths relative to the file. `fake` is the
//! positive class; a video is predicted fake when its score reaches the
//! trigger, and real when no face was found.

use std::path::Path;

use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};

use super::metrics::{BinaryConfusion, ClassMetrics};
use super::EvalError;
use crate::inference::{deepfake_score, BackendClient};
use crate::media::{png_dimensions, FrameSample};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchItem {
    pub id: String,
    pub fake: bool,
    pub frames: Vec<FrameSample>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeepfakeBench {
    pub name: String,
    pub items: Vec<BenchItem>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchLine {
    id: String,
    label: String,
    frames: Vec<String>,
}

impl DeepfakeBench {
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let io = |p: &Path, e: std::io::Error| EvalError::Io { path: p.to_path_buf(), reason: e.to_string() };
        let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let origin = path.display().to_string();
        let mut items = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| EvalError::BadDataset { origin: origin.clone(), line: n + 1, reason };
            let entry: BenchLine = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
            let fake = match entry.label.as_str() {
                "fake" => true,
                "real" => false,
                other => return Err(bad(format!("label must be fake or real, got {other:?}"))),
            };
            if entry.frames.is_empty() {
                return Err(bad("no frames".into()));
            }
            let mut frames = Vec::new();
            for (index, rel) in entry.frames.iter().enumerate() {
                let frame_path = base.join(rel);
                let bytes = std::fs::read(&frame_path).map_err(|e| io(&frame_path, e))?;
                let (width, height) = png_dimensions(&bytes)
                    .ok_or_else(|| bad(format!("{rel} is not a PNG")))?;
                frames.push(FrameSample { index, timestamp_s: index as f64, image_bytes: bytes, width, height });
            }
            items.push(BenchItem { id: entry.id, fake, frames });
        }
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Ok(Self { name, items })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeepfakeMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: BinaryConfusion,
    /// Items where no frame showed a face.
    pub no_face: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendRow {
    pub backend: String,
    pub metrics: Option<DeepfakeMetrics>,
    pub error: Option<String>,
}

pub fn metrics_from_scores(items: &[(bool, Option<f64>)], trigger: f64) -> DeepfakeMetrics {
    let confusion = BinaryConfusion::from_pairs(
        items.iter().map(|(fake, score)| (*fake, score.is_some_and(|s| s >= trigger))),
    );
    let ClassMetrics { precision, recall, f1, .. } = confusion.positive();
    DeepfakeMetrics {
        accuracy: confusion.accuracy(),
        precision,
        recall,
        f1,
        confusion,
        no_face: items.iter().filter(|(_, s)| s.is_none()).count(),
    }
}

async fn run_backend(
    bench: &DeepfakeBench,
    client: &BackendClient,
    trigger: f64,
    concurrency: usize,
) -> Result<DeepfakeMetrics, String> {
    let scored: Vec<Result<(bool, Option<f64>), String>> = stream::iter(&bench.items)
        .map(|item| async move {
            deepfake_score(client, &item.frames)
                .await
                .map(|r| (item.fake, r.score))
                .map_err(|e| format!("{}: {e}", item.id))
        })
        .buffered(concurrency.max(1))
        .collect()
        .await;
    let scored: Vec<(bool, Option<f64>)> = scored.into_iter().collect::<Result<_, _>>()?;
    Ok(metrics_from_scores(&scored, trigger))
}

/// One row per backend, in the order given. A backend that fails is
/// reported with its error; the others are still evaluated.
pub async fn compare_deepfake_backends(
    bench: &DeepfakeBench,
    clients: &[BackendClient],
    trigger: f64,
    concurrency: usize,
) -> Result<Vec<BackendRow>, EvalError> {
    if bench.items.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut rows = Vec::new();
    for client in clients {
        let row = match run_backend(bench, client, trigger, concurrency).await {
            Ok(m) => BackendRow { backend: client.name().to_string(), metrics: Some(m), error: None },
            Err(e) => BackendRow { backend: client.name().to_string(), metrics: None, error: Some(e) },
        };
        rows.push(row);
    }
    Ok(rows)
}

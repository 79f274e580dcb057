//! Dataset evaluation and module-removal ablation.

use std::future::Future;

use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, DatasetRecord};
use super::metrics::{BinaryConfusion, Metrics};
use super::EvalError;
use crate::config::{modules, PipelineConfig};
use crate::decision;
use crate::model::{CheckworthinessResult, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub video_id: String,
    pub language: String,
    pub gold: Label,
    pub pred: Label,
    pub score: f64,
    /// Signals that contributed to the score.
    pub fired: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub video_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub config_digest: String,
    pub metrics: Metrics,
    pub predictions: Vec<Prediction>,
    pub skipped: Vec<Skipped>,
}

impl EvalReport {
    pub fn skipped_fraction(&self) -> f64 {
        let total = self.predictions.len() + self.skipped.len();
        if total == 0 {
            0.0
        } else {
            self.skipped.len() as f64 / total as f64
        }
    }

    pub fn confusion(&self) -> BinaryConfusion {
        self.metrics.confusion
    }
}

fn build_report(
    dataset: &Dataset,
    config: &PipelineConfig,
    outcomes: Vec<(&DatasetRecord, Result<CheckworthinessResult, String>)>,
) -> Result<EvalReport, EvalError> {
    let mut predictions = Vec::new();
    let mut skipped = Vec::new();
    let mut confusion = BinaryConfusion::default();
    for (record, outcome) in outcomes {
        match outcome {
            Ok(result) => {
                confusion.add(record.gold_label.is_checkworthy(), result.label.is_checkworthy());
                predictions.push(Prediction {
                    video_id: record.video_id.clone(),
                    language: record.language.clone(),
                    gold: record.gold_label,
                    pred: result.label,
                    score: result.score,
                    fired: result.contributions.iter().map(|c| c.signal.clone()).collect(),
                });
            }
            Err(reason) => skipped.push(Skipped { video_id: record.video_id.clone(), reason }),
        }
    }
    if predictions.is_empty() {
        return Err(EvalError::NothingEvaluated { skipped });
    }
    Ok(EvalReport {
        dataset: dataset.name.clone(),
        config_digest: config.analysis_digest(&Default::default()),
        metrics: Metrics::from_confusion(confusion),
        predictions,
        skipped,
    })
}

/// Offline evaluation: score each record's recorded signals. Records
/// without signals are listed as skipped.
pub fn run_eval(dataset: &Dataset, config: &PipelineConfig) -> Result<EvalReport, EvalError> {
    if dataset.records.is_empty() {
        return Err(EvalError::Empty);
    }
    let outcomes = dataset
        .records
        .iter()
        .map(|r| {
            let outcome = match &r.signals {
                Some(signals) => Ok(decision::score(signals, config)),
                None => Err("no recorded signals".to_string()),
            };
            (r, outcome)
        })
        .collect();
    build_report(dataset, config, outcomes)
}

/// Live evaluation: `analyze` runs the full pipeline for one record. Up to
/// `concurrency` records run at once; failures become skipped entries.
pub async fn run_eval_with<F, Fut>(
    dataset: &Dataset,
    config: &PipelineConfig,
    concurrency: usize,
    analyze: F,
) -> Result<EvalReport, EvalError>
where
    F: Fn(DatasetRecord) -> Fut,
    Fut: Future<Output = Result<CheckworthinessResult, String>>,
{
    if dataset.records.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut indexed: Vec<(usize, Result<CheckworthinessResult, String>)> =
        stream::iter(dataset.records.iter().cloned().enumerate())
            .map(|(i, record)| {
                let fut = analyze(record);
                async move { (i, fut.await) }
            })
            .buffer_unordered(concurrency.max(1))
            .collect()
            .await;
    indexed.sort_by_key(|(i, _)| *i);
    let outcomes = indexed.into_iter().map(|(i, o)| (&dataset.records[i], o)).collect();
    build_report(dataset, config, outcomes)
}

/// Headline numbers of one evaluation, as used in ablation tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub precision: f64,
    pub recall: f64,
    pub accuracy: f64,
    pub f1: f64,
    pub weighted_f1: f64,
    pub cw_precision: f64,
    pub cw_recall: f64,
}

impl Summary {
    pub fn of(m: &Metrics) -> Self {
        Self {
            precision: m.macro_avg.precision,
            recall: m.macro_avg.recall,
            accuracy: m.accuracy,
            f1: m.macro_avg.f1,
            weighted_f1: m.weighted_f1,
            cw_precision: m.checkworthy.precision,
            cw_recall: m.checkworthy.recall,
        }
    }

    pub fn minus(&self, base: &Summary) -> Summary {
        Summary {
            precision: self.precision - base.precision,
            recall: self.recall - base.recall,
            accuracy: self.accuracy - base.accuracy,
            f1: self.f1 - base.f1,
            weighted_f1: self.weighted_f1 - base.weighted_f1,
            cw_precision: self.cw_precision - base.cw_precision,
            cw_recall: self.cw_recall - base.cw_recall,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub module: String,
    pub summary: Summary,
    /// `summary - baseline`.
    pub delta: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationTable {
    pub dataset: String,
    pub baseline: Summary,
    pub baseline_report: EvalReport,
    pub rows: Vec<AblationRow>,
}

/// Re-evaluate with each module removed in turn. An empty module list
/// means every module.
pub fn run_ablation(
    dataset: &Dataset,
    config: &PipelineConfig,
    module_list: &[String],
) -> Result<AblationTable, EvalError> {
    if let Some(unknown) = module_list.iter().find(|m| !modules::is_known(m)) {
        return Err(EvalError::UnknownModule(unknown.clone()));
    }
    let baseline_report = run_eval(dataset, config)?;
    let baseline = Summary::of(&baseline_report.metrics);
    let chosen: Vec<String> = if module_list.is_empty() {
        modules::ALL.iter().map(|m| m.to_string()).collect()
    } else {
        module_list.to_vec()
    };
    let mut rows = Vec::new();
    for module in chosen {
        let report = run_eval(dataset, &config.without(&module))?;
        let summary = Summary::of(&report.metrics);
        rows.push(AblationRow { delta: summary.minus(&baseline), module, summary });
    }
    Ok(AblationTable { dataset: dataset.name.clone(), baseline, baseline_report, rows })
}

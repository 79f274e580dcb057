//! Binary classification metrics. `Checkworthy` is the positive class for
//! the confusion matrix; per-class metrics are reported for both classes.
//! Every 0/0 ratio is defined as 0.

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::model::Label;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryConfusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl BinaryConfusion {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut c = Self::default();
        for (gold, pred) in pairs {
            c.add(gold, pred);
        }
        c
    }

    pub fn add(&mut self, gold: bool, pred: bool) {
        match (gold, pred) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn n(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Same matrix with the classes swapped.
    pub fn flipped(&self) -> Self {
        Self { tp: self.tn, fp: self.fn_, fn_: self.fp, tn: self.tp }
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.n())
    }

    pub fn positive(&self) -> ClassMetrics {
        ClassMetrics::from_counts(self.tp, self.fp, self.fn_)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

impl ClassMetrics {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Self { precision, recall, f1: f1(precision, recall), support: tp + fn_ }
    }
}

/// Harmonic mean of precision and recall.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub checkworthy: ClassMetrics,
    pub not_checkworthy: ClassMetrics,
    /// Unweighted mean over the two classes.
    #[serde(rename = "macro")]
    pub macro_avg: Averages,
    /// Support-weighted mean of the per-class F1.
    pub weighted_f1: f64,
    pub accuracy: f64,
    pub confusion: BinaryConfusion,
    pub n: u64,
}

impl Metrics {
    pub fn from_confusion(confusion: BinaryConfusion) -> Self {
        let cw = confusion.positive();
        let ncw = confusion.flipped().positive();
        let n = confusion.n();
        let weighted_f1 = if n == 0 {
            0.0
        } else {
            (cw.f1 * cw.support as f64 + ncw.f1 * ncw.support as f64) / n as f64
        };
        Self {
            macro_avg: Averages {
                precision: (cw.precision + ncw.precision) / 2.0,
                recall: (cw.recall + ncw.recall) / 2.0,
                f1: (cw.f1 + ncw.f1) / 2.0,
            },
            checkworthy: cw,
            not_checkworthy: ncw,
            weighted_f1,
            accuracy: confusion.accuracy(),
            confusion,
            n,
        }
    }

    pub fn check(&self) -> Result<(), String> {
        let values = [
            self.checkworthy.precision,
            self.checkworthy.recall,
            self.checkworthy.f1,
            self.not_checkworthy.precision,
            self.not_checkworthy.recall,
            self.not_checkworthy.f1,
            self.macro_avg.precision,
            self.macro_avg.recall,
            self.macro_avg.f1,
            self.weighted_f1,
            self.accuracy,
        ];
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(format!("metric {v} outside [0,1]"));
        }
        if self.confusion.n() != self.n {
            return Err("confusion counts do not sum to n".into());
        }
        Ok(())
    }
}

pub fn compute_metrics(golds: &[Label], preds: &[Label]) -> Result<Metrics, EvalError> {
    if golds.len() != preds.len() {
        return Err(EvalError::LengthMismatch { golds: golds.len(), preds: preds.len() });
    }
    if golds.is_empty() {
        return Err(EvalError::Empty);
    }
    let confusion = BinaryConfusion::from_pairs(
        golds.iter().zip(preds).map(|(g, p)| (g.is_checkworthy(), p.is_checkworthy())),
    );
    Ok(Metrics::from_confusion(confusion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Label::{Checkworthy as CW, NotCheckworthy as NCW};

    #[test]
    fn perfect_predictions() {
        let golds = [CW, NCW, CW, NCW, NCW];
        let m = compute_metrics(&golds, &golds).unwrap();
        for c in [m.checkworthy, m.not_checkworthy] {
            assert_eq!((c.precision, c.recall, c.f1), (1.0, 1.0, 1.0));
        }
        assert_eq!(m.accuracy, 1.0);
    }

    #[test]
    fn one_of_each_cell() {
        let m = compute_metrics(&[CW, NCW, CW, NCW], &[CW, CW, NCW, NCW]).unwrap();
        assert_eq!(m.confusion, BinaryConfusion { tp: 1, fp: 1, fn_: 1, tn: 1 });
        assert_eq!((m.checkworthy.precision, m.checkworthy.recall, m.checkworthy.f1), (0.5, 0.5, 0.5));
        assert_eq!(m.accuracy, 0.5);
    }

    #[test]
    fn degenerate_cases() {
        // Never predicting the positive class.
        let m = compute_metrics(&[CW, NCW], &[NCW, NCW]).unwrap();
        assert_eq!((m.checkworthy.precision, m.checkworthy.recall, m.checkworthy.f1), (0.0, 0.0, 0.0));
        assert!(matches!(compute_metrics(&[], &[]), Err(EvalError::Empty)));
        assert!(matches!(compute_metrics(&[CW], &[]), Err(EvalError::LengthMismatch { .. })));
    }

    #[test]
    fn confusion_serializes_fn_key() {
        let json = serde_json::to_value(BinaryConfusion { tp: 1, fp: 2, fn_: 3, tn: 4 }).unwrap();
        assert_eq!(json["fn"], 3);
    }

    proptest! {
        #[test]
        fn identities(tp in 0u64..500, fp in 0u64..500, fn_ in 0u64..500, tn in 0u64..500) {
            prop_assume!(tp + fp + fn_ + tn > 0);
            let m = Metrics::from_confusion(BinaryConfusion { tp, fp, fn_, tn });
            prop_assert!(m.check().is_ok());
            for c in [m.checkworthy, m.not_checkworthy] {
                let harmonic = if c.precision + c.recall == 0.0 { 0.0 }
                    else { 2.0 / (1.0 / c.precision + 1.0 / c.recall) };
                prop_assert!((c.f1 - harmonic).abs() < 1e-12);
            }
            let (lo, hi) = if m.checkworthy.f1 < m.not_checkworthy.f1 {
                (m.checkworthy.f1, m.not_checkworthy.f1)
            } else {
                (m.not_checkworthy.f1, m.checkworthy.f1)
            };
            prop_assert!(m.macro_avg.f1 <= hi + 1e-12);
            prop_assert!(m.weighted_f1 >= lo - 1e-12 && m.weighted_f1 <= hi + 1e-12);
            prop_assert_eq!(m.accuracy, (tp + tn) as f64 / (tp + fp + fn_ + tn) as f64);
        }
    }
}

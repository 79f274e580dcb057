//! Text tables and CSV for evaluation results. Numbers use three decimals;
//! deltas carry an explicit sign and a delta that rounds to zero prints as
//! `0.000`.

use std::fmt::Write as _;

use super::deepfake::BackendRow;
use super::runner::{AblationTable, EvalReport, Summary};

pub fn num(x: f64) -> String {
    format!("{x:.3}")
}

pub fn signed(x: f64) -> String {
    let rounded = (x * 1000.0).round() / 1000.0;
    if rounded == 0.0 {
        "0.000".into()
    } else if rounded > 0.0 {
        format!("+{rounded:.3}")
    } else {
        format!("-{:.3}", -rounded)
    }
}

fn csv_string(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

pub fn eval_text(r: &EvalReport) -> String {
    let m = &r.metrics;
    let (cw, ncw, mac) = (&m.checkworthy, &m.not_checkworthy, &m.macro_avg);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<24} {:^23} {:^23} {:^31}",
        "", "CW", "NCW", "Combined (macro)"
    );
    let _ = writeln!(
        out,
        "{:<24} {:>7}{:>8}{:>8} {:>7}{:>8}{:>8} {:>7}{:>8}{:>8}{:>8}",
        "dataset", "P", "R", "F1", "P", "R", "F1", "P", "R", "F1", "Acc"
    );
    let _ = writeln!(
        out,
        "{:<24} {:>7}{:>8}{:>8} {:>7}{:>8}{:>8} {:>7}{:>8}{:>8}{:>8}",
        r.dataset,
        num(cw.precision),
        num(cw.recall),
        num(cw.f1),
        num(ncw.precision),
        num(ncw.recall),
        num(ncw.f1),
        num(mac.precision),
        num(mac.recall),
        num(mac.f1),
        num(m.accuracy),
    );
    let c = &m.confusion;
    let _ = writeln!(
        out,
        "n={} (CW {}, NCW {})  weighted F1 {}  skipped {}",
        m.n,
        cw.support,
        ncw.support,
        num(m.weighted_f1),
        r.skipped.len()
    );
    let _ = writeln!(out, "confusion (rows gold, cols predicted):");
    let _ = writeln!(out, "  {:<6}{:>8}{:>8}", "", "CW", "NCW");
    let _ = writeln!(out, "  {:<6}{:>8}{:>8}", "CW", c.tp, c.fn_);
    let _ = writeln!(out, "  {:<6}{:>8}{:>8}", "NCW", c.fp, c.tn);
    for s in &r.skipped {
        let _ = writeln!(out, "skipped {}: {}", s.video_id, s.reason);
    }
    out
}

pub fn eval_csv(r: &EvalReport) -> String {
    let m = &r.metrics;
    let c = &m.confusion;
    let header = [
        "dataset", "n", "skipped", "cw_p", "cw_r", "cw_f1", "ncw_p", "ncw_r", "ncw_f1", "macro_p",
        "macro_r", "macro_f1", "accuracy", "weighted_f1", "tp", "fp", "fn", "tn",
    ];
    let row = vec![
        r.dataset.clone(),
        m.n.to_string(),
        r.skipped.len().to_string(),
        num(m.checkworthy.precision),
        num(m.checkworthy.recall),
        num(m.checkworthy.f1),
        num(m.not_checkworthy.precision),
        num(m.not_checkworthy.recall),
        num(m.not_checkworthy.f1),
        num(m.macro_avg.precision),
        num(m.macro_avg.recall),
        num(m.macro_avg.f1),
        num(m.accuracy),
        num(m.weighted_f1),
        c.tp.to_string(),
        c.fp.to_string(),
        c.fn_.to_string(),
        c.tn.to_string(),
    ];
    csv_string(vec![header.iter().map(|s| s.to_string()).collect(), row])
}

pub fn predictions_csv(r: &EvalReport) -> String {
    let mut rows = vec![["video_id", "language", "gold", "pred", "score", "fired"]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()];
    for p in &r.predictions {
        rows.push(vec![
            p.video_id.clone(),
            p.language.clone(),
            p.gold.to_string(),
            p.pred.to_string(),
            p.score.to_string(),
            p.fired.join(";"),
        ]);
    }
    csv_string(rows)
}

fn summary_cells(s: &Summary, fmt: fn(f64) -> String) -> [String; 6] {
    [
        fmt(s.precision),
        fmt(s.recall),
        fmt(s.accuracy),
        fmt(s.f1),
        fmt(s.cw_precision),
        fmt(s.cw_recall),
    ]
}

pub fn ablation_text(t: &AblationTable) -> String {
    let mut out = String::new();
    let line = |out: &mut String, name: &str, cells: [String; 6]| {
        let _ = writeln!(
            out,
            "{:<16}{:>8}{:>8}{:>8}{:>8}{:>9}{:>9}",
            name, cells[0], cells[1], cells[2], cells[3], cells[4], cells[5]
        );
    };
    let _ = writeln!(out, "ablation on {} (macro P/R/F1; CW P/R)", t.dataset);
    line(&mut out, "removed", ["P", "R", "Acc", "F1", "CW P", "CW R"].map(String::from));
    for row in &t.rows {
        line(&mut out, &row.module, summary_cells(&row.delta, signed));
    }
    line(&mut out, "baseline", summary_cells(&t.baseline, num));
    out
}

pub fn ablation_csv(t: &AblationTable) -> String {
    let mut rows = vec![[
        "module", "d_p", "d_r", "d_acc", "d_f1", "d_cw_p", "d_cw_r", "p", "r", "acc", "f1", "cw_p",
        "cw_r",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect::<Vec<_>>()];
    for row in &t.rows {
        let mut r = vec![row.module.clone()];
        r.extend(summary_cells(&row.delta, signed));
        r.extend(summary_cells(&row.summary, num));
        rows.push(r);
    }
    let mut base = vec!["baseline".to_string()];
    base.extend(summary_cells(&Summary::of_zero(), signed));
    base.extend(summary_cells(&t.baseline, num));
    rows.push(base);
    csv_string(rows)
}

pub fn deepfake_text(rows: &[BackendRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<20}{:>8}{:>8}{:>8}{:>8}", "backend", "A", "P", "R", "F1");
    for row in rows {
        match (&row.metrics, &row.error) {
            (Some(m), _) => {
                let _ = writeln!(
                    out,
                    "{:<20}{:>8}{:>8}{:>8}{:>8}",
                    row.backend,
                    num(m.accuracy),
                    num(m.precision),
                    num(m.recall),
                    num(m.f1)
                );
            }
            (None, error) => {
                let _ = writeln!(
                    out,
                    "{:<20} unavailable: {}",
                    row.backend,
                    error.as_deref().unwrap_or("unknown error")
                );
            }
        }
    }
    out
}

pub fn deepfake_csv(rows: &[BackendRow]) -> String {
    let mut out = vec![["backend", "accuracy", "precision", "recall", "f1", "tp", "fp", "fn", "tn", "error"]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()];
    for row in rows {
        let mut r = vec![row.backend.clone()];
        match &row.metrics {
            Some(m) => {
                r.extend([m.accuracy, m.precision, m.recall, m.f1].map(num));
                r.extend([m.confusion.tp, m.confusion.fp, m.confusion.fn_, m.confusion.tn].map(|v| v.to_string()));
                r.push(String::new());
            }
            None => {
                r.extend(std::iter::repeat_n(String::new(), 8));
                r.push(row.error.clone().unwrap_or_default());
            }
        }
        out.push(r);
    }
    csv_string(out)
}

impl Summary {
    fn of_zero() -> Self {
        Summary {
            precision: 0.0,
            recall: 0.0,
            accuracy: 0.0,
            f1: 0.0,
            weighted_f1: 0.0,
            cw_precision: 0.0,
            cw_recall: 0.0,
        }
    }
}

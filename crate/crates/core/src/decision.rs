//! Rule-based fusion of modality signals into a label.
//!
//! Each rule either fires or not; a fired rule from an enabled module adds
//! its configured weight. The label is `Checkworthy` when the total reaches
//! the threshold, unless the ad filter overrides it.

use std::fmt::Write as _;

use crate::config::{modules, signals, PipelineConfig};
use crate::model::{
    CheckworthinessResult, Contribution, Label, ModalitySignals, SemanticClass,
};

fn verdict_rationale(what: &str, class: SemanticClass) -> Option<String> {
    class.is_flagging().then(|| format!("{what} classified {class}"))
}

/// Every rule that fires on `signals`, in ledger order, with its rationale.
/// Module toggles are not consulted here.
pub fn fired_rules(s: &ModalitySignals, config: &PipelineConfig) -> Vec<(&'static str, String)> {
    let mut fired = Vec::new();
    let mut push = |signal: &'static str, why: Option<String>| {
        if let Some(why) = why {
            fired.push((signal, why));
        }
    };
    push(signals::VERDICT_TRANSCRIPT, verdict_rationale("transcript", s.transcript_verdict));
    push(signals::VERDICT_SUMMARY, verdict_rationale("video summary", s.summary_verdict));
    push(signals::VERDICT_OVERLAY, verdict_rationale("on-screen text", s.overlay_verdict));

    if !s.buzzword_hits.is_empty() {
        let mut terms: Vec<&str> = s.buzzword_hits.iter().map(|h| h.term.as_str()).collect();
        terms.dedup();
        push(
            signals::BUZZWORD,
            Some(format!("{} buzzword hit(s): {}", s.buzzword_hits.len(), terms.join(", "))),
        );
    }

    let contradicted = s.claim_results.iter().filter(|c| c.stance.is_contradicting()).count();
    if contradicted > 0 {
        push(
            signals::CLAIM_REFUTED,
            Some(format!("{contradicted} of {} claim(s) refuted or disputed", s.claim_results.len())),
        );
    } else if !s.claim_results.is_empty() {
        push(
            signals::CLAIM_PRESENT,
            Some(format!("{} factual claim(s), none contradicted", s.claim_results.len())),
        );
    }

    if let Some(score) = s.deepfake_score {
        if score >= config.deepfake_trigger {
            push(
                signals::DEEPFAKE,
                Some(format!("deepfake score {score:.3} >= trigger {}", config.deepfake_trigger)),
            );
        }
    }
    if s.weapon_detected {
        push(signals::WEAPON, Some("weapon detected in frames".into()));
    }
    fired
}

pub fn score(s: &ModalitySignals, config: &PipelineConfig) -> CheckworthinessResult {
    let contributions: Vec<Contribution> = fired_rules(s, config)
        .into_iter()
        .filter(|(signal, _)| signals::module_of(signal).is_some_and(|m| config.is_enabled(m)))
        .map(|(signal, rationale)| Contribution {
            signal: signal.to_string(),
            weight: config.weight(signal),
            rationale,
        })
        .collect();
    let total = contributions.iter().fold(0.0, |acc, c| acc + c.weight);
    let ad_override = s.is_advertisement && config.is_enabled(modules::AD_FILTER);
    let label = if ad_override {
        Label::NotCheckworthy
    } else {
        Label::from_bool(total >= config.threshold)
    };
    CheckworthinessResult {
        label,
        score: total,
        threshold: config.threshold,
        contributions,
        ad_override,
        disabled: config.disabled_modules(),
        notes: Vec::new(),
    }
}

/// Copy of `s` with every signal derived from `module` cleared.
pub fn zero_module_signals(s: &ModalitySignals, module: &str) -> ModalitySignals {
    let mut z = s.clone();
    match module {
        modules::TRANSCRIPT => z.transcript_verdict = SemanticClass::Unknown,
        modules::VIDEO_SUMMARY => z.summary_verdict = SemanticClass::Unknown,
        modules::OCR => z.overlay_verdict = SemanticClass::Unknown,
        modules::BUZZWORD => z.buzzword_hits.clear(),
        modules::FACT_CHECK => z.claim_results.clear(),
        modules::DEEPFAKE => z.deepfake_score = None,
        modules::AD_FILTER => z.is_advertisement = false,
        modules::WEAPON => z.weapon_detected = false,
        _ => {}
    }
    z
}

/// Plain-text report. The format is stable.
pub fn explain(result: &CheckworthinessResult) -> String {
    let mut out = String::new();
    if result.ad_override {
        let _ = writeln!(out, "AD OVERRIDE: advertisement detected, label forced to {}", result.label);
    }
    let cmp = if result.score >= result.threshold { ">=" } else { "<" };
    let _ = writeln!(
        out,
        "label: {} (score {} {cmp} threshold {})",
        result.label, result.score, result.threshold
    );
    if result.contributions.is_empty() {
        out.push_str("no signals fired\n");
    } else {
        out.push_str("contributions:\n");
        for c in &result.contributions {
            let _ = writeln!(out, "  {} +{}: {}", c.signal, c.weight, c.rationale);
        }
    }
    if result.disabled.is_empty() {
        out.push_str("disabled: none\n");
    } else {
        let _ = writeln!(out, "disabled: {}", result.disabled.join(", "));
    }
    for note in &result.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

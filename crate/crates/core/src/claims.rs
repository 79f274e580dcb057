//! Claim detection and fact-check lookup.
//!
//! `detect_claims` splits text into sentences and asks the claim-detection
//! backend which are check-worthy: `{sentences}` → `{checkworthy: [bool]}`.
//! `verify_claims` sends one `fact_check` request per claim, concurrently:
//! `{claim}` → `{label, evidence: [{url}], confidence}`.
//!
//! Service labels are mapped onto four stances:
//!
//! | label                                      | stance      |
//! |--------------------------------------------|-------------|
//! | supported, supports, true, entailment      | supported   |
//! | refuted, refutes, false, contradiction     | refuted     |
//! | disputed, mixed, conflicting, misleading   | disputed    |
//! | no_evidence, nei, not enough info, unknown | no_evidence |
//! | anything else, with evidence               | disputed    |
//! | anything else, without evidence            | no_evidence |
//!
//! A non-`no_evidence` stance without evidence is downgraded to
//! `no_evidence` with a warning.

use futures::future::join_all;
use serde::Deserialize;
use serde_json::json;
use unicode_segmentation::UnicodeSegmentation;

use crate::inference::{decode_output, tasks, BackendClient, InferenceError};
use crate::model::{ClaimCheckResult, Stance};

pub fn sentences(text: &str) -> Vec<String> {
    text.unicode_sentences()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

#[derive(Deserialize)]
struct DetectOutput {
    checkworthy: Vec<bool>,
}

pub async fn detect_claims(client: &BackendClient, text: &str) -> Result<Vec<String>, InferenceError> {
    let sentences = sentences(text);
    if sentences.is_empty() {
        return Err(InferenceError::EmptyInput("claim detection needs non-empty text".into()));
    }
    let output = client.call(tasks::DETECT_CLAIMS, json!({ "sentences": sentences })).await?;
    let out: DetectOutput = decode_output(client, output)?;
    if out.checkworthy.len() != sentences.len() {
        return Err(InferenceError::BadResponse {
            backend: client.name().to_string(),
            reason: format!("{} flags for {} sentences", out.checkworthy.len(), sentences.len()),
        });
    }
    Ok(sentences
        .into_iter()
        .zip(out.checkworthy)
        .filter_map(|(s, keep)| keep.then_some(s))
        .collect())
}

/// Map a service label onto a stance. Returns a warning when the label was
/// not recognised or had to be downgraded.
pub fn normalize_stance(label: &str, has_evidence: bool) -> (Stance, Option<String>) {
    let key = label.trim().to_lowercase().replace(['_', '-'], " ");
    let known = match key.as_str() {
        "supported" | "supports" | "true" | "entailment" => Some(Stance::Supported),
        "refuted" | "refutes" | "false" | "contradiction" => Some(Stance::Refuted),
        "disputed" | "mixed" | "conflicting" | "misleading" => Some(Stance::Disputed),
        "no evidence" | "nei" | "not enough info" | "unknown" => Some(Stance::NoEvidence),
        _ => None,
    };
    match known {
        Some(Stance::NoEvidence) => (Stance::NoEvidence, None),
        Some(stance) if has_evidence => (stance, None),
        Some(stance) => (
            Stance::NoEvidence,
            Some(format!("service said {stance} without evidence")),
        ),
        None if has_evidence => (Stance::Disputed, Some(format!("unrecognised label {label:?}"))),
        None => (Stance::NoEvidence, Some(format!("unrecognised label {label:?}"))),
    }
}

#[derive(Deserialize)]
struct Evidence {
    url: String,
}

#[derive(Deserialize)]
struct FactCheckOutput {
    label: String,
    #[serde(default)]
    evidence: Vec<Evidence>,
    #[serde(default)]
    confidence: f64,
}

async fn verify_one(client: &BackendClient, claim: &str) -> Result<ClaimCheckResult, InferenceError> {
    let output = client.call(tasks::FACT_CHECK, json!({ "claim": claim })).await?;
    let out: FactCheckOutput = decode_output(client, output)?;
    if !(0.0..=1.0).contains(&out.confidence) {
        return Err(InferenceError::BadResponse {
            backend: client.name().to_string(),
            reason: format!("confidence {} outside [0,1]", out.confidence),
        });
    }
    let evidence_refs: Vec<String> = out
        .evidence
        .into_iter()
        .map(|e| e.url)
        .filter(|u| !u.trim().is_empty())
        .collect();
    let (stance, warning) = normalize_stance(&out.label, !evidence_refs.is_empty());
    Ok(ClaimCheckResult {
        claim_text: claim.to_string(),
        stance,
        evidence_refs: if stance == Stance::NoEvidence { vec![] } else { evidence_refs },
        confidence: out.confidence,
        warning,
    })
}

/// One result per claim, in input order. A failed lookup degrades that
/// claim to `no_evidence` with a warning; only when every lookup fails is
/// the error returned.
pub async fn verify_claims(
    client: &BackendClient,
    claims: &[String],
) -> Result<Vec<ClaimCheckResult>, InferenceError> {
    if claims.is_empty() {
        return Ok(Vec::new());
    }
    let outcomes = join_all(claims.iter().map(|c| verify_one(client, c))).await;
    if outcomes.iter().all(Result::is_err) {
        return Err(outcomes.into_iter().find_map(Result::err).expect("non-empty"));
    }
    Ok(claims
        .iter()
        .zip(outcomes)
        .map(|(claim, outcome)| {
            outcome.unwrap_or_else(|e| ClaimCheckResult {
                claim_text: claim.clone(),
                stance: Stance::NoEvidence,
                evidence_refs: vec![],
                confidence: 0.0,
                warning: Some(format!("lookup failed: {e}")),
            })
        })
        .collect())
}

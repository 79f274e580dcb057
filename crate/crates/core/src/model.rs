//! Shared domain types.
//!
//! Everything here is a plain immutable value once constructed. Types that
//! carry invariants expose a `check` method so callers (and tests) can verify
//! an instance without any pipeline context.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Longest video admitted to the pipeline, in seconds.
pub const MAX_DURATION_S: f64 = 600.0;

/// Hex SHA-256 of `bytes`.
pub fn content_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A video under analysis plus its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoItem {
    /// Hex digest of the media bytes.
    pub id: String,
    pub source: String,
    #[serde(default)]
    pub language_hint: Option<String>,
    pub duration_s: f64,
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
}

impl VideoItem {
    pub fn check(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("video id is empty".into());
        }
        if !(self.duration_s.is_finite() && self.duration_s >= 0.0) {
            return Err(format!("duration_s {} is not a non-negative number", self.duration_s));
        }
        Ok(())
    }

    /// Whether the short-video rule admits this item.
    pub fn is_admissible(&self) -> bool {
        self.duration_s > 0.0 && self.duration_s <= MAX_DURATION_S
    }
}

/// Per-modality semantic class assigned by the classifier.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum SemanticClass {
    Political,
    Hostile,
    Benign,
    Promotional,
    #[serde(alias = "contentious-issue")]
    ContentiousIssue,
    #[default]
    Unknown,
}

impl SemanticClass {
    pub const ALL: [SemanticClass; 6] = [
        SemanticClass::Political,
        SemanticClass::Hostile,
        SemanticClass::Benign,
        SemanticClass::Promotional,
        SemanticClass::ContentiousIssue,
        SemanticClass::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SemanticClass::Political => "political",
            SemanticClass::Hostile => "hostile",
            SemanticClass::Benign => "benign",
            SemanticClass::Promotional => "promotional",
            SemanticClass::ContentiousIssue => "contentious_issue",
            SemanticClass::Unknown => "unknown",
        }
    }

    /// Classes that make a verdict signal fire in the decision engine.
    pub fn is_flagging(self) -> bool {
        matches!(
            self,
            SemanticClass::Political | SemanticClass::Hostile | SemanticClass::ContentiousIssue
        )
    }
}

impl fmt::Display for SemanticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Final triage label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Checkworthy,
    #[serde(rename = "Not_Checkworthy")]
    NotCheckworthy,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Checkworthy => "Checkworthy",
            Label::NotCheckworthy => "Not_Checkworthy",
        }
    }

    pub fn is_checkworthy(self) -> bool {
        self == Label::Checkworthy
    }

    pub fn from_bool(checkworthy: bool) -> Self {
        if checkworthy {
            Label::Checkworthy
        } else {
            Label::NotCheckworthy
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which extracted text a buzzword hit came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextSource {
    Transcript,
    Overlay,
}

/// Half-open range of Unicode scalar value offsets into a source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharSpan {
    pub start: usize,
    pub end: usize,
}

impl CharSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    /// Slice `text` by this span, or `None` if it falls outside the text.
    pub fn slice<'a>(&self, text: &'a str) -> Option<&'a str> {
        if self.start > self.end {
            return None;
        }
        let mut indices = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len()));
        let start = indices.nth(self.start)?;
        let end = if self.end == self.start {
            start
        } else {
            indices.nth(self.end - self.start - 1)?
        };
        Some(&text[start..end])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BuzzwordHit {
    /// Normalized lexicon entry that matched.
    pub term: String,
    /// Matched text exactly as it appeared in the source.
    pub surface: String,
    pub source: TextSource,
    pub span: CharSpan,
}

/// Evidence stance relayed from the fact-check service.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stance {
    Supported,
    Refuted,
    Disputed,
    NoEvidence,
}

impl Stance {
    pub fn as_str(self) -> &'static str {
        match self {
            Stance::Supported => "supported",
            Stance::Refuted => "refuted",
            Stance::Disputed => "disputed",
            Stance::NoEvidence => "no_evidence",
        }
    }

    /// Stances that count as contradicting evidence.
    pub fn is_contradicting(self) -> bool {
        matches!(self, Stance::Refuted | Stance::Disputed)
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimCheckResult {
    pub claim_text: String,
    pub stance: Stance,
    #[serde(default)]
    pub evidence_refs: Vec<String>,
    pub confidence: f64,
    /// Set when the per-claim lookup failed and the result was degraded.
    #[serde(default)]
    pub warning: Option<String>,
}

impl ClaimCheckResult {
    pub fn check(&self) -> Result<(), String> {
        if self.claim_text.trim().is_empty() {
            return Err("claim_text is empty".into());
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(format!("confidence {} outside [0,1]", self.confidence));
        }
        if self.evidence_refs.is_empty() && self.stance != Stance::NoEvidence {
            return Err(format!("stance {} without evidence", self.stance));
        }
        Ok(())
    }
}

/// Joined per-modality extraction outputs for one video.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModalitySignals {
    #[serde(default)]
    pub transcript: Option<String>,
    #[serde(default)]
    pub transcript_lang: Option<String>,
    #[serde(default)]
    pub overlay_text: Option<String>,
    #[serde(default)]
    pub video_summary: Option<String>,
    #[serde(default)]
    pub transcript_verdict: SemanticClass,
    #[serde(default)]
    pub summary_verdict: SemanticClass,
    #[serde(default)]
    pub overlay_verdict: SemanticClass,
    #[serde(default)]
    pub buzzword_hits: Vec<BuzzwordHit>,
    #[serde(default)]
    pub deepfake_score: Option<f64>,
    #[serde(default)]
    pub claim_results: Vec<ClaimCheckResult>,
    #[serde(default)]
    pub is_advertisement: bool,
    /// Output of the optional weapon detector (disabled by default).
    #[serde(default)]
    pub weapon_detected: bool,
}

impl ModalitySignals {
    pub fn buzzword_detected(&self) -> bool {
        !self.buzzword_hits.is_empty()
    }

    pub fn check(&self) -> Result<(), String> {
        if let Some(score) = self.deepfake_score {
            if !(0.0..=1.0).contains(&score) {
                return Err(format!("deepfake_score {score} outside [0,1]"));
            }
        }
        for claim in &self.claim_results {
            claim.check()?;
        }
        for hit in &self.buzzword_hits {
            let text = match hit.source {
                TextSource::Transcript => self.transcript.as_deref(),
                TextSource::Overlay => self.overlay_text.as_deref(),
            };
            match text.and_then(|t| hit.span.slice(t)) {
                Some(surface) if surface == hit.surface => {}
                _ => return Err(format!("buzzword hit {:?} does not match its source span", hit.term)),
            }
        }
        Ok(())
    }
}

/// One line of the scoring ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub signal: String,
    pub weight: f64,
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckworthinessResult {
    pub label: Label,
    pub score: f64,
    pub threshold: f64,
    pub contributions: Vec<Contribution>,
    pub ad_override: bool,
    /// Modules switched off in the config that produced this result.
    #[serde(default)]
    pub disabled: Vec<String>,
    /// Pipeline notes, e.g. modules that failed and were skipped.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl CheckworthinessResult {
    /// Sum of the ledger, folded in ledger order.
    pub fn ledger_total(&self) -> f64 {
        self.contributions.iter().fold(0.0, |acc, c| acc + c.weight)
    }

    pub fn check(&self) -> Result<(), String> {
        if self.ledger_total() != self.score {
            return Err(format!(
                "ledger total {} differs from score {}",
                self.ledger_total(),
                self.score
            ));
        }
        if self.score < 0.0 {
            return Err(format!("negative score {}", self.score));
        }
        if self.ad_override {
            if self.label != Label::NotCheckworthy {
                return Err("ad override with a Checkworthy label".into());
            }
        } else if self.label.is_checkworthy() != (self.score >= self.threshold) {
            return Err(format!(
                "label {} inconsistent with score {} and threshold {}",
                self.label, self.score, self.threshold
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_slicing_counts_chars() {
        let text = "Café STEM frp";
        assert_eq!(CharSpan::new(0, 4).slice(text), Some("Café"));
        assert_eq!(CharSpan::new(5, 13).slice(text), Some("STEM frp"));
        assert_eq!(CharSpan::new(13, 13).slice(text), Some(""));
        assert_eq!(CharSpan::new(5, 14).slice(text), None);
    }

    #[test]
    fn semantic_class_tokens() {
        assert_eq!(serde_json::to_string(&SemanticClass::Hostile).unwrap(), "\"hostile\"");
        let parsed: SemanticClass = serde_json::from_str("\"contentious-issue\"").unwrap();
        assert_eq!(parsed, SemanticClass::ContentiousIssue);
        for class in SemanticClass::ALL {
            let json = serde_json::to_string(&class).unwrap();
            assert_eq!(json, format!("\"{}\"", class.as_str()));
        }
    }

    #[test]
    fn label_tokens() {
        assert_eq!(serde_json::to_string(&Label::NotCheckworthy).unwrap(), "\"Not_Checkworthy\"");
        assert_eq!(serde_json::to_string(&Label::Checkworthy).unwrap(), "\"Checkworthy\"");
    }

    #[test]
    fn result_consistency_rules() {
        let mut result = CheckworthinessResult {
            label: Label::Checkworthy,
            score: 3.0,
            threshold: 2.0,
            contributions: vec![
                Contribution { signal: "a".into(), weight: 1.0, rationale: String::new() },
                Contribution { signal: "b".into(), weight: 2.0, rationale: String::new() },
            ],
            ad_override: false,
            disabled: vec![],
            notes: vec![],
        };
        assert!(result.check().is_ok());
        result.ad_override = true;
        assert!(result.check().is_err());
        result.label = Label::NotCheckworthy;
        assert!(result.check().is_ok());
        result.ad_override = false;
        assert!(result.check().is_err());
        result.score = 2.5;
        assert!(result.check().is_err());
    }

    #[test]
    fn signals_reject_out_of_range_deepfake() {
        let signals = ModalitySignals { deepfake_score: Some(1.2), ..Default::default() };
        assert!(signals.check().is_err());
    }
}

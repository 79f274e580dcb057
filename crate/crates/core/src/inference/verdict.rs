//! Parsing of free-form LLM replies. Total: every string yields a value.

use crate::model::SemanticClass;

const TOKENS: [(&str, SemanticClass); 7] = [
    ("political", SemanticClass::Political),
    ("hostile", SemanticClass::Hostile),
    ("benign", SemanticClass::Benign),
    ("promotional", SemanticClass::Promotional),
    ("contentious-issue", SemanticClass::ContentiousIssue),
    ("contentious_issue", SemanticClass::ContentiousIssue),
    ("contentious issue", SemanticClass::ContentiousIssue),
];

fn is_word_char(c: Option<char>) -> bool {
    c.is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '-')
}

/// Earliest class token in `text` (lowercased, trimmed), standing on its own
/// as a word. Anything else is `Unknown`.
pub fn extract_verdict(text: &str) -> SemanticClass {
    let lowered = text.trim().to_lowercase();
    let mut best: Option<(usize, SemanticClass)> = None;
    for (token, class) in TOKENS {
        let mut from = 0;
        while let Some(rel) = lowered[from..].find(token) {
            let start = from + rel;
            let end = start + token.len();
            let before = lowered[..start].chars().next_back();
            let after = lowered[end..].chars().next();
            if !is_word_char(before) && !is_word_char(after) {
                if best.is_none_or(|(pos, _)| start < pos) {
                    best = Some((start, class));
                }
                break;
            }
            from = start + 1;
            while !lowered.is_char_boundary(from) {
                from += 1;
            }
        }
    }
    best.map_or(SemanticClass::Unknown, |(_, class)| class)
}

pub fn extract_yes_no(text: &str) -> Option<bool> {
    let lowered = text.trim().to_lowercase();
    let first = lowered
        .split(|c: char| !c.is_alphanumeric())
        .find(|w| !w.is_empty())?;
    match first {
        "yes" | "true" | "y" => Some(true),
        "no" | "false" | "n" => Some(false),
        _ => None,
    }
}

/// Fields of the summarize-and-classify reply.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassifyReply {
    pub summary: Option<String>,
    pub transcript_verdict: SemanticClass,
    pub summary_verdict: SemanticClass,
    pub overlay_verdict: SemanticClass,
    pub is_advertisement: bool,
}

/// Read `KEY: value` lines. Keys are case-insensitive; missing keys give
/// `Unknown` verdicts, an absent summary and `is_advertisement = false`.
pub fn parse_classify_reply(text: &str) -> ClassifyReply {
    let mut reply = ClassifyReply::default();
    let mut summary_lines: Vec<&str> = Vec::new();
    let mut in_summary = false;
    for line in text.lines() {
        let Some((key, value)) = line.split_once(':') else {
            if in_summary && !line.trim().is_empty() {
                summary_lines.push(line.trim());
            }
            continue;
        };
        let key = key.trim().trim_start_matches(['*', '#', '-', ' ']).trim_end_matches('*');
        in_summary = false;
        match key.to_ascii_uppercase().as_str() {
            "SUMMARY" => {
                in_summary = true;
                summary_lines.push(value.trim());
            }
            "TRANSCRIPT_VERDICT" => reply.transcript_verdict = extract_verdict(value),
            "SUMMARY_VERDICT" => reply.summary_verdict = extract_verdict(value),
            "OVERLAY_VERDICT" => reply.overlay_verdict = extract_verdict(value),
            "ADVERTISEMENT" => reply.is_advertisement = extract_yes_no(value).unwrap_or(false),
            _ => {
                if in_summary {
                    summary_lines.push(line.trim());
                }
            }
        }
    }
    let summary = summary_lines.join(" ").trim().to_string();
    reply.summary = (!summary.is_empty()).then_some(summary);
    reply
}

//! Prompt templates with `{name}` placeholders and decoding parameters.
//! `{{` and `}}` produce literal braces.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("template {template} has no placeholder {name}")]
    UnknownPlaceholder { template: String, name: String },
    #[error("template {template} needs a value for {name}")]
    MissingValue { template: String, name: String },
    #[error("template {template} has an unterminated placeholder")]
    Unterminated { template: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub name: String,
    pub template: String,
    pub temperature: f64,
    pub stop: Vec<String>,
    pub max_tokens: u32,
}

enum Piece<'a> {
    Text(&'a str),
    Brace(char),
    Slot(&'a str),
}

impl PromptTemplate {
    fn pieces(&self) -> Result<Vec<Piece<'_>>, PromptError> {
        let t = self.template.as_str();
        let mut out = Vec::new();
        let mut rest = t;
        while let Some(pos) = rest.find(['{', '}']) {
            out.push(Piece::Text(&rest[..pos]));
            let tail = &rest[pos..];
            if let Some(after) = tail.strip_prefix("{{") {
                out.push(Piece::Brace('{'));
                rest = after;
            } else if let Some(after) = tail.strip_prefix("}}") {
                out.push(Piece::Brace('}'));
                rest = after;
            } else if tail.starts_with('{') {
                let end = tail
                    .find('}')
                    .ok_or_else(|| PromptError::Unterminated { template: self.name.clone() })?;
                out.push(Piece::Slot(&tail[1..end]));
                rest = &tail[end + 1..];
            } else {
                // Lone '}' is literal.
                out.push(Piece::Brace('}'));
                rest = &tail[1..];
            }
        }
        out.push(Piece::Text(rest));
        Ok(out)
    }

    pub fn placeholders(&self) -> Result<BTreeSet<String>, PromptError> {
        Ok(self
            .pieces()?
            .into_iter()
            .filter_map(|p| match p {
                Piece::Slot(name) => Some(name.to_string()),
                _ => None,
            })
            .collect())
    }

    /// Fill every placeholder. Values for names the template does not
    /// contain are an error, as are placeholders without a value.
    pub fn render(&self, values: &BTreeMap<&str, &str>) -> Result<String, PromptError> {
        let slots = self.placeholders()?;
        if let Some(name) = values.keys().find(|k| !slots.contains(**k)) {
            return Err(PromptError::UnknownPlaceholder {
                template: self.name.clone(),
                name: name.to_string(),
            });
        }
        let mut out = String::with_capacity(self.template.len());
        for piece in self.pieces()? {
            match piece {
                Piece::Text(text) => out.push_str(text),
                Piece::Brace(c) => out.push(c),
                Piece::Slot(name) => out.push_str(values.get(name).ok_or_else(|| {
                    PromptError::MissingValue {
                        template: self.name.clone(),
                        name: name.to_string(),
                    }
                })?),
            }
        }
        Ok(out)
    }
}

/// Summarize-and-classify prompt for the text LLM.
pub fn classify_template() -> PromptTemplate {
    PromptTemplate {
        name: "summarize_and_classify".into(),
        template: CLASSIFY.into(),
        temperature: 0.0,
        stop: vec!["\n\n\n".into()],
        max_tokens: 400,
    }
}

/// Per-frame caption instruction for the vision-language model.
pub const CAPTION_PROMPT: &str =
    "Describe the people, objects, text and scene in this video frame in one sentence.";

const CLASSIFY: &str = "\
You help professional fact-checkers triage short social-media videos.

Frame captions, in order:
{captions}

Speech transcript:
{transcript}

On-screen text:
{overlay_text}

1. Summarize what the video shows and says in two or three sentences.
2. Classify the transcript, the summary and the on-screen text separately as one of:
   political, hostile, benign, promotional, contentious-issue.
   Write n/a for an input marked (none).
3. State whether the video is an advertisement.

Answer in exactly this format:
SUMMARY: <summary>
TRANSCRIPT_VERDICT: <class>
SUMMARY_VERDICT: <class>
OVERLAY_VERDICT: <class>
ADVERTISEMENT: <yes or no>
";

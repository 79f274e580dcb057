use std::collections::BTreeMap;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompt::{classify_template, CAPTION_PROMPT};
use super::transport::BackendClient;
use super::verdict::parse_classify_reply;
use super::InferenceError;
use crate::media::{wav, FrameSample};
use crate::model::SemanticClass;

pub mod tasks {
    pub const TRANSCRIBE: &str = "transcribe";
    pub const OCR: &str = "ocr";
    pub const CAPTION: &str = "caption";
    pub const GENERATE: &str = "generate";
    pub const DEEPFAKE: &str = "deepfake";
    pub const DETECT_CLAIMS: &str = "detect_claims";
    pub const FACT_CHECK: &str = "fact_check";
}

pub(crate) fn decode_output<T: DeserializeOwned>(
    client: &BackendClient,
    output: Value,
) -> Result<T, InferenceError> {
    serde_json::from_value(output).map_err(|e| InferenceError::BadResponse {
        backend: client.name().to_string(),
        reason: e.to_string(),
    })
}

fn bad(client: &BackendClient, reason: impl Into<String>) -> InferenceError {
    InferenceError::BadResponse { backend: client.name().to_string(), reason: reason.into() }
}

fn frames_json(frames: &[FrameSample]) -> Value {
    Value::Array(
        frames
            .iter()
            .map(|f| json!({ "index": f.index, "png_b64": B64.encode(&f.image_bytes) }))
            .collect(),
    )
}

fn require_frames(frames: &[FrameSample], what: &str) -> Result<(), InferenceError> {
    if frames.is_empty() {
        return Err(InferenceError::EmptyInput(format!("{what} needs at least one frame")));
    }
    Ok(())
}

/// Loose BCP-47 shape check: alphanumeric subtags of 1-8 chars, primary
/// subtag alphabetic.
pub fn is_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let primary = parts.next().unwrap_or("");
    (2..=8).contains(&primary.len())
        && primary.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| (1..=8).contains(&p.len()) && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcription {
    pub text: String,
    pub detected_lang: String,
    pub segments: Vec<Segment>,
}

#[derive(Deserialize)]
struct TranscribeOutput {
    #[serde(default)]
    language: Option<String>,
    #[serde(default)]
    segments: Vec<Segment>,
}

/// `transcribe`: `{audio_wav_b64, language_hint}` →
/// `{language, segments: [{start, end, text}]}`.
pub async fn transcribe(
    client: &BackendClient,
    audio: &Path,
    lang_hint: Option<&str>,
) -> Result<Transcription, InferenceError> {
    wav::check_contract(audio).map_err(InferenceError::BadAudio)?;
    let bytes = tokio::fs::read(audio)
        .await
        .map_err(|e| InferenceError::BadAudio(format!("{}: {e}", audio.display())))?;
    let input = json!({ "audio_wav_b64": B64.encode(&bytes), "language_hint": lang_hint });
    let out: TranscribeOutput = decode_output(client, client.call(tasks::TRANSCRIBE, input).await?)?;
    let detected_lang = out.language.filter(|l| !l.is_empty()).unwrap_or_else(|| "und".into());
    if !is_language_tag(&detected_lang) {
        return Err(bad(client, format!("{detected_lang:?} is not a language tag")));
    }
    for s in &out.segments {
        if !(s.start.is_finite() && s.end.is_finite() && s.start <= s.end) {
            return Err(bad(client, format!("segment [{}, {}] is not an interval", s.start, s.end)));
        }
    }
    let text = out
        .segments
        .iter()
        .map(|s| s.text.trim())
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join(" ");
    Ok(Transcription { text, detected_lang, segments: out.segments })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameText {
    pub index: usize,
    pub text: String,
    /// `[x, y, width, height]` in pixels.
    #[serde(default)]
    pub boxes: Vec<[u32; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcrResult {
    pub overlay_text: String,
    pub per_frame: Vec<FrameText>,
}

#[derive(Deserialize)]
struct OcrOutput {
    frames: Vec<FrameText>,
}

/// Join frame texts in frame order, collapsing consecutive repeats.
pub fn join_overlay(per_frame: &[FrameText]) -> String {
    let mut parts: Vec<&str> = Vec::new();
    for frame in per_frame {
        let text = frame.text.trim();
        if !text.is_empty() && parts.last() != Some(&text) {
            parts.push(text);
        }
    }
    parts.join(" | ")
}

/// `ocr`: `{frames: [{index, png_b64}]}` → `{frames: [{index, text, boxes}]}`.
pub async fn ocr_frames(
    client: &BackendClient,
    frames: &[FrameSample],
) -> Result<OcrResult, InferenceError> {
    require_frames(frames, "ocr")?;
    let input = json!({ "frames": frames_json(frames) });
    let out: OcrOutput = decode_output(client, client.call(tasks::OCR, input).await?)?;
    let by_index: BTreeMap<usize, FrameText> =
        out.frames.into_iter().map(|f| (f.index, f)).collect();
    let per_frame = frames
        .iter()
        .map(|f| {
            by_index.get(&f.index).cloned().unwrap_or(FrameText {
                index: f.index,
                text: String::new(),
                boxes: vec![],
            })
        })
        .collect::<Vec<_>>();
    Ok(OcrResult { overlay_text: join_overlay(&per_frame), per_frame })
}

#[derive(Deserialize)]
struct CaptionOutput {
    captions: Vec<String>,
}

/// `caption`: `{prompt, frames}` → `{captions: [..]}`, one per frame.
pub async fn caption_frames(
    client: &BackendClient,
    frames: &[FrameSample],
) -> Result<Vec<String>, InferenceError> {
    require_frames(frames, "caption")?;
    let input = json!({ "prompt": CAPTION_PROMPT, "frames": frames_json(frames) });
    let out: CaptionOutput = decode_output(client, client.call(tasks::CAPTION, input).await?)?;
    if out.captions.len() != frames.len() {
        return Err(bad(
            client,
            format!("{} captions for {} frames", out.captions.len(), frames.len()),
        ));
    }
    Ok(out.captions)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub video_summary: Option<String>,
    pub transcript_verdict: SemanticClass,
    pub summary_verdict: SemanticClass,
    pub overlay_verdict: SemanticClass,
    pub is_advertisement: bool,
    /// Unparsed model reply, kept for reviewers.
    pub raw: String,
}

#[derive(Deserialize)]
struct GenerateOutput {
    text: String,
}

/// `generate`: `{prompt, temperature, stop, max_tokens}` → `{text}`.
pub async fn generate(
    client: &BackendClient,
    template: &super::PromptTemplate,
    prompt: String,
) -> Result<String, InferenceError> {
    let input = json!({
        "prompt": prompt,
        "temperature": template.temperature,
        "stop": template.stop,
        "max_tokens": template.max_tokens,
    });
    let out: GenerateOutput = decode_output(client, client.call(tasks::GENERATE, input).await?)?;
    Ok(out.text)
}

fn or_none(text: &str) -> &str {
    if text.trim().is_empty() {
        "(none)"
    } else {
        text.trim()
    }
}

/// The rendered classification prompt, exposed for cache fingerprints.
pub fn classify_prompt(
    captions: &[String],
    transcript: &str,
    overlay_text: &str,
) -> Result<String, InferenceError> {
    let caption_lines = captions
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.trim().is_empty())
        .map(|(i, c)| format!("[{i}] {}", c.trim()))
        .collect::<Vec<_>>()
        .join("\n");
    let values = BTreeMap::from([
        ("captions", or_none(&caption_lines)),
        ("transcript", or_none(transcript)),
        ("overlay_text", or_none(overlay_text)),
    ]);
    Ok(classify_template().render(&values)?)
}

/// One LLM call returning summary, three verdicts and the ad flag. A verdict
/// whose input text is empty is `Unknown` whatever the model says.
pub async fn summarize_and_classify(
    client: &BackendClient,
    captions: &[String],
    transcript: &str,
    overlay_text: &str,
) -> Result<Classification, InferenceError> {
    let no_captions = captions.iter().all(|c| c.trim().is_empty());
    if no_captions && transcript.trim().is_empty() && overlay_text.trim().is_empty() {
        return Err(InferenceError::EmptyInput(
            "captions, transcript and overlay text are all empty".into(),
        ));
    }
    let prompt = classify_prompt(captions, transcript, overlay_text)?;
    let raw = generate(client, &classify_template(), prompt).await?;
    let reply = parse_classify_reply(&raw);
    let gate = |present: bool, class: SemanticClass| if present { class } else { SemanticClass::Unknown };
    Ok(Classification {
        transcript_verdict: gate(!transcript.trim().is_empty(), reply.transcript_verdict),
        summary_verdict: gate(reply.summary.is_some(), reply.summary_verdict),
        overlay_verdict: gate(!overlay_text.trim().is_empty(), reply.overlay_verdict),
        video_summary: reply.summary,
        is_advertisement: reply.is_advertisement,
        raw,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameScore {
    pub index: usize,
    pub face_detected: bool,
    #[serde(default)]
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeepfakeResult {
    /// Mean over face-bearing frames; `None` when no frame shows a face.
    pub score: Option<f64>,
    pub per_frame: Vec<FrameScore>,
}

#[derive(Deserialize)]
struct DeepfakeOutput {
    frames: Vec<FrameScore>,
}

pub fn video_score(per_frame: &[FrameScore]) -> Option<f64> {
    let scores: Vec<f64> =
        per_frame.iter().filter(|f| f.face_detected).filter_map(|f| f.score).collect();
    (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64)
}

/// `deepfake`: `{frames}` → `{frames: [{index, face_detected, score}]}`.
pub async fn deepfake_score(
    client: &BackendClient,
    frames: &[FrameSample],
) -> Result<DeepfakeResult, InferenceError> {
    require_frames(frames, "deepfake")?;
    let input = json!({ "frames": frames_json(frames) });
    let out: DeepfakeOutput = decode_output(client, client.call(tasks::DEEPFAKE, input).await?)?;
    for f in &out.frames {
        match f.score {
            Some(s) if !(0.0..=1.0).contains(&s) => {
                return Err(bad(client, format!("frame {} score {s} outside [0,1]", f.index)))
            }
            None if f.face_detected => {
                return Err(bad(client, format!("frame {} has a face but no score", f.index)))
            }
            _ => {}
        }
    }
    Ok(DeepfakeResult { score: video_score(&out.frames), per_frame: out.frames })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(index: usize, t: &str) -> FrameText {
        FrameText { index, text: t.into(), boxes: vec![] }
    }

    #[test]
    fn overlay_collapses_consecutive_repeats_only() {
        let frames = [text(0, "a"), text(1, "a "), text(2, ""), text(3, "b"), text(4, "a")];
        assert_eq!(join_overlay(&frames), "a | b | a");
        assert_eq!(join_overlay(&[text(0, ""), text(1, "  ")]), "");
    }

    #[test]
    fn mean_of_face_frames() {
        let f = |index, face, score| FrameScore { index, face_detected: face, score };
        assert_eq!(video_score(&[f(0, true, Some(0.2)), f(1, true, Some(0.8))]), Some(0.5));
        assert_eq!(video_score(&[f(0, false, Some(0.9)), f(1, true, Some(0.4))]), Some(0.4));
        assert_eq!(video_score(&[f(0, false, None)]), None);
    }

    #[test]
    fn language_tags() {
        for ok in ["ar", "en", "nb-NO", "zh-Hant-TW", "und"] {
            assert!(is_language_tag(ok), "{ok}");
        }
        for bad in ["", "a", "english language", "en_US", "12"] {
            assert!(!is_language_tag(bad), "{bad}");
        }
    }

    #[test]
    fn prompt_marks_missing_inputs() {
        let p = classify_prompt(&["a street".into(), "".into()], "", "Hello").unwrap();
        assert!(p.contains("[0] a street"));
        assert!(p.contains("Speech transcript:\n(none)"));
        assert!(p.contains("On-screen text:\nHello"));
    }
}

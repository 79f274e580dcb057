//! Deterministic fixtures: the Beirut example clip with scripted backends,
//! synthetic labelled datasets and deepfake benches.
//!
//! Everything here is reproducible from code; `examples/make_fixtures.rs`
//! writes the committed copies under `fixtures/`.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::buzzword::{sample_lexicons, Lexicons};
use crate::eval::deepfake::BenchItem;
use crate::eval::{Dataset, DatasetRecord, DeepfakeBench};
use crate::inference::mock::{MockReply, MockRequest};
use crate::inference::tasks;
use crate::media::y4m::Y4mWriter;
use crate::media::{encode_png, wav, FrameSample};
use crate::model::{ClaimCheckResult, Label, ModalitySignals, SemanticClass, Stance, TextSource};

pub const BEIRUT_OVERLAY_FIRST: &str = "Someone captured the";
pub const BEIRUT_OVERLAY_SECOND: &str = "missile in the Beirut blast";
/// "It's a shame".
pub const BEIRUT_TRANSCRIPT: &str = "يا حرام";
pub const BEIRUT_SUMMARY: &str = "The video captures footage of the 2020 Beirut blast, showing destruction and chaos in an urban area, with explosions visible throughout.";
pub const BEIRUT_REPLY: &str = "SUMMARY: The video captures footage of the 2020 Beirut blast, showing destruction and chaos in an urban area, with explosions visible throughout.
TRANSCRIPT_VERDICT: hostile
SUMMARY_VERDICT: contentious-issue
OVERLAY_VERDICT: hostile
ADVERTISEMENT: no";

const BEIRUT_W: usize = 64;
const BEIRUT_H: usize = 36;
const BEIRUT_FPS: usize = 1;
const BEIRUT_FRAMES: usize = 12;

fn beirut_frame(k: usize) -> Vec<u8> {
    let mut rgb = Vec::with_capacity(BEIRUT_W * BEIRUT_H * 3);
    for y in 0..BEIRUT_H {
        for x in 0..BEIRUT_W {
            let px = if k < BEIRUT_FRAMES / 2 {
                // Dusk skyline with a grey plume.
                let plume = (x as i32 - 40).pow(2) + (y as i32 - 10).pow(2) < 80 + 6 * k as i32;
                if y > 24 {
                    [40, 40, 50]
                } else if plume {
                    [150, 150, 150]
                } else {
                    [60, 70, 110 + (y as u8)]
                }
            } else {
                // Fireball over the harbour.
                let r = (x as i32 - 32).pow(2) + (y as i32 - 14).pow(2);
                if r < 120 + 10 * k as i32 {
                    [250, 200, 80]
                } else {
                    [230, 120, 40]
                }
            };
            rgb.extend_from_slice(&px);
        }
    }
    rgb
}

fn beirut_audio() -> Vec<f32> {
    // 3 s of a tone mixture with a slow envelope: noisy speech stand-in.
    let rate = 8_000.0f32;
    (0..24_000)
        .map(|n| {
            let t = n as f32 / rate;
            let env = (std::f32::consts::PI * t / 3.0).sin();
            0.3 * env * ((2.0 * std::f32::consts::PI * 220.0 * t).sin() + 0.5 * (2.0 * std::f32::consts::PI * 575.0 * t).sin())
        })
        .collect()
}

/// Write `beirut.y4m` and its sidecar `beirut.wav` into `dir`. Returns the
/// clip path.
pub fn write_beirut_clip(dir: &Path) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join("beirut.y4m");
    let file = std::io::BufWriter::new(std::fs::File::create(&path)?);
    let mut writer = Y4mWriter::new(file, BEIRUT_W, BEIRUT_H, BEIRUT_FPS)?;
    for k in 0..BEIRUT_FRAMES {
        writer.write_rgb(&beirut_frame(k))?;
    }
    drop(writer);
    wav::write_pcm16(&dir.join("beirut.wav"), 8_000, &beirut_audio())
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(path)
}

/// Decode a PNG to packed RGB8. Grey and alpha channels are expanded or
/// dropped.
pub fn png_rgb(bytes: &[u8]) -> Option<(u32, u32, Vec<u8>)> {
    let mut decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info().ok()?;
    let mut buf = vec![0; reader.output_buffer_size()?];
    let info = reader.next_frame(&mut buf).ok()?;
    buf.truncate(info.buffer_size());
    let rgb = match info.color_type {
        png::ColorType::Rgb => buf,
        png::ColorType::Rgba => buf.chunks_exact(4).flat_map(|p| [p[0], p[1], p[2]]).collect(),
        png::ColorType::Grayscale => buf.iter().flat_map(|&g| [g, g, g]).collect(),
        png::ColorType::GrayscaleAlpha => buf.chunks_exact(2).flat_map(|p| [p[0], p[0], p[0]]).collect(),
        png::ColorType::Indexed => return None,
    };
    Some((info.width, info.height, rgb))
}

fn frame_pngs(input: &Value) -> Vec<(u64, Vec<u8>)> {
    input["frames"]
        .as_array()
        .map(|frames| {
            frames
                .iter()
                .map(|f| {
                    let png = f["png_b64"].as_str().and_then(|s| B64.decode(s).ok()).unwrap_or_default();
                    (f["index"].as_u64().unwrap_or(0), png)
                })
                .collect()
        })
        .unwrap_or_default()
}

/// True for frames from the second half of the Beirut clip.
fn is_fireball(png: &[u8]) -> bool {
    png_rgb(png).is_some_and(|(_, _, rgb)| {
        let reds: u64 = rgb.chunks_exact(3).map(|p| p[0] as u64).sum();
        reds / (rgb.len() as u64 / 3).max(1) > 150
    })
}

/// Backend behaviour behind the Beirut example: Arabic speech, a two-part
/// overlay caption, blast footage, no faces and no check-worthy sentences.
pub fn beirut_script() -> impl Fn(&MockRequest) -> MockReply + Send + Sync + 'static {
    |req: &MockRequest| match req.task.as_str() {
        tasks::TRANSCRIBE => MockReply::ok(json!({
            "language": "ar",
            "segments": [{"start": 0.4, "end": 1.6, "text": BEIRUT_TRANSCRIPT}],
        })),
        tasks::OCR => {
            let frames: Vec<Value> = frame_pngs(&req.input)
                .into_iter()
                .map(|(index, png)| {
                    let text = if is_fireball(&png) { BEIRUT_OVERLAY_SECOND } else { BEIRUT_OVERLAY_FIRST };
                    json!({"index": index, "text": text, "boxes": [[4, 26, 56, 8]]})
                })
                .collect();
            MockReply::ok(json!({ "frames": frames }))
        }
        tasks::CAPTION => {
            let captions: Vec<&str> = frame_pngs(&req.input)
                .iter()
                .map(|(_, png)| {
                    if is_fireball(png) {
                        "A large orange explosion over a harbour with a shockwave spreading."
                    } else {
                        "A city skyline at dusk with a column of grey smoke rising."
                    }
                })
                .collect();
            MockReply::ok(json!({ "captions": captions }))
        }
        tasks::GENERATE => MockReply::ok(json!({ "text": BEIRUT_REPLY })),
        tasks::DEEPFAKE => {
            let frames: Vec<Value> = frame_pngs(&req.input)
                .into_iter()
                .map(|(index, _)| json!({"index": index, "face_detected": false, "score": null}))
                .collect();
            MockReply::ok(json!({ "frames": frames }))
        }
        tasks::DETECT_CLAIMS => {
            let n = req.input["sentences"].as_array().map_or(0, Vec::len);
            MockReply::ok(json!({ "checkworthy": vec![false; n] }))
        }
        tasks::FACT_CHECK => {
            MockReply::ok(json!({"label": "no evidence", "evidence": [], "confidence": 0.0}))
        }
        _ => MockReply::status(400),
    }
}

// Synthetic labelled datasets.

/// Signal patterns used to build synthetic records. Scores under the
/// default weights are given for orientation only; tests recompute them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Hostile speech and hostile overlay.
    HostilePair,
    /// Contentious summary plus a buzzword in the speech.
    SummaryBuzzword,
    /// A fact-check refutes a claim.
    RefutedClaim,
    /// Political speech plus a high deepfake score.
    DeepfakePolitical,
    /// Every verdict flags.
    AllFlags,
    Benign,
    /// Hostile overlay and nothing else.
    LoneOverlay,
    /// Political content inside an advertisement.
    Advert,
    /// A supported claim and nothing else.
    SupportedClaim,
    /// Benign footage with a low deepfake score.
    LowDeepfake,
    /// No speech, no overlay.
    Silent,
    /// Buzzword plus hostile speech.
    BuzzwordHostile,
    /// Hostile speech and nothing else.
    HostileOnly,
}

struct Texts {
    hostile: &'static [&'static str],
    political: &'static [&'static str],
    benign: &'static [&'static str],
    buzz: &'static [&'static str],
    overlay_hostile: &'static [&'static str],
    summary_contentious: &'static [&'static str],
    summary_benign: &'static [&'static str],
    claim: &'static [&'static str],
    advert: &'static [&'static str],
}

const NB: Texts = Texts {
    hostile: &[
        "De skal få svi for dette, alle sammen.",
        "Disse folkene burde kastes ut av landet i morgen.",
        "Skam dere, dere er landsforrædere hele gjengen.",
    ],
    political: &[
        "Regjeringen bryter løftene sine om skatt igjen.",
        "Stortinget stemmer over den nye loven i neste uke.",
    ],
    benign: &[
        "I dag baker vi boller med kardemomme.",
        "Se så fin utsikt det er fra toppen av fjellet.",
        "Hunden min elsker å bade i sjøen.",
    ],
    buzz: &[
        "Vi må stoppe snikislamisering før det er for sent.",
        "Folkeutskiftning skjer rett foran øynene våre.",
        "Husk å stem FRP ved valget!",
        "Eliten i Oslo bryr seg ikke om oss.",
    ],
    overlay_hostile: &["SKAM DERE", "De lyver til oss alle", "Ut med dem"],
    summary_contentious: &[
        "A speaker at a rally talks about immigration policy.",
        "A man films a protest outside parliament and comments on it.",
    ],
    summary_benign: &["A person cooks in a home kitchen.", "A dog runs along a beach."],
    claim: &["Skatten økte med ti prosent i fjor.", "Halvparten av alle nye boliger står tomme."],
    advert: &["Kjøp den nye telefonen nå, bare i dag!", "Bruk rabattkoden min for 20 prosent avslag."],
};

const EN: Texts = Texts {
    hostile: &[
        "They should all pay for what they did.",
        "Get these people out of our country right now.",
        "Shame on you, every last one of you traitors.",
    ],
    political: &[
        "The senator voted against the bill again this morning.",
        "The government is raising taxes behind closed doors.",
    ],
    benign: &[
        "Today we are baking sourdough bread together.",
        "Look at the view from the top of the trail.",
        "My cat learned a new trick this week.",
    ],
    buzz: &[
        "This is the great replacement and nobody talks about it.",
        "The deep state is running everything now.",
        "Wake up sheeple, it is all staged.",
        "Stop the steal before it happens again.",
    ],
    overlay_hostile: &["SHAME ON THEM", "They are lying to you", "Kick them out"],
    summary_contentious: &[
        "A speaker at a rally talks about immigration policy.",
        "A woman films a protest outside a courthouse and comments on it.",
    ],
    summary_benign: &["A person cooks in a home kitchen.", "A cat plays with a toy."],
    claim: &["Crime went up forty percent last year.", "Half of all new homes are empty."],
    advert: &["Buy the new phone today, limited offer!", "Use my discount code for twenty percent off."],
};

fn pick(options: &[&'static str], k: usize) -> String {
    options[k % options.len()].to_string()
}

fn claim_result(text: String, stance: Stance, k: usize) -> ClaimCheckResult {
    ClaimCheckResult {
        claim_text: text,
        stance,
        evidence_refs: vec![format!("https://factcheck.example/{k}")],
        confidence: 0.8,
        warning: None,
    }
}

/// Signals for one synthetic record. Buzzword hits come from running the
/// bundled lexicons over the text, so spans are real.
pub fn pattern_signals(pattern: Pattern, lang: &str, k: usize) -> ModalitySignals {
    use SemanticClass::*;
    let t = if lang == "nb" { &NB } else { &EN };
    let mut s = ModalitySignals {
        transcript_lang: Some(lang.to_string()),
        ..Default::default()
    };
    let speech = |s: &mut ModalitySignals, text: String, verdict: SemanticClass| {
        s.transcript = Some(text);
        s.transcript_verdict = verdict;
    };
    match pattern {
        Pattern::HostilePair => {
            speech(&mut s, pick(t.hostile, k), Hostile);
            s.overlay_text = Some(pick(t.overlay_hostile, k));
            s.overlay_verdict = Hostile;
            s.video_summary = Some(pick(t.summary_benign, k));
            s.summary_verdict = Benign;
        }
        Pattern::SummaryBuzzword => {
            speech(&mut s, pick(t.buzz, k), Unknown);
            s.video_summary = Some(pick(t.summary_contentious, k));
            s.summary_verdict = ContentiousIssue;
        }
        Pattern::RefutedClaim => {
            let claim = pick(t.claim, k);
            speech(&mut s, claim.clone(), Benign);
            s.claim_results = vec![claim_result(claim, if k.is_multiple_of(2) { Stance::Refuted } else { Stance::Disputed }, k)];
        }
        Pattern::DeepfakePolitical => {
            speech(&mut s, pick(t.political, k), Political);
            s.deepfake_score = Some(0.8 + (k % 5) as f64 * 0.03);
        }
        Pattern::AllFlags => {
            speech(&mut s, pick(t.hostile, k), Hostile);
            s.overlay_text = Some(pick(t.overlay_hostile, k));
            s.overlay_verdict = Hostile;
            s.video_summary = Some(pick(t.summary_contentious, k));
            s.summary_verdict = Political;
        }
        Pattern::Benign => {
            speech(&mut s, pick(t.benign, k), Benign);
            s.video_summary = Some(pick(t.summary_benign, k));
            s.summary_verdict = Benign;
        }
        Pattern::LoneOverlay => {
            s.overlay_text = Some(pick(t.overlay_hostile, k));
            s.overlay_verdict = Hostile;
            s.video_summary = Some(pick(t.summary_benign, k));
            s.summary_verdict = Benign;
        }
        Pattern::Advert => {
            speech(&mut s, pick(t.advert, k), Political);
            s.video_summary = Some(pick(t.summary_contentious, k));
            s.summary_verdict = ContentiousIssue;
            s.is_advertisement = true;
        }
        Pattern::SupportedClaim => {
            let claim = pick(t.claim, k);
            speech(&mut s, claim.clone(), Benign);
            s.claim_results = vec![claim_result(claim, Stance::Supported, k)];
        }
        Pattern::LowDeepfake => {
            speech(&mut s, pick(t.benign, k), Benign);
            s.deepfake_score = Some(0.1 + (k % 3) as f64 * 0.1);
        }
        Pattern::Silent => {
            s.transcript = Some(String::new());
            s.transcript_lang = Some("und".into());
            s.video_summary = Some(pick(t.summary_benign, k));
            s.summary_verdict = Benign;
        }
        Pattern::BuzzwordHostile => speech(&mut s, pick(t.buzz, k), Hostile),
        Pattern::HostileOnly => speech(&mut s, pick(t.hostile, k), Hostile),
    }
    static LEXICONS: OnceLock<Lexicons> = OnceLock::new();
    let lexicons = LEXICONS.get_or_init(sample_lexicons);
    if let Some(text) = &s.transcript {
        s.buzzword_hits.extend(lexicons.detect(text, TextSource::Transcript));
    }
    if let Some(text) = &s.overlay_text {
        s.buzzword_hits.extend(lexicons.detect(text, TextSource::Overlay));
    }
    s
}

/// Build a dataset from `(gold, pattern, count)` groups, shuffled with `seed`
/// (no shuffle when `None`). Ids are `<prefix>-NNNN` in final order.
pub fn build_dataset(
    name: &str,
    prefix: &str,
    lang: &str,
    groups: &[(Label, Pattern, usize)],
    seed: Option<u64>,
) -> Dataset {
    let mut rows: Vec<(Label, Pattern, usize)> = Vec::new();
    for &(gold, pattern, count) in groups {
        for k in 0..count {
            rows.push((gold, pattern, k));
        }
    }
    if let Some(seed) = seed {
        rows.shuffle(&mut StdRng::seed_from_u64(seed));
    }
    let records = rows
        .into_iter()
        .enumerate()
        .map(|(i, (gold, pattern, k))| DatasetRecord {
            video_id: format!("{prefix}-{:04}", i + 1),
            gold_label: gold,
            language: lang.to_string(),
            signals: Some(pattern_signals(pattern, lang, k)),
            media: None,
        })
        .collect();
    Dataset { name: name.to_string(), records }
}

use Label::{Checkworthy as CW, NotCheckworthy as NCW};

/// 20 English records: 8 checkworthy, 12 not.
pub const SYNTH20: &[(Label, Pattern, usize)] = &[
    (CW, Pattern::HostilePair, 2),
    (CW, Pattern::SummaryBuzzword, 1),
    (CW, Pattern::RefutedClaim, 1),
    (CW, Pattern::DeepfakePolitical, 1),
    (CW, Pattern::AllFlags, 1),
    (CW, Pattern::LoneOverlay, 1),
    (CW, Pattern::Advert, 1),
    (NCW, Pattern::HostilePair, 1),
    (NCW, Pattern::SummaryBuzzword, 1),
    (NCW, Pattern::DeepfakePolitical, 1),
    (NCW, Pattern::Benign, 3),
    (NCW, Pattern::SupportedClaim, 2),
    (NCW, Pattern::LowDeepfake, 1),
    (NCW, Pattern::Silent, 1),
    (NCW, Pattern::LoneOverlay, 1),
    (NCW, Pattern::Advert, 1),
];

/// Norwegian set: 33 checkworthy, 204 not.
pub const SYNTH_NB: &[(Label, Pattern, usize)] = &[
    (CW, Pattern::HostilePair, 8),
    (CW, Pattern::SummaryBuzzword, 7),
    (CW, Pattern::RefutedClaim, 5),
    (CW, Pattern::DeepfakePolitical, 3),
    (CW, Pattern::AllFlags, 5),
    (CW, Pattern::LoneOverlay, 3),
    (CW, Pattern::Advert, 2),
    (NCW, Pattern::HostilePair, 6),
    (NCW, Pattern::SummaryBuzzword, 4),
    (NCW, Pattern::AllFlags, 2),
    (NCW, Pattern::RefutedClaim, 2),
    (NCW, Pattern::DeepfakePolitical, 2),
    (NCW, Pattern::Benign, 80),
    (NCW, Pattern::LoneOverlay, 30),
    (NCW, Pattern::Advert, 20),
    (NCW, Pattern::SupportedClaim, 20),
    (NCW, Pattern::LowDeepfake, 18),
    (NCW, Pattern::Silent, 20),
];

/// English set: 114 checkworthy, 140 not.
pub const SYNTH_EN: &[(Label, Pattern, usize)] = &[
    (CW, Pattern::HostilePair, 20),
    (CW, Pattern::SummaryBuzzword, 14),
    (CW, Pattern::RefutedClaim, 12),
    (CW, Pattern::DeepfakePolitical, 8),
    (CW, Pattern::AllFlags, 12),
    (CW, Pattern::LoneOverlay, 24),
    (CW, Pattern::SupportedClaim, 12),
    (CW, Pattern::Advert, 6),
    (CW, Pattern::Silent, 6),
    (NCW, Pattern::HostilePair, 6),
    (NCW, Pattern::SummaryBuzzword, 4),
    (NCW, Pattern::RefutedClaim, 2),
    (NCW, Pattern::AllFlags, 2),
    (NCW, Pattern::Benign, 50),
    (NCW, Pattern::LoneOverlay, 20),
    (NCW, Pattern::Advert, 16),
    (NCW, Pattern::SupportedClaim, 16),
    (NCW, Pattern::LowDeepfake, 12),
    (NCW, Pattern::Silent, 12),
];

/// Classes differ only by a buzzword: checkworthy records carry one on top
/// of hostile speech, the others have hostile speech alone.
pub const BUZZWORD_SEPARATOR: &[(Label, Pattern, usize)] =
    &[(CW, Pattern::BuzzwordHostile, 10), (NCW, Pattern::HostileOnly, 10)];

pub fn synth20() -> Dataset {
    build_dataset("synth20", "s20", "en", SYNTH20, None)
}

pub fn synthetic_nb() -> Dataset {
    build_dataset("synthetic-nb", "nb", "nb", SYNTH_NB, Some(237))
}

pub fn synthetic_en() -> Dataset {
    build_dataset("synthetic-en", "en", "en", SYNTH_EN, Some(254))
}

pub fn buzzword_separator() -> Dataset {
    build_dataset("buzzword-separator", "bz", "en", BUZZWORD_SEPARATOR, Some(7))
}

// Deepfake benches.

/// A 4x4 PNG whose pixels encode `id`, so scripted backends can tell frames
/// apart.
pub fn bench_frame(id: u32, fake: bool) -> FrameSample {
    let px = [(id & 0xff) as u8, ((id >> 8) & 0xff) as u8, if fake { 200 } else { 50 }];
    let rgb: Vec<u8> = px.iter().copied().cycle().take(4 * 4 * 3).collect();
    FrameSample { index: 0, timestamp_s: 0.0, image_bytes: encode_png(4, 4, &rgb), width: 4, height: 4 }
}

/// Inverse of [`bench_frame`].
pub fn bench_frame_id(png: &[u8]) -> Option<u32> {
    let (_, _, rgb) = png_rgb(png)?;
    (rgb.len() >= 3).then(|| rgb[0] as u32 | (rgb[1] as u32) << 8)
}

/// `n_fake` fake items (ids `0..n_fake`) then `n_real` real ones.
pub fn synthetic_bench(name: &str, n_fake: u32, n_real: u32) -> DeepfakeBench {
    let items = (0..n_fake + n_real)
        .map(|id| {
            let fake = id < n_fake;
            BenchItem { id: format!("df-{id:04}"), fake, frames: vec![bench_frame(id, fake)] }
        })
        .collect();
    DeepfakeBench { name: name.to_string(), items }
}

/// Deepfake backend whose per-frame score is `score(backend, frame id)`;
/// `None` means no face.
pub fn deepfake_script(
    score: impl Fn(&str, u32) -> Option<f64> + Send + Sync + 'static,
) -> impl Fn(&MockRequest) -> MockReply + Send + Sync + 'static {
    move |req: &MockRequest| {
        if req.task != tasks::DEEPFAKE {
            return MockReply::status(400);
        }
        let frames: Vec<Value> = frame_pngs(&req.input)
            .into_iter()
            .map(|(index, png)| match bench_frame_id(&png).and_then(|id| score(&req.backend, id)) {
                Some(s) => json!({"index": index, "face_detected": true, "score": s}),
                None => json!({"index": index, "face_detected": false, "score": null}),
            })
            .collect();
        MockReply::ok(json!({ "frames": frames }))
    }
}

/// Backends for the committed 40-item bench (20 fake, 20 real).
pub const BENCH_BACKENDS: [&str; 3] = ["df_strict", "df_loose", "df_always_real"];

pub fn bench_scores(backend: &str, id: u32) -> Option<f64> {
    let fake = id < 20;
    match backend {
        // Misses a quarter of the fakes, never flags a real video.
        "df_strict" => Some(if fake && id % 4 != 3 { 0.9 } else { 0.1 }),
        // Catches every fake, flags every third real video.
        "df_loose" => Some(if fake || id.is_multiple_of(3) { 0.7 } else { 0.3 }),
        "df_always_real" => Some(0.02),
        _ => None,
    }
}

/// Write the bench frames and `bench.jsonl` into `dir`.
pub fn write_bench(dir: &Path, bench: &DeepfakeBench) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir.join("frames"))?;
    let mut lines = String::new();
    for item in &bench.items {
        let mut frames = Vec::new();
        for (k, frame) in item.frames.iter().enumerate() {
            let rel = format!("frames/{}-{k}.png", item.id);
            std::fs::write(dir.join(&rel), &frame.image_bytes)?;
            frames.push(rel);
        }
        let label = if item.fake { "fake" } else { "real" };
        let line = json!({"id": item.id, "label": label, "frames": frames});
        lines.push_str(&String::from_utf8(crate::canonical::value_to_bytes(&line)).expect("JSON is UTF-8"));
        lines.push('\n');
    }
    let path = dir.join("bench.jsonl");
    std::fs::write(&path, lines)?;
    Ok(path)
}

//! End-to-end analysis of one video.
//!
//! ingest → (transcribe ∥ ocr ∥ caption ∥ deepfake) → summarize and classify
//! → buzzwords and claim verification → score → persist. Only ingest errors
//! abort a run; a failing module is recorded as `failed` and its signals
//! stay absent.

use std::collections::BTreeMap;
use std::future::Future;
use std::sync::Arc;
use std::time::Instant;

use crate::buzzword::{sample_lexicons, LexiconError, Lexicons};
use crate::claims;
use crate::config::{backends, modules, validate, PipelineConfig};
use crate::decision;
use crate::inference::{self, prompt, Backends, InferenceError};
use crate::media::{IngestError, Ingestor, MediaBundle, MediaInfo, ResolvedMedia};
use crate::model::{ModalitySignals, SemanticClass, TextSource};
use crate::record::{AnalysisRecord, Intermediates, ModuleReport, ModuleStatus};
use crate::store::{Store, StoreError};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{reason}: {0}", reason = .0.reason())]
    Ingest(#[from] IngestError),
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Backend(#[from] InferenceError),
    #[error("ingest task failed: {0}")]
    Join(String),
}

/// Result of `analyze`: the record, its stored bytes, and whether it came
/// from the cache.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub record: AnalysisRecord,
    pub bytes: Vec<u8>,
    pub cached: bool,
}

pub struct Pipeline {
    config: PipelineConfig,
    backends: Backends,
    ingestor: Arc<Ingestor>,
    lexicons: Lexicons,
    store: Option<Store>,
    digest: String,
}

struct Timed<T> {
    value: Result<T, String>,
    elapsed_ms: u64,
}

async fn timed<T, E: std::fmt::Display>(fut: impl Future<Output = Result<T, E>>) -> Timed<T> {
    let start = Instant::now();
    let value = fut.await.map_err(|e| e.to_string());
    Timed { value, elapsed_ms: start.elapsed().as_millis() as u64 }
}

fn non_empty(text: &str) -> Option<&str> {
    let t = text.trim();
    (!t.is_empty()).then_some(t)
}

impl Pipeline {
    /// Validate `config`, load lexicons (the bundled sample when none are
    /// configured) and build one client per endpoint.
    pub fn new(config: PipelineConfig, store: Option<Store>) -> Result<Self, PipelineError> {
        let problems = validate(&config);
        if !problems.is_empty() {
            return Err(PipelineError::Config(problems));
        }
        let lexicons = if config.lexicon_paths.is_empty() {
            sample_lexicons()
        } else {
            Lexicons::load_all(&config.lexicon_paths)?
        };
        let backends = Backends::from_config(&config)?;
        let ingestor = Arc::new(Ingestor::from_config(&config));
        let extra = BTreeMap::from([
            ("lexicons".to_string(), lexicons.fingerprint()),
            (
                "prompts".to_string(),
                crate::model::content_digest(
                    format!("{}\n{}", prompt::classify_template().template, prompt::CAPTION_PROMPT)
                        .as_bytes(),
                ),
            ),
        ]);
        let digest = config.analysis_digest(&extra);
        Ok(Self { config, backends, ingestor, lexicons, store, digest })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn config_digest(&self) -> &str {
        &self.digest
    }

    pub fn store(&self) -> Option<&Store> {
        self.store.as_ref()
    }

    pub fn ingestor(&self) -> &Ingestor {
        &self.ingestor
    }

    /// Resolve and probe without decoding, for early admission checks.
    pub fn admit(&self, source: &str) -> Result<(ResolvedMedia, MediaInfo), IngestError> {
        let media = self.ingestor.resolve(source)?;
        let info = self.ingestor.probe(&media)?;
        Ok((media, info))
    }

    pub fn cached(&self, video_id: &str) -> Result<Option<Analysis>, PipelineError> {
        let Some(store) = &self.store else { return Ok(None) };
        let Some(bytes) = store.get_analysis_bytes(video_id, &self.digest)? else {
            return Ok(None);
        };
        let path = store.analysis_path(video_id, &self.digest)?;
        let record = Store::decode_analysis(&path, &bytes)?;
        Ok(Some(Analysis { record, bytes, cached: true }))
    }

    pub async fn analyze(&self, source: &str) -> Result<Analysis, PipelineError> {
        let ingestor = self.ingestor.clone();
        let owned = source.to_string();
        let media = tokio::task::spawn_blocking(move || ingestor.resolve(&owned))
            .await
            .map_err(|e| PipelineError::Join(e.to_string()))??;
        self.analyze_resolved(media).await
    }

    pub async fn analyze_resolved(&self, media: ResolvedMedia) -> Result<Analysis, PipelineError> {
        if let Some(hit) = self.cached(&media.id)? {
            tracing::info!(video_id = %media.id, "cache hit");
            return Ok(hit);
        }
        let ingestor = self.ingestor.clone();
        let config = self.config.clone();
        let bundle = tokio::task::spawn_blocking(move || ingestor.ingest_resolved(media, &config))
            .await
            .map_err(|e| PipelineError::Join(e.to_string()))??;
        let record = self.run_modules(&bundle).await;
        let bytes = match &self.store {
            Some(store) => store.put_analysis(&record)?,
            None => crate::canonical::to_bytes(&record).expect("record serializes"),
        };
        // Another writer may have stored this key first; report what is stored.
        let path = std::path::PathBuf::from("<memory>");
        let record = Store::decode_analysis(&path, &bytes)?;
        Ok(Analysis { record, bytes, cached: false })
    }

    fn on(&self, module: &str) -> bool {
        self.config.is_enabled(module)
    }

    async fn run_modules(&self, bundle: &MediaBundle) -> AnalysisRecord {
        let mut reports: BTreeMap<String, ModuleReport> = BTreeMap::new();
        let mut notes: Vec<String> = Vec::new();
        let mut signals = ModalitySignals::default();
        let mut inter = Intermediates {
            frame_timestamps: bundle.frames.iter().map(|f| f.timestamp_s).collect(),
            ..Default::default()
        };
        let record = |reports: &mut BTreeMap<String, ModuleReport>,
                          notes: &mut Vec<String>,
                          name: &str,
                          elapsed_ms: u64,
                          outcome: Result<Option<String>, String>| {
            let report = match outcome {
                Ok(detail) => ModuleReport { status: ModuleStatus::Ok, elapsed_ms, detail },
                Err(e) => {
                    notes.push(format!("{name} failed: {e}"));
                    ModuleReport { status: ModuleStatus::Failed, elapsed_ms, detail: Some(e) }
                }
            };
            reports.insert(name.to_string(), report);
        };

        // Modality extraction, concurrently.
        let frames = &bundle.frames;
        let transcribe = async {
            if !self.on(modules::TRANSCRIPT) {
                return None;
            }
            let Some(audio) = &bundle.audio_path else {
                return Some(Timed { value: Ok(None), elapsed_ms: 0 });
            };
            let client = match self.backends.get(backends::TRANSCRIPTION) {
                Ok(c) => c,
                Err(e) => return Some(Timed { value: Err(e.to_string()), elapsed_ms: 0 }),
            };
            let lang = bundle.video.language_hint.as_deref();
            let t = timed(inference::transcribe(client, audio, lang)).await;
            Some(Timed { value: t.value.map(Some), elapsed_ms: t.elapsed_ms })
        };
        let ocr = async {
            if !self.on(modules::OCR) {
                return None;
            }
            Some(timed(async { inference::ocr_frames(self.backends.get(backends::OCR)?, frames).await }).await)
        };
        let caption = async {
            if !self.on(modules::VIDEO_SUMMARY) {
                return None;
            }
            Some(
                timed(async {
                    inference::caption_frames(self.backends.get(backends::CAPTIONING)?, frames).await
                })
                .await,
            )
        };
        let deepfake = async {
            if !self.on(modules::DEEPFAKE) {
                return None;
            }
            Some(
                timed(async {
                    inference::deepfake_score(self.backends.get(backends::DEEPFAKE)?, frames).await
                })
                .await,
            )
        };
        let (t, o, c, d) = tokio::join!(transcribe, ocr, caption, deepfake);

        match t {
            None => {
                reports.insert(modules::TRANSCRIPT.into(), ModuleReport::disabled());
            }
            Some(Timed { value, elapsed_ms }) => {
                let outcome = value.map(|tr| match tr {
                    None => Some("no audio stream".to_string()),
                    Some(tr) => {
                        signals.transcript = Some(tr.text);
                        signals.transcript_lang = Some(tr.detected_lang);
                        inter.transcript_segments = tr.segments;
                        None
                    }
                });
                record(&mut reports, &mut notes, modules::TRANSCRIPT, elapsed_ms, outcome);
            }
        }
        match o {
            None => {
                reports.insert(modules::OCR.into(), ModuleReport::disabled());
            }
            Some(Timed { value, elapsed_ms }) => {
                let outcome = value.map(|r| {
                    signals.overlay_text = Some(r.overlay_text);
                    inter.ocr_frames = r.per_frame;
                    None
                });
                record(&mut reports, &mut notes, modules::OCR, elapsed_ms, outcome);
            }
        }
        let mut caption_ms = 0;
        let mut caption_failed = None;
        match c {
            None => {
                reports.insert(modules::VIDEO_SUMMARY.into(), ModuleReport::disabled());
            }
            Some(Timed { value, elapsed_ms }) => {
                caption_ms = elapsed_ms;
                match value {
                    Ok(captions) => inter.captions = captions,
                    Err(e) => caption_failed = Some(e),
                }
            }
        }
        match d {
            None => {
                reports.insert(modules::DEEPFAKE.into(), ModuleReport::disabled());
            }
            Some(Timed { value, elapsed_ms }) => {
                let outcome = value.map(|r| {
                    signals.deepfake_score = r.score;
                    inter.deepfake_frames = r.per_frame;
                    r.score.is_none().then(|| "no face detected".to_string())
                });
                record(&mut reports, &mut notes, modules::DEEPFAKE, elapsed_ms, outcome);
            }
        }

        // Summarize and classify once the inputs have joined.
        let transcript = signals.transcript.clone().unwrap_or_default();
        let overlay = signals.overlay_text.clone().unwrap_or_default();
        let summary_on = self.on(modules::VIDEO_SUMMARY);
        let has_input = non_empty(&transcript).is_some()
            || non_empty(&overlay).is_some()
            || inter.captions.iter().any(|c| non_empty(c).is_some());
        let wants_classify = self.on(modules::TRANSCRIPT)
            || self.on(modules::OCR)
            || summary_on
            || self.on(modules::AD_FILTER);
        if !wants_classify {
            reports.insert("classify".into(), ModuleReport::disabled());
        } else if !has_input {
            reports.insert(
                "classify".into(),
                ModuleReport {
                    status: ModuleStatus::Ok,
                    elapsed_ms: 0,
                    detail: Some("no text to classify".into()),
                },
            );
        } else {
            let result = timed(async {
                let client = self.backends.get(backends::LLM)?;
                inference::summarize_and_classify(client, &inter.captions, &transcript, &overlay).await
            })
            .await;
            let outcome = result.value.map(|cls| {
                signals.transcript_verdict = cls.transcript_verdict;
                signals.overlay_verdict = cls.overlay_verdict;
                signals.is_advertisement = cls.is_advertisement;
                if summary_on && caption_failed.is_none() {
                    signals.video_summary = cls.video_summary;
                    signals.summary_verdict = cls.summary_verdict;
                }
                inter.classifier_reply = Some(cls.raw);
                None
            });
            record(&mut reports, &mut notes, "classify", result.elapsed_ms, outcome);
        }
        if summary_on {
            let outcome = match caption_failed {
                Some(e) => Err(e),
                None if signals.video_summary.is_none() => match reports.get("classify") {
                    Some(r) if r.status == ModuleStatus::Failed => Err("classifier failed".into()),
                    _ => Ok(Some("no summary produced".into())),
                },
                None => Ok(None),
            };
            record(&mut reports, &mut notes, modules::VIDEO_SUMMARY, caption_ms, outcome);
        }
        // Verdicts only stand when their source module is on.
        if !self.on(modules::TRANSCRIPT) {
            signals.transcript_verdict = SemanticClass::Unknown;
        }
        if !self.on(modules::OCR) {
            signals.overlay_verdict = SemanticClass::Unknown;
        }

        // Buzzwords over transcript and overlay text.
        if self.on(modules::BUZZWORD) {
            let start = Instant::now();
            let mut hits = Vec::new();
            if let Some(t) = &signals.transcript {
                hits.extend(self.lexicons.detect(t, TextSource::Transcript));
            }
            if let Some(t) = &signals.overlay_text {
                hits.extend(self.lexicons.detect(t, TextSource::Overlay));
            }
            let detail = format!("{} hit(s)", hits.len());
            signals.buzzword_hits = hits;
            record(&mut reports, &mut notes, modules::BUZZWORD, start.elapsed().as_millis() as u64, Ok(Some(detail)));
        } else {
            reports.insert(modules::BUZZWORD.into(), ModuleReport::disabled());
        }

        // Claims from transcript and summary.
        if self.on(modules::FACT_CHECK) {
            let texts: Vec<String> = [signals.transcript.clone(), signals.video_summary.clone()]
                .into_iter()
                .flatten()
                .filter(|t| non_empty(t).is_some())
                .collect();
            let result = timed(self.check_claims(&texts)).await;
            let outcome = result.value.map(|(found, results)| {
                let warned = results.iter().filter(|r| r.warning.is_some()).count();
                for r in results.iter().filter_map(|r| r.warning.as_ref()) {
                    notes.push(format!("fact_check warning: {r}"));
                }
                inter.claims = found;
                signals.claim_results = results;
                (warned > 0).then(|| format!("{warned} claim lookup(s) degraded"))
            });
            record(&mut reports, &mut notes, modules::FACT_CHECK, result.elapsed_ms, outcome);
        } else {
            reports.insert(modules::FACT_CHECK.into(), ModuleReport::disabled());
        }

        if self.on(modules::WEAPON) {
            notes.push("weapon: no detector backend is wired in; signal stays off".into());
        }

        let mut result = decision::score(&signals, &self.config);
        result.notes = notes;
        AnalysisRecord {
            video_id: bundle.video.id.clone(),
            config_digest: self.digest.clone(),
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            video: bundle.video.clone(),
            signals,
            result,
            modules: reports,
            intermediates: inter,
        }
    }

    async fn check_claims(
        &self,
        texts: &[String],
    ) -> Result<(Vec<String>, Vec<crate::model::ClaimCheckResult>), InferenceError> {
        if texts.is_empty() {
            return Ok((vec![], vec![]));
        }
        let detector = self.backends.get(backends::CLAIM_DETECTION)?;
        let mut found: Vec<String> = Vec::new();
        for text in texts {
            for claim in claims::detect_claims(detector, text).await? {
                if !found.contains(&claim) {
                    found.push(claim);
                }
            }
        }
        if found.is_empty() {
            return Ok((found, vec![]));
        }
        let results = claims::verify_claims(self.backends.get(backends::FACT_CHECK)?, &found).await?;
        Ok((found, results))
    }
}

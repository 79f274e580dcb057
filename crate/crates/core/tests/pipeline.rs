use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use serde_json::json;
use vidtriage_core::fixtures::{self, BEIRUT_SUMMARY, BEIRUT_TRANSCRIPT};
use vidtriage_core::inference::mock::{MockReply, MockRequest, MockServer};
use vidtriage_core::inference::tasks;
use vidtriage_core::media::y4m::write_solid_clip;
use vidtriage_core::pipeline::{Pipeline, PipelineError};
use vidtriage_core::record::ModuleStatus;
use vidtriage_core::store::Store;
use vidtriage_core::{Label, PipelineConfig, SemanticClass, Stance};

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn beirut() -> String {
    fixtures_dir().join("beirut.y4m").display().to_string()
}

fn pipeline_for(server: &MockServer, mut config: PipelineConfig, store: Option<Store>) -> Pipeline {
    server.point_config(&mut config);
    for endpoint in config.endpoints.values_mut() {
        endpoint.timeout_ms = 2_000;
        endpoint.max_retries = 1;
    }
    Pipeline::new(config, store).unwrap()
}

#[tokio::test]
async fn beirut_replay_reproduces_the_worked_example() {
    let server = MockServer::replay(fixtures_dir().join("recordings")).await.unwrap();
    let pipeline = pipeline_for(&server, PipelineConfig::default(), None);
    let a = pipeline.analyze(&beirut()).await.unwrap();
    let s = &a.record.signals;
    assert_eq!(server.misses(), 0);
    assert_eq!(s.overlay_text.as_deref(), Some("Someone captured the | missile in the Beirut blast"));
    assert_eq!(s.transcript.as_deref(), Some(BEIRUT_TRANSCRIPT));
    assert_eq!(s.transcript_lang.as_deref(), Some("ar"));
    assert_eq!(s.video_summary.as_deref(), Some(BEIRUT_SUMMARY));
    assert!(!s.buzzword_detected());
    assert_eq!(s.transcript_verdict, SemanticClass::Hostile);
    assert_eq!(s.summary_verdict, SemanticClass::ContentiousIssue);
    assert_eq!(s.overlay_verdict, SemanticClass::Hostile);
    assert_eq!(s.deepfake_score, None);
    assert_eq!(a.record.result.label, Label::Checkworthy);
    assert_eq!(a.record.result.score, 3.0);
    for (module, report) in &a.record.modules {
        assert_eq!(report.status, ModuleStatus::Ok, "{module}");
    }
    assert_eq!(a.record.intermediates.frame_timestamps, vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
}

#[tokio::test]
async fn replay_covers_single_module_removal() {
    let server = MockServer::replay(fixtures_dir().join("recordings")).await.unwrap();
    let config = PipelineConfig::default().without("ocr");
    let pipeline = pipeline_for(&server, config, None);
    let a = pipeline.analyze(&beirut()).await.unwrap();
    assert_eq!(server.misses(), 0);
    assert_eq!(a.record.status("ocr"), Some(ModuleStatus::Disabled));
    assert_eq!(a.record.signals.overlay_text, None);
    assert_eq!(a.record.signals.overlay_verdict, SemanticClass::Unknown);
    assert_eq!(a.record.result.score, 2.0);
    assert_eq!(a.record.result.disabled, vec!["ocr", "weapon"]);
}

#[tokio::test]
async fn second_analysis_is_served_from_the_store() {
    let dir = tempfile::tempdir().unwrap();
    let server = MockServer::scripted(fixtures::beirut_script()).await.unwrap();
    let store = Store::open(dir.path()).unwrap();
    let pipeline = pipeline_for(&server, PipelineConfig::default(), Some(store));
    let first = pipeline.analyze(&beirut()).await.unwrap();
    assert!(!first.cached);
    let calls = server.total_calls();
    assert!(calls > 0);
    let second = pipeline.analyze(&beirut()).await.unwrap();
    assert!(second.cached);
    assert_eq!(server.total_calls(), calls);
    assert_eq!(first.bytes, second.bytes);
    assert_eq!(first.record, second.record);
}

#[tokio::test]
async fn config_change_misses_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let server = MockServer::scripted(fixtures::beirut_script()).await.unwrap();
    let store = Store::open(dir.path()).unwrap();
    let a = pipeline_for(&server, PipelineConfig::default(), Some(store.clone()));
    a.analyze(&beirut()).await.unwrap();
    let changed = PipelineConfig { threshold: 4.0, ..PipelineConfig::default() };
    let b = pipeline_for(&server, changed, Some(store.clone()));
    let calls = server.total_calls();
    let rec = b.analyze(&beirut()).await.unwrap();
    assert!(!rec.cached);
    assert!(server.total_calls() > calls);
    assert_eq!(rec.record.result.label, Label::NotCheckworthy);
    assert_eq!(store.analysis_digests(&rec.record.video_id).unwrap().len(), 2);
}

#[tokio::test]
async fn transcription_outage_degrades_instead_of_aborting() {
    let server = MockServer::scripted(fixtures::beirut_script()).await.unwrap();
    server.set_down("transcription", true);
    let pipeline = pipeline_for(&server, PipelineConfig::default(), None);
    let a = pipeline.analyze(&beirut()).await.unwrap();
    let r = &a.record;
    assert_eq!(r.status("transcript"), Some(ModuleStatus::Failed));
    assert_eq!(r.signals.transcript, None);
    assert_eq!(r.signals.transcript_verdict, SemanticClass::Unknown);
    assert!(r.result.notes.iter().any(|n| n.starts_with("transcript failed")));
    // Summary and overlay still flag.
    assert_eq!(r.result.score, 2.0);
    assert_eq!(r.result.label, Label::Checkworthy);
    assert_eq!(server.calls("transcription"), 2);
}

#[tokio::test]
async fn every_backend_down_still_yields_a_record() {
    let server = MockServer::scripted(|_: &MockRequest| MockReply::status(503)).await.unwrap();
    let pipeline = pipeline_for(&server, PipelineConfig::default(), None);
    let a = pipeline.analyze(&beirut()).await.unwrap();
    for m in ["transcript", "ocr", "video_summary", "deepfake"] {
        assert_eq!(a.record.status(m), Some(ModuleStatus::Failed), "{m}");
    }
    assert_eq!(a.record.result.label, Label::NotCheckworthy);
    assert_eq!(a.record.result.score, 0.0);
}

#[tokio::test]
async fn clip_without_audio_skips_transcription() {
    let dir = tempfile::tempdir().unwrap();
    let clip = dir.path().join("mute.y4m");
    write_solid_clip(&clip, 16, 8, 1, 4, [10, 20, 30]).unwrap();
    let server = MockServer::scripted(fixtures::beirut_script()).await.unwrap();
    let pipeline = pipeline_for(&server, PipelineConfig::default(), None);
    let a = pipeline.analyze(&clip.display().to_string()).await.unwrap();
    let report = &a.record.modules["transcript"];
    assert_eq!(report.status, ModuleStatus::Ok);
    assert_eq!(report.detail.as_deref(), Some("no audio stream"));
    assert_eq!(server.calls("transcription"), 0);
    assert_eq!(a.record.signals.transcript, None);
}

#[tokio::test]
async fn ingest_errors_abort() {
    let dir = tempfile::tempdir().unwrap();
    let clip = dir.path().join("long.y4m");
    write_solid_clip(&clip, 2, 2, 1, 660, [0, 0, 0]).unwrap();
    let server = MockServer::scripted(fixtures::beirut_script()).await.unwrap();
    let pipeline = pipeline_for(&server, PipelineConfig::default(), None);
    match pipeline.analyze(&clip.display().to_string()).await {
        Err(PipelineError::Ingest(e)) => assert_eq!(e.reason(), "TooLong"),
        other => panic!("expected TooLong, got {other:?}"),
    }
    assert!(pipeline.analyze("/nonexistent/clip.mp4").await.is_err());
    assert_eq!(server.total_calls(), 0);
}

#[tokio::test]
async fn refuted_claim_flows_into_the_score() {
    let verified = Arc::new(AtomicUsize::new(0));
    let counter = verified.clone();
    let base = fixtures::beirut_script();
    let server = MockServer::scripted(move |req: &MockRequest| match req.task.as_str() {
        tasks::DETECT_CLAIMS => {
            let sentences = req.input["sentences"].as_array().unwrap();
            let flags: Vec<bool> =
                sentences.iter().map(|s| s.as_str().unwrap().contains("2020")).collect();
            MockReply::ok(json!({ "checkworthy": flags }))
        }
        tasks::FACT_CHECK => {
            counter.fetch_add(1, Ordering::SeqCst);
            MockReply::ok(json!({
                "label": "REFUTED",
                "evidence": [{"url": "https://factcheck.example/beirut"}],
                "confidence": 0.9,
            }))
        }
        _ => base(req),
    })
    .await
    .unwrap();
    let pipeline = pipeline_for(&server, PipelineConfig::default(), None);
    let a = pipeline.analyze(&beirut()).await.unwrap();
    let claims = &a.record.signals.claim_results;
    assert_eq!(claims.len(), 1);
    assert_eq!(claims[0].claim_text, BEIRUT_SUMMARY);
    assert_eq!(claims[0].stance, Stance::Refuted);
    assert_eq!(verified.load(Ordering::SeqCst), 1);
    assert_eq!(a.record.result.score, 5.0);
    assert!(a.record.result.contributions.iter().any(|c| c.signal == "claim.refuted"));
}

#[tokio::test]
async fn advertisement_forces_not_checkworthy() {
    let base = fixtures::beirut_script();
    let server = MockServer::scripted(move |req: &MockRequest| match req.task.as_str() {
        tasks::GENERATE => MockReply::ok(json!({
            "text": "SUMMARY: A phone ad.\nTRANSCRIPT_VERDICT: promotional\nSUMMARY_VERDICT: political\nOVERLAY_VERDICT: hostile\nADVERTISEMENT: yes"
        })),
        _ => base(req),
    })
    .await
    .unwrap();
    let pipeline = pipeline_for(&server, PipelineConfig::default(), None);
    let a = pipeline.analyze(&beirut()).await.unwrap();
    assert!(a.record.signals.is_advertisement);
    assert!(a.record.result.ad_override);
    assert_eq!(a.record.result.score, 2.0);
    assert_eq!(a.record.result.label, Label::NotCheckworthy);
}

use std::time::{Duration, Instant};

use serde_json::json;
use vidtriage_core::fixtures::bench_frame;
use vidtriage_core::inference::mock::{MockReply, MockRequest, MockServer};
use vidtriage_core::inference::{self, tasks, BackendClient, BackendEndpoint, InferenceError};
use vidtriage_core::media::{wav, FrameSample};
use vidtriage_core::SemanticClass;

fn client(server: &MockServer, name: &str, retries: u32, timeout_ms: u64) -> BackendClient {
    let endpoint = BackendEndpoint::new(name, &server.url(name))
        .unwrap()
        .with_retries(retries)
        .with_timeout_ms(timeout_ms);
    BackendClient::new(endpoint)
}

fn frames(n: u32) -> Vec<FrameSample> {
    (0..n)
        .map(|i| FrameSample { index: i as usize, ..bench_frame(i, false) })
        .collect()
}

#[tokio::test]
async fn persistent_500_exhausts_retries() {
    let server = MockServer::scripted(|_: &MockRequest| MockReply::status(500)).await.unwrap();
    let c = client(&server, "ocr", 2, 1_000);
    match c.call(tasks::OCR, json!({})).await {
        Err(InferenceError::BackendUnavailable { backend, attempts, reason }) => {
            assert_eq!(backend, "ocr");
            assert_eq!(attempts, 3);
            assert!(reason.contains("500"), "{reason}");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(server.calls("ocr"), 3);
}

#[tokio::test]
async fn transient_errors_then_success() {
    let server = MockServer::scripted(|req: &MockRequest| match req.call {
        1 => MockReply::status(429),
        2 => MockReply::status(503),
        _ => MockReply::ok(json!({"text": "fine"})),
    })
    .await
    .unwrap();
    let c = client(&server, "llm", 2, 1_000);
    assert_eq!(c.call(tasks::GENERATE, json!({})).await.unwrap(), json!({"text": "fine"}));
    assert_eq!(server.calls("llm"), 3);
}

#[tokio::test]
async fn client_errors_are_not_retried() {
    let server = MockServer::scripted(|_: &MockRequest| MockReply::status(400)).await.unwrap();
    let c = client(&server, "llm", 3, 1_000);
    assert!(c.call(tasks::GENERATE, json!({})).await.is_err());
    assert_eq!(server.calls("llm"), 1);
}

#[tokio::test]
async fn slow_backend_times_out_within_the_budget() {
    let server = MockServer::scripted(|_: &MockRequest| MockReply::ok(json!({})).delayed(2_000))
        .await
        .unwrap();
    let c = client(&server, "llm", 1, 150);
    let start = Instant::now();
    match c.call(tasks::GENERATE, json!({})).await {
        Err(InferenceError::BackendUnavailable { reason, attempts, .. }) => {
            assert_eq!(reason, "timed out");
            assert!(attempts >= 1);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(start.elapsed() < Duration::from_millis(2 * 150 + 400), "{:?}", start.elapsed());
}

#[tokio::test]
async fn unreachable_backend_is_unavailable() {
    let endpoint = BackendEndpoint::new("ocr", "http://127.0.0.1:9/ocr").unwrap().with_retries(0);
    let err = BackendClient::new(endpoint).call(tasks::OCR, json!({})).await.unwrap_err();
    assert!(matches!(err, InferenceError::BackendUnavailable { attempts: 1, .. }), "{err:?}");
}

#[tokio::test]
async fn malformed_envelope_is_a_bad_response() {
    let server = MockServer::scripted(|_: &MockRequest| MockReply {
        status: 200,
        body: json!({"unexpected": true}),
        delay_ms: 0,
    })
    .await
    .unwrap();
    let err = client(&server, "ocr", 0, 1_000).call(tasks::OCR, json!({})).await.unwrap_err();
    assert!(matches!(err, InferenceError::BadResponse { .. }), "{err:?}");
}

#[tokio::test]
async fn captions_one_per_frame() {
    let server = MockServer::scripted(|req: &MockRequest| {
        let n = req.input["frames"].as_array().unwrap().len();
        let caps: Vec<String> = (0..n).map(|k| format!("cap-{k}")).collect();
        MockReply::ok(json!({ "captions": caps }))
    })
    .await
    .unwrap();
    let caps = inference::caption_frames(&client(&server, "captioning", 0, 1_000), &frames(3)).await.unwrap();
    assert_eq!(caps, vec!["cap-0", "cap-1", "cap-2"]);
}

#[tokio::test]
async fn caption_arity_mismatch_is_rejected() {
    let server = MockServer::scripted(|_: &MockRequest| MockReply::ok(json!({"captions": ["only one"]})))
        .await
        .unwrap();
    let err = inference::caption_frames(&client(&server, "captioning", 0, 1_000), &frames(2))
        .await
        .unwrap_err();
    assert!(matches!(err, InferenceError::BadResponse { .. }));
}

#[tokio::test]
async fn deepfake_video_score_is_the_mean_over_faces() {
    let server = MockServer::scripted(|_: &MockRequest| {
        MockReply::ok(json!({"frames": [
            {"index": 0, "face_detected": true, "score": 0.2},
            {"index": 1, "face_detected": true, "score": 0.8},
            {"index": 2, "face_detected": false, "score": null},
        ]}))
    })
    .await
    .unwrap();
    let r = inference::deepfake_score(&client(&server, "deepfake", 0, 1_000), &frames(3)).await.unwrap();
    assert_eq!(r.score, Some(0.5));
}

#[tokio::test]
async fn deepfake_score_out_of_range_is_rejected() {
    let server = MockServer::scripted(|_: &MockRequest| {
        MockReply::ok(json!({"frames": [{"index": 0, "face_detected": true, "score": 1.5}]}))
    })
    .await
    .unwrap();
    let err = inference::deepfake_score(&client(&server, "deepfake", 0, 1_000), &frames(1)).await.unwrap_err();
    assert!(matches!(err, InferenceError::BadResponse { .. }));
}

#[tokio::test]
async fn ocr_joins_and_collapses_repeats() {
    let server = MockServer::scripted(|_: &MockRequest| {
        MockReply::ok(json!({"frames": [
            {"index": 0, "text": "BREAKING", "boxes": []},
            {"index": 1, "text": "BREAKING", "boxes": []},
            {"index": 2, "text": "", "boxes": []},
            {"index": 3, "text": "they lied", "boxes": [[1, 2, 3, 4]]},
        ]}))
    })
    .await
    .unwrap();
    let r = inference::ocr_frames(&client(&server, "ocr", 0, 1_000), &frames(4)).await.unwrap();
    assert_eq!(r.overlay_text, "BREAKING | they lied");
    assert_eq!(r.per_frame.len(), 4);
}

fn silent_wav(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("silence.wav");
    wav::write_pcm16(&path, wav::TARGET_RATE, &vec![0.0; 16_000]).unwrap();
    path
}

#[tokio::test]
async fn silent_audio_gives_an_empty_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let server = MockServer::scripted(|req: &MockRequest| {
        assert!(req.input["audio_wav_b64"].as_str().is_some_and(|s| !s.is_empty()));
        MockReply::ok(json!({"language": "", "segments": []}))
    })
    .await
    .unwrap();
    let t = inference::transcribe(&client(&server, "transcription", 0, 1_000), &silent_wav(dir.path()), None)
        .await
        .unwrap();
    assert_eq!(t.text, "");
    assert_eq!(t.detected_lang, "und");
}

#[tokio::test]
async fn audio_outside_the_contract_is_refused_locally() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("8k.wav");
    wav::write_pcm16(&path, 8_000, &[0.0; 800]).unwrap();
    let server = MockServer::scripted(|_: &MockRequest| MockReply::status(500)).await.unwrap();
    let err = inference::transcribe(&client(&server, "transcription", 0, 1_000), &path, None)
        .await
        .unwrap_err();
    assert!(matches!(err, InferenceError::BadAudio(_)), "{err:?}");
    assert_eq!(server.total_calls(), 0);
}

#[tokio::test]
async fn promotional_content_sets_the_ad_flag() {
    let server = MockServer::scripted(|_: &MockRequest| {
        MockReply::ok(json!({"text": "SUMMARY: Someone unboxes a phone.\nTRANSCRIPT_VERDICT: promotional\nSUMMARY_VERDICT: promotional\nOVERLAY_VERDICT: benign\nADVERTISEMENT: yes"}))
    })
    .await
    .unwrap();
    let llm = client(&server, "llm", 0, 1_000);
    let c = inference::summarize_and_classify(&llm, &["a phone".into()], "use my code", "SALE").await.unwrap();
    assert!(c.is_advertisement);
    assert_eq!(c.transcript_verdict, SemanticClass::Promotional);
    assert_eq!(c.overlay_verdict, SemanticClass::Benign);
}

#[tokio::test]
async fn verdicts_without_source_text_are_unknown() {
    let server = MockServer::scripted(|_: &MockRequest| {
        MockReply::ok(json!({"text": "SUMMARY: Smoke.\nTRANSCRIPT_VERDICT: hostile\nSUMMARY_VERDICT: political\nOVERLAY_VERDICT: hostile\nADVERTISEMENT: no"}))
    })
    .await
    .unwrap();
    let llm = client(&server, "llm", 0, 1_000);
    let c = inference::summarize_and_classify(&llm, &["smoke".into()], "", "").await.unwrap();
    assert_eq!(c.transcript_verdict, SemanticClass::Unknown);
    assert_eq!(c.overlay_verdict, SemanticClass::Unknown);
    assert_eq!(c.summary_verdict, SemanticClass::Political);
    let err = inference::summarize_and_classify(&llm, &[], " ", "").await.unwrap_err();
    assert!(matches!(err, InferenceError::EmptyInput(_)));
}

#[tokio::test]
async fn recordings_replay_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let script = |req: &MockRequest| MockReply::ok(json!({"text": format!("echo {}", req.input["prompt"])}));
    let recorder = MockServer::recording(script, dir.path()).await.unwrap();
    let first = client(&recorder, "llm", 0, 1_000).call(tasks::GENERATE, json!({"prompt": "hi"})).await.unwrap();
    drop(recorder);

    let replay = MockServer::replay(dir.path()).await.unwrap();
    let c = client(&replay, "llm", 0, 1_000);
    assert_eq!(c.call(tasks::GENERATE, json!({"prompt": "hi"})).await.unwrap(), first);
    assert_eq!(replay.misses(), 0);
    assert!(c.call(tasks::GENERATE, json!({"prompt": "other"})).await.is_err());
    assert_eq!(replay.misses(), 1);
}

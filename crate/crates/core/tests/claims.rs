use serde_json::json;
use vidtriage_core::claims::{detect_claims, verify_claims};
use vidtriage_core::inference::mock::{MockReply, MockRequest, MockServer};
use vidtriage_core::inference::{BackendClient, BackendEndpoint, InferenceError};
use vidtriage_core::Stance;

fn client(server: &MockServer, name: &str) -> BackendClient {
    BackendClient::new(BackendEndpoint::new(name, &server.url(name)).unwrap().with_retries(0))
}

fn fact_check(req: &MockRequest) -> MockReply {
    let claim = req.input["claim"].as_str().unwrap_or("");
    if claim.contains("boom") {
        return MockReply::status(500);
    }
    let label = if claim.contains("moon") { "False" } else { "Supported" };
    MockReply::ok(json!({
        "label": label,
        "evidence": [{"url": "https://factcheck.example/1"}, {"url": " "}],
        "confidence": 0.7,
    }))
}

#[tokio::test]
async fn one_failed_lookup_degrades_only_that_claim() {
    let server = MockServer::scripted(fact_check).await.unwrap();
    let claims: Vec<String> =
        ["The moon is cheese.", "boom goes the server.", "Water is wet."].map(String::from).to_vec();
    let results = verify_claims(&client(&server, "fact_check"), &claims).await.unwrap();
    assert_eq!(results.len(), 3);
    assert_eq!(results[0].stance, Stance::Refuted);
    assert_eq!(results[0].evidence_refs, vec!["https://factcheck.example/1"]);
    assert_eq!(results[1].stance, Stance::NoEvidence);
    assert!(results[1].warning.as_deref().unwrap().starts_with("lookup failed"));
    assert!(results[1].evidence_refs.is_empty());
    assert_eq!(results[2].stance, Stance::Supported);
    for (r, c) in results.iter().zip(&claims) {
        assert_eq!(&r.claim_text, c);
        r.check().unwrap();
    }
}

#[tokio::test]
async fn every_lookup_failing_is_an_error() {
    let server = MockServer::scripted(|_: &MockRequest| MockReply::status(503)).await.unwrap();
    let err = verify_claims(&client(&server, "fact_check"), &["a claim".to_string()]).await.unwrap_err();
    assert!(matches!(err, InferenceError::BackendUnavailable { .. }));
}

#[tokio::test]
async fn no_claims_means_no_calls() {
    let server = MockServer::scripted(fact_check).await.unwrap();
    assert!(verify_claims(&client(&server, "fact_check"), &[]).await.unwrap().is_empty());
    assert_eq!(server.total_calls(), 0);
}

#[tokio::test]
async fn detection_keeps_flagged_sentences_in_order() {
    let server = MockServer::scripted(|req: &MockRequest| {
        let flags: Vec<bool> = req.input["sentences"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap().chars().any(|c| c.is_ascii_digit()))
            .collect();
        MockReply::ok(json!({ "checkworthy": flags }))
    })
    .await
    .unwrap();
    let c = client(&server, "claim_detection");
    let found = detect_claims(&c, "Taxes rose 40% last year. What a day! Crime fell by 3 points.").await.unwrap();
    assert_eq!(found, vec!["Taxes rose 40% last year.", "Crime fell by 3 points."]);
    assert!(matches!(detect_claims(&c, "   ").await, Err(InferenceError::EmptyInput(_))));
}

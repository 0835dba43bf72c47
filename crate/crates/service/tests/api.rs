use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use chrono::Utc;
use http_body_util::BodyExt;
use narrative_frames::annotate::AnnotatorConfig;
use narrative_frames::store::{Document, Store};
use narrative_frames::taxonomy::Taxonomy;
use narrative_frames_service::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app_with(config: AnnotatorConfig) -> (axum::Router, AppState) {
    let taxonomy = Arc::new(Taxonomy::bundled().clone());
    let store = Arc::new(Store::in_memory());
    store
        .ingest(
            "policy",
            taxonomy.version(),
            vec![
                Document::new("doc1", "Intro sentence here. Battleground of data privacy. A closing line."),
                Document::new("doc2", "The troops advanced at dawn. Nothing else."),
            ],
        )
        .unwrap();
    store.analyze("policy", &taxonomy, &config, Utc::now()).unwrap();
    store
        .ingest("press", taxonomy.version(), vec![Document::new("doc3", "The AI arms race is on.")])
        .unwrap();
    store.analyze("press", &taxonomy, &config, Utc::now()).unwrap();
    let state = AppState::new(store, taxonomy, config);
    (router(state.clone(), None), state)
}

fn app() -> axum::Router {
    app_with(AnnotatorConfig::default()).0
}

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn first_assignment(app: &axum::Router, doc: &str) -> String {
    let (_, page) = call(app, "GET", &format!("/documents/{doc}/candidates"), None).await;
    page["items"][0]["assignment_id"].as_str().unwrap().to_string()
}

fn decision_uri(id: &str) -> String {
    format!("/assignments/{}/decision", id.replace('#', "%23"))
}

#[tokio::test]
async fn taxonomy_lists_all_frames() {
    let (status, body) = call(&app(), "GET", "/taxonomy", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["frames"].as_array().unwrap().len(), 49);
}

#[tokio::test]
async fn corpora_are_listed() {
    let (_, body) = call(&app(), "GET", "/corpora", None).await;
    let ids: Vec<&str> = body["corpora"].as_array().unwrap().iter().map(|c| c["corpus_id"].as_str().unwrap()).collect();
    assert_eq!(ids, vec!["policy", "press"]);
}

#[tokio::test]
async fn battleground_candidate_with_snippet() {
    let (status, page) = call(&app(), "GET", "/documents/doc1/candidates", None).await;
    assert_eq!(status, StatusCode::OK);
    let items = page["items"].as_array().unwrap();
    assert_eq!(items.len(), 1);
    assert_eq!(items[0]["assignment"]["frame"], "WAR");
    assert_eq!(items[0]["assignment"]["status"], "suggested");
    assert_eq!(
        items[0]["snippet"]["text"],
        "Intro sentence here. Battleground of data privacy. A closing line."
    );
    assert_eq!(items[0]["history"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn unknown_document_is_404() {
    let (status, body) = call(&app(), "GET", "/documents/nope/candidates", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "UnknownDocument");
    assert_eq!(body["http_status"], 404);
}

#[tokio::test]
async fn rejected_filter_on_fresh_document_is_empty() {
    let (status, page) = call(&app(), "GET", "/documents/doc1/candidates?status=rejected", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(page["items"].as_array().unwrap().is_empty());
    let (status, _) = call(&app(), "GET", "/documents/doc1/candidates?status=maybe", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn paging_walks_all_items() {
    let app = app();
    let (_, page) = call(&app, "GET", "/documents/doc3/candidates?page_size=1", None).await;
    assert_eq!(page["items"].as_array().unwrap().len(), 1);
    let token = page["next_page_token"].as_str().unwrap();
    let (_, next) = call(&app, "GET", &format!("/documents/doc3/candidates?page_size=1&page_token={token}"), None).await;
    assert_eq!(next["items"].as_array().unwrap().len(), 1);
    assert!(next["next_page_token"].is_null());
    assert_ne!(page["items"][0]["assignment_id"], next["items"][0]["assignment_id"]);
}

#[tokio::test]
async fn suppressed_candidates_are_reported() {
    let config = AnnotatorConfig {
        literal_topics: vec!["WAR".into()],
        ..AnnotatorConfig::default()
    };
    let (app, _) = app_with(config);
    let (_, page) = call(&app, "GET", "/documents/doc2/candidates", None).await;
    assert!(page["items"].as_array().unwrap().is_empty());
    assert_eq!(page["suppressed"][0]["suppression_reason"], "literal topic: WAR");
}

#[tokio::test]
async fn accept_then_replay() {
    let app = app();
    let id = first_assignment(&app, "doc1").await;
    let body = json!({"decision": "accept", "annotator_id": "ann1", "request_id": "r-1"});
    let (status, first) = call(&app, "POST", &decision_uri(&id), Some(body.clone())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(first["assignment"]["status"], "accepted");
    assert_eq!(first["history"].as_array().unwrap().len(), 2);

    let (status, again) = call(&app, "POST", &decision_uri(&id), Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, first);
    let (_, page) = call(&app, "GET", "/documents/doc1/candidates", None).await;
    assert_eq!(page["items"][0]["history"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn reassign_needs_frame() {
    let app = app();
    let id = first_assignment(&app, "doc1").await;
    let (status, body) = call(&app, "POST", &decision_uri(&id), Some(json!({"decision": "reassign", "annotator_id": "a"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "ValidationError");

    let (status, body) = call(
        &app,
        "POST",
        &decision_uri(&id),
        Some(json!({"decision": "reassign", "frame": "NOPE", "annotator_id": "a"})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "UnknownFrame");

    let (status, body) = call(
        &app,
        "POST",
        &decision_uri(&id),
        Some(json!({"decision": "reassign", "frame": "GAME", "annotator_id": "a"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["assignment"]["status"], "reassigned");
    assert_eq!(body["assignment"]["assigned_frame_after_review"], "GAME");
}

#[tokio::test]
async fn malformed_json_is_400() {
    let app = app();
    let id = first_assignment(&app, "doc1").await;
    let request = Request::builder()
        .method("POST")
        .uri(decision_uri(&id))
        .body(Body::from("{not json"))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    assert_eq!(response.status(), StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_assignment_is_404() {
    let (status, body) = call(&app(), "POST", &decision_uri("doc1#0-1"), Some(json!({"decision": "accept", "annotator_id": "a"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "UnknownAssignment");
}

#[tokio::test]
async fn stale_history_is_409() {
    let app = app();
    let id = first_assignment(&app, "doc1").await;
    let accept = json!({"decision": "accept", "annotator_id": "a", "expected_history_len": 1});
    assert_eq!(call(&app, "POST", &decision_uri(&id), Some(accept.clone())).await.0, StatusCode::OK);
    let (status, body) = call(&app, "POST", &decision_uri(&id), Some(accept)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "ConflictingConcurrentWrite");
}

#[tokio::test]
async fn distribution_follows_decisions() {
    let app = app();
    let (_, before) = call(&app, "GET", "/corpora/policy/distribution?accepted_only=true", None).await;
    assert_eq!(before["per_frame"]["WAR"]["count"], 0);
    assert_eq!(before["absent"].as_array().unwrap().len(), 49);
    let (_, again) = call(&app, "GET", "/corpora/policy/distribution?accepted_only=true", None).await;
    assert_eq!(before, again);

    let id = first_assignment(&app, "doc1").await;
    call(&app, "POST", &decision_uri(&id), Some(json!({"decision": "accept", "annotator_id": "a"}))).await;
    let (_, after) = call(&app, "GET", "/corpora/policy/distribution?accepted_only=true", None).await;
    assert_eq!(after["per_frame"]["WAR"]["count"], 1);
    let (_, all) = call(&app, "GET", "/corpora/policy/distribution", None).await;
    assert_eq!(all["per_frame"]["WAR"]["count"], 2);

    let (status, _) = call(&app, "GET", "/corpora/nope/distribution", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn agreement_between_annotators() {
    let (app, state) = app_with(AnnotatorConfig::default());
    let ids: Vec<String> = state.store().records("press").unwrap().into_iter().map(|r| r.assignment_id).collect();
    for (annotator, decisions) in [("a", ["accept", "reject"]), ("b", ["accept", "accept"])] {
        for (id, decision) in ids.iter().zip(decisions) {
            call(&app, "POST", &decision_uri(id), Some(json!({"decision": decision, "annotator_id": annotator}))).await;
        }
    }
    let (status, report) = call(&app, "GET", "/reports/agreement?a=a&b=b", None).await;
    assert_eq!(status, StatusCode::OK, "{report}");
    assert_eq!(report["item_count"], 2);
    assert_eq!(report["observed_agreement"], 0.5);

    let (status, _) = call(&app, "GET", "/reports/agreement?a=a", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, body) = call(&app, "GET", "/reports/agreement?a=x&b=y", None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "NoItems");
}

#[tokio::test]
async fn compare_is_antisymmetric() {
    let app = app();
    let (status, ab) = call(&app, "GET", "/reports/compare?a=policy&b=press", None).await;
    assert_eq!(status, StatusCode::OK);
    let (_, ba) = call(&app, "GET", "/reports/compare?a=press&b=policy", None).await;
    let x = ab["per_frame"]["WAR"]["log_odds_ratio"].as_f64().unwrap();
    let y = ba["per_frame"]["WAR"]["log_odds_ratio"].as_f64().unwrap();
    assert_eq!(x, -y);
    assert_eq!(ab["ranked"], ba["ranked"]);
}

#[tokio::test]
async fn static_assets_are_served() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>review</p>").unwrap();
    let (_, state) = app_with(AnnotatorConfig::default());
    let with_static = router(state, Some(dir.path().to_path_buf()));
    let response = with_static
        .oneshot(Request::builder().uri("/index.html").body(Body::empty()).unwrap())
        .await
        .unwrap();
    assert_eq!(response.status(), StatusCode::OK);
    let (status, body) = call(&app(), "GET", "/missing", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "NotFound");
}

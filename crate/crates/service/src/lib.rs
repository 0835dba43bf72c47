//! HTTP API over a [`Store`]: taxonomy, corpora, candidates, decisions and reports.
//!
//! Errors are JSON bodies `{http_status, code, message}` where `code` is the
//! name of the underlying domain error.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use narrative_frames::analytics::{
    compare_corpora, store_agreement, stored_distribution, AgreementReport, AnalyticsError, ComparisonReport,
    CountingMode, FrameDistribution, StoredReportError,
};
use narrative_frames::annotate::{identify_candidates, AnnotatorConfig, AssignmentStatus, CandidateMetaphor};
use narrative_frames::store::{AnnotationRecord, Decision, Document, Store, StoreError};
use narrative_frames::taxonomy::Taxonomy;
use narrative_frames::text::segment;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

const DEFAULT_PAGE_SIZE: usize = 50;
const MAX_PAGE_SIZE: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub http_status: u16,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            http_status: status.as_u16(),
            code: code.to_string(),
            message: message.into(),
        }
    }

    fn malformed(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "MalformedRequest", message)
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "ValidationError", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        use StatusCode as S;
        let (status, code) = match &e {
            StoreError::UnknownCorpus(_) => (S::NOT_FOUND, "UnknownCorpus"),
            StoreError::UnknownDocument(_) => (S::NOT_FOUND, "UnknownDocument"),
            StoreError::UnknownAssignment(_) => (S::NOT_FOUND, "UnknownAssignment"),
            StoreError::UnknownFrame(_) => (S::UNPROCESSABLE_ENTITY, "UnknownFrame"),
            StoreError::InvalidCorpusId(_) => (S::UNPROCESSABLE_ENTITY, "InvalidCorpusId"),
            StoreError::MalformedArchive(_) => (S::UNPROCESSABLE_ENTITY, "MalformedArchive"),
            StoreError::ConflictingConcurrentWrite { .. } => (S::CONFLICT, "ConflictingConcurrentWrite"),
            StoreError::DuplicateDocument(_) => (S::CONFLICT, "DuplicateDocument"),
            StoreError::CorpusExists(_) => (S::CONFLICT, "CorpusExists"),
            StoreError::CorruptLog { .. } => (S::INTERNAL_SERVER_ERROR, "CorruptLog"),
            StoreError::Io(_) => (S::INTERNAL_SERVER_ERROR, "Io"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<AnalyticsError> for ApiError {
    fn from(e: AnalyticsError) -> Self {
        use StatusCode as S;
        let (status, code) = match &e {
            AnalyticsError::TaxonomyMismatch { .. } => (S::CONFLICT, "TaxonomyMismatch"),
            AnalyticsError::ForeignAssignment { .. } => (S::CONFLICT, "ForeignAssignment"),
            AnalyticsError::UnknownFrame { .. } => (S::CONFLICT, "UnknownFrame"),
            AnalyticsError::ItemMismatch { .. } => (S::UNPROCESSABLE_ENTITY, "ItemMismatch"),
            AnalyticsError::DuplicateItem(_) => (S::UNPROCESSABLE_ENTITY, "DuplicateItem"),
            AnalyticsError::NoItems => (S::UNPROCESSABLE_ENTITY, "NoItems"),
            AnalyticsError::DegenerateMarginals => (S::UNPROCESSABLE_ENTITY, "DegenerateMarginals"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl From<StoredReportError> for ApiError {
    fn from(e: StoredReportError) -> Self {
        match e {
            StoredReportError::Store(e) => e.into(),
            StoredReportError::Analytics(e) => e.into(),
        }
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

struct Inner {
    store: Arc<Store>,
    taxonomy: Arc<Taxonomy>,
    config: AnnotatorConfig,
    /// request_id → body of the first successful reply.
    replies: tokio::sync::Mutex<HashMap<String, Value>>,
    /// (corpus, accepted_only) → (revision, distribution).
    distributions: Mutex<HashMap<(String, bool), (u64, FrameDistribution)>>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(store: Arc<Store>, taxonomy: Arc<Taxonomy>, config: AnnotatorConfig) -> Self {
        AppState(Arc::new(Inner {
            store,
            taxonomy,
            config,
            replies: tokio::sync::Mutex::new(HashMap::new()),
            distributions: Mutex::new(HashMap::new()),
        }))
    }

    pub fn store(&self) -> &Store {
        &self.0.store
    }

    fn distribution(&self, corpus_id: &str, accepted_only: bool) -> Result<FrameDistribution, ApiError> {
        let revision = self.0.store.revision(corpus_id)?;
        let key = (corpus_id.to_string(), accepted_only);
        if let Some((rev, d)) = self.0.distributions.lock().expect("cache lock").get(&key) {
            if *rev == revision {
                return Ok(d.clone());
            }
        }
        let mode = if accepted_only {
            CountingMode::AcceptedOnly
        } else {
            CountingMode::IncludeSuggested
        };
        let d = stored_distribution(&self.0.store, corpus_id, &self.0.taxonomy, mode)?;
        self.0
            .distributions
            .lock()
            .expect("cache lock")
            .insert(key, (revision, d.clone()));
        Ok(d)
    }
}

/// All API routes, with an optional directory of static assets as fallback.
pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/taxonomy", get(get_taxonomy))
        .route("/corpora", get(get_corpora))
        .route("/corpora/{id}/distribution", get(get_distribution))
        .route("/documents/{id}", get(get_document))
        .route("/documents/{id}/candidates", get(get_candidates))
        .route("/assignments/{id}/decision", post(post_decision))
        .route("/reports/agreement", get(get_agreement))
        .route("/reports/compare", get(get_compare))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "NotFound", "no such route") }),
    }
}

/// Serves until the process is stopped.
pub async fn serve(listener: TcpListener, state: AppState, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    axum::serve(listener, router(state, static_dir)).await
}

async fn get_taxonomy(State(state): State<AppState>) -> ApiResult<Value> {
    serde_json::from_str(&state.0.taxonomy.to_registry_json())
        .map(Json)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Serialization", e.to_string()))
}

async fn get_corpora(State(state): State<AppState>) -> Json<Value> {
    Json(serde_json::json!({ "corpora": state.store().corpus_summaries() }))
}

#[derive(Debug, Default, Deserialize)]
struct DistributionQuery {
    #[serde(default)]
    accepted_only: bool,
}

async fn get_distribution(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<DistributionQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<FrameDistribution> {
    let Query(q) = query.map_err(|e| ApiError::malformed(e.body_text()))?;
    state.distribution(&id, q.accepted_only).map(Json)
}

async fn get_document(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Document> {
    Ok(Json(state.store().document(&id)?))
}

#[derive(Debug, Default, Deserialize)]
struct CandidateQuery {
    status: Option<String>,
    page_size: Option<usize>,
    page_token: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub text: String,
    pub char_start: usize,
    pub char_end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateItem {
    #[serde(flatten)]
    pub record: AnnotationRecord,
    pub snippet: Snippet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePage {
    pub doc_id: String,
    pub items: Vec<CandidateItem>,
    pub next_page_token: Option<String>,
    /// Matches of literal-topic frames, shown but never classified.
    pub suppressed: Vec<CandidateMetaphor>,
}

/// Sentences `s-1 ..= s+1` of `text`, with their character range.
fn snippet_for(text: &str, sentence: usize) -> Snippet {
    let tokens = segment(text);
    let mut ranges: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for t in &tokens {
        let r = ranges.entry(t.sentence_index).or_insert((t.char_start, t.char_end));
        r.1 = t.char_end;
    }
    let lo = sentence.saturating_sub(1);
    let start = ranges.range(lo..=sentence + 1).next().map_or(0, |(_, r)| r.0);
    // Run up to the next sentence so closing punctuation is kept.
    let chars: Vec<char> = text.chars().collect();
    let mut end = ranges.range(sentence + 2..).next().map_or(chars.len(), |(_, r)| r.0);
    while end > start && chars[end - 1].is_whitespace() {
        end -= 1;
    }
    Snippet {
        text: chars[start..end].iter().collect(),
        char_start: start,
        char_end: end,
    }
}

async fn get_candidates(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<CandidateQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<CandidatePage> {
    let Query(q) = query.map_err(|e| ApiError::malformed(e.body_text()))?;
    let status = match q.status.as_deref() {
        None | Some("") => None,
        Some(s) => Some(AssignmentStatus::parse(s).ok_or_else(|| ApiError::malformed(format!("unknown status {s}")))?),
    };
    let page_size = q.page_size.unwrap_or(DEFAULT_PAGE_SIZE).clamp(1, MAX_PAGE_SIZE);
    let offset = match q.page_token.as_deref() {
        None | Some("") => 0,
        Some(t) => usize::from_str_radix(t, 16).map_err(|_| ApiError::malformed("invalid page_token"))?,
    };

    let document = state.store().document(&id)?;
    let records: Vec<AnnotationRecord> = state
        .store()
        .document_records(&id)?
        .into_iter()
        .filter(|r| status.is_none_or(|s| r.assignment.status == s))
        .collect();
    let next_page_token = (offset + page_size < records.len()).then(|| format!("{:x}", offset + page_size));
    let items = records
        .into_iter()
        .skip(offset)
        .take(page_size)
        .map(|record| {
            let snippet = snippet_for(&document.text, record.assignment.candidate.sentence_index);
            CandidateItem { record, snippet }
        })
        .collect();
    let suppressed = identify_candidates(&document, &state.0.taxonomy, &state.0.config)
        .into_iter()
        .filter(|c| c.suppressed)
        .collect();
    Ok(Json(CandidatePage {
        doc_id: id,
        items,
        next_page_token,
        suppressed,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRequest {
    /// "accept", "reject" or "reassign".
    pub decision: String,
    #[serde(default)]
    pub frame: Option<String>,
    pub annotator_id: String,
    /// Replays with the same id return the first successful reply.
    #[serde(default)]
    pub request_id: Option<String>,
    /// Refuse the write if the history has grown past this length.
    #[serde(default)]
    pub expected_history_len: Option<usize>,
}

impl DecisionRequest {
    fn decision(&self) -> Result<Decision, ApiError> {
        if self.annotator_id.trim().is_empty() {
            return Err(ApiError::invalid("annotator_id must not be empty"));
        }
        match (self.decision.as_str(), &self.frame) {
            ("accept", _) => Ok(Decision::Accept),
            ("reject", _) => Ok(Decision::Reject),
            ("reassign", Some(frame)) => Ok(Decision::Reassign(frame.clone())),
            ("reassign", None) => Err(ApiError::invalid("reassign requires frame")),
            (other, _) => Err(ApiError::invalid(format!("unknown decision {other:?}"))),
        }
    }
}

async fn post_decision(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let request: DecisionRequest = serde_json::from_slice(&body).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => ApiError::invalid(e.to_string()),
        _ => ApiError::malformed(e.to_string()),
    })?;
    let decision = request.decision()?;

    let mut replies = state.0.replies.lock().await;
    if let Some(reply) = request.request_id.as_ref().and_then(|r| replies.get(r)) {
        return Ok(Json(reply.clone()));
    }
    let record = state.store().record_decision(
        &id,
        &decision,
        &request.annotator_id,
        &state.0.taxonomy,
        request.expected_history_len,
        chrono::Utc::now(),
    )?;
    let reply = serde_json::to_value(&record)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Serialization", e.to_string()))?;
    if let Some(request_id) = request.request_id {
        replies.insert(request_id, reply.clone());
    }
    Ok(Json(reply))
}

#[derive(Debug, Default, Deserialize)]
struct PairQuery {
    a: Option<String>,
    b: Option<String>,
    corpus: Option<String>,
    #[serde(default)]
    accepted_only: bool,
}

impl PairQuery {
    fn pair(&self) -> Result<(&str, &str), ApiError> {
        match (self.a.as_deref(), self.b.as_deref()) {
            (Some(a), Some(b)) if !a.is_empty() && !b.is_empty() => Ok((a, b)),
            _ => Err(ApiError::malformed("query parameters a and b are required")),
        }
    }
}

/// Cohen's kappa between annotators `a` and `b` over the items both decided.
async fn get_agreement(
    State(state): State<AppState>,
    query: Result<Query<PairQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<AgreementReport> {
    let Query(q) = query.map_err(|e| ApiError::malformed(e.body_text()))?;
    let (a, b) = q.pair()?;
    let corpora = match &q.corpus {
        Some(c) => vec![c.clone()],
        None => state.store().corpus_ids(),
    };
    let mut records = Vec::new();
    for c in corpora {
        records.extend(state.store().records(&c)?);
    }
    Ok(Json(store_agreement(&records, a, b)?))
}

/// Log-odds comparison of corpora `a` and `b`.
async fn get_compare(
    State(state): State<AppState>,
    query: Result<Query<PairQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<ComparisonReport> {
    let Query(q) = query.map_err(|e| ApiError::malformed(e.body_text()))?;
    let (a, b) = q.pair()?;
    let da = state.distribution(a, q.accepted_only)?;
    let db = state.distribution(b, q.accepted_only)?;
    Ok(Json(compare_corpora(&da, &db)?))
}

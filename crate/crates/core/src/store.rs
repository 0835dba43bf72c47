//! Persistence for corpora, frame assignments and the adjudication trail.
//!
//! Each corpus lives in its own directory as an append-only JSONL event log
//! (`events.jsonl`) plus a materialized `snapshot.json` that records how many
//! log bytes it covers. Opening a store loads the snapshot and replays any
//! events written after it. Every write is appended and fsynced before the
//! in-memory state changes.
//!
//! Writes are serialized by a single lock. If another process appended to a
//! corpus log since we last read it, the write is refused with
//! [`StoreError::ConflictingConcurrentWrite`] and the corpus is reloaded, so
//! the caller can re-read and retry.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use chrono::{DateTime, Utc};
use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::{Compression, GzBuilder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::{annotate_document, AnnotatorConfig, AssignmentStatus, FrameAssignment};
use crate::taxonomy::Taxonomy;
use crate::text::nfc;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt event log for corpus {corpus}: {message}")]
    CorruptLog { corpus: String, message: String },
    #[error("invalid corpus id {0:?}: use letters, digits, '.', '_' or '-'")]
    InvalidCorpusId(String),
    #[error("unknown corpus {0}")]
    UnknownCorpus(String),
    #[error("unknown document {0}")]
    UnknownDocument(String),
    #[error("unknown assignment {0}")]
    UnknownAssignment(String),
    #[error("unknown frame {0}")]
    UnknownFrame(String),
    #[error("document {0} already exists")]
    DuplicateDocument(String),
    #[error("corpus {0} already exists")]
    CorpusExists(String),
    #[error("conflicting concurrent write on {assignment_id}: re-read and retry")]
    ConflictingConcurrentWrite { assignment_id: String },
    #[error("malformed archive: {0}")]
    MalformedArchive(String),
}

/// A source text plus descriptive metadata (speaker, date, source, corpus_id).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub text: String,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl Document {
    /// Builds a document with NFC-normalized text.
    pub fn new(doc_id: impl Into<String>, text: &str) -> Self {
        Document {
            doc_id: doc_id.into(),
            text: nfc(text).into_owned(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: &str) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    pub fn corpus_id(&self) -> Option<&str> {
        self.metadata.get("corpus_id").map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub status: AssignmentStatus,
    pub frame: String,
    #[serde(default)]
    pub annotator_id: Option<String>,
    pub timestamp: DateTime<Utc>,
}

/// An assignment together with its full review history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub assignment_id: String,
    pub assignment: FrameAssignment,
    pub history: Vec<HistoryEntry>,
    /// Set on import when a frame is missing from the current taxonomy.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub orphan: bool,
}

impl AnnotationRecord {
    /// A fresh record for an engine suggestion.
    pub fn suggested(assignment: FrameAssignment) -> Self {
        let entry = HistoryEntry {
            status: assignment.status,
            frame: assignment.frame.clone(),
            annotator_id: assignment.annotator_id.clone(),
            timestamp: assignment.decided_at,
        };
        AnnotationRecord {
            assignment_id: assignment.id(),
            assignment,
            history: vec![entry],
            orphan: false,
        }
    }

    /// Does the current state agree with the last history entry?
    pub fn is_consistent(&self) -> bool {
        self.history.last().is_some_and(|last| {
            last.status == self.assignment.status
                && Some(last.frame.as_str())
                    == match self.assignment.status {
                        AssignmentStatus::Rejected => Some(self.assignment.frame.as_str()),
                        _ => self.assignment.effective_frame(),
                    }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
    Reassign(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ImportWarning {
    /// The archive was coded against another taxonomy version.
    VersionMismatch { archive: String, current: String },
    /// Assignments whose frames are missing from the current taxonomy.
    OrphanAssignments(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImportOutcome {
    pub corpus_id: String,
    pub documents: usize,
    pub assignments: usize,
    pub warnings: Vec<ImportWarning>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalyzeSummary {
    pub corpus_id: String,
    pub documents_analyzed: usize,
    pub assignments_added: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub corpus_id: String,
    pub taxonomy_version: String,
    pub document_count: usize,
    pub assignment_count: usize,
    pub revision: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct CorpusState {
    corpus_id: String,
    taxonomy_version: String,
    documents: BTreeMap<String, Document>,
    records: BTreeMap<String, AnnotationRecord>,
    /// Number of events applied; bumps on every change.
    revision: u64,
    /// Bytes of `events.jsonl` reflected in this state.
    log_len: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum Event {
    CorpusCreated {
        corpus_id: String,
        taxonomy_version: String,
    },
    DocumentIngested {
        document: Document,
    },
    RecordsAdded {
        records: Vec<AnnotationRecord>,
    },
    DecisionRecorded {
        assignment_id: String,
        assignment: FrameAssignment,
        entry: HistoryEntry,
    },
}

impl CorpusState {
    fn apply(&mut self, event: Event) {
        self.revision += 1;
        match event {
            Event::CorpusCreated {
                corpus_id,
                taxonomy_version,
            } => {
                self.corpus_id = corpus_id;
                self.taxonomy_version = taxonomy_version;
            }
            Event::DocumentIngested { document } => {
                self.documents.insert(document.doc_id.clone(), document);
            }
            Event::RecordsAdded { records } => {
                for record in records {
                    self.records.insert(record.assignment_id.clone(), record);
                }
            }
            Event::DecisionRecorded {
                assignment_id,
                assignment,
                entry,
            } => {
                if let Some(record) = self.records.get_mut(&assignment_id) {
                    record.assignment = assignment;
                    record.history.push(entry);
                }
            }
        }
    }
}

#[derive(Debug, Default)]
struct StoreState {
    corpora: BTreeMap<String, CorpusState>,
    doc_index: HashMap<String, String>,
    assignment_index: HashMap<String, String>,
}

impl StoreState {
    fn index_corpus(&mut self, corpus: &CorpusState) {
        for id in corpus.documents.keys() {
            self.doc_index.insert(id.clone(), corpus.corpus_id.clone());
        }
        for id in corpus.records.keys() {
            self.assignment_index.insert(id.clone(), corpus.corpus_id.clone());
        }
    }

    fn corpus(&self, corpus_id: &str) -> Result<&CorpusState, StoreError> {
        self.corpora
            .get(corpus_id)
            .ok_or_else(|| StoreError::UnknownCorpus(corpus_id.to_string()))
    }
}

/// Corpus, assignment and adjudication storage.
#[derive(Debug)]
pub struct Store {
    root: Option<PathBuf>,
    state: RwLock<StoreState>,
}

fn valid_corpus_id(id: &str) -> bool {
    !id.is_empty()
        && id != "."
        && id != ".."
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}

impl Store {
    /// A store that keeps everything in memory.
    pub fn in_memory() -> Self {
        Store {
            root: None,
            state: RwLock::new(StoreState::default()),
        }
    }

    /// Opens (creating if needed) a store rooted at `root`.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, StoreError> {
        let root = root.as_ref().to_path_buf();
        let corpora_dir = root.join("corpora");
        fs::create_dir_all(&corpora_dir)?;
        let mut state = StoreState::default();
        let mut dirs: Vec<PathBuf> = fs::read_dir(&corpora_dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.join("events.jsonl").exists())
            .collect();
        dirs.sort();
        for dir in dirs {
            let corpus = load_corpus(&dir)?;
            state.index_corpus(&corpus);
            state.corpora.insert(corpus.corpus_id.clone(), corpus);
        }
        Ok(Store {
            root: Some(root),
            state: RwLock::new(state),
        })
    }

    fn corpus_dir(&self, corpus_id: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join("corpora").join(corpus_id))
    }

    /// Appends events to the corpus log (fsynced), then applies them.
    fn commit(&self, state: &mut StoreState, corpus_id: &str, events: Vec<Event>) -> Result<(), StoreError> {
        if events.is_empty() {
            return Ok(());
        }
        let mut appended = 0u64;
        if let Some(dir) = self.corpus_dir(corpus_id) {
            fs::create_dir_all(&dir)?;
            let path = dir.join("events.jsonl");
            let mut buf = Vec::new();
            for event in &events {
                serde_json::to_writer(&mut buf, event).map_err(io::Error::other)?;
                buf.push(b'\n');
            }
            let mut file = OpenOptions::new().create(true).append(true).open(&path)?;
            file.write_all(&buf)?;
            file.sync_data()?;
            appended = buf.len() as u64;
        }
        for event in &events {
            match event {
                Event::DocumentIngested { document } => {
                    state.doc_index.insert(document.doc_id.clone(), corpus_id.to_string());
                }
                Event::RecordsAdded { records } => {
                    for r in records {
                        state.assignment_index.insert(r.assignment_id.clone(), corpus_id.to_string());
                    }
                }
                _ => {}
            }
        }
        let corpus = state.corpora.entry(corpus_id.to_string()).or_default();
        for event in events {
            corpus.apply(event);
        }
        corpus.log_len += appended;
        Ok(())
    }

    /// Refuses the write if another process appended to the log since we read it.
    fn check_log_unchanged(
        &self,
        state: &mut StoreState,
        corpus_id: &str,
        assignment_id: &str,
    ) -> Result<(), StoreError> {
        let Some(dir) = self.corpus_dir(corpus_id) else {
            return Ok(());
        };
        let known = state.corpora.get(corpus_id).map_or(0, |c| c.log_len);
        let on_disk = fs::metadata(dir.join("events.jsonl")).map_or(0, |m| m.len());
        if on_disk != known {
            let fresh = load_corpus(&dir)?;
            state.index_corpus(&fresh);
            state.corpora.insert(corpus_id.to_string(), fresh);
            return Err(StoreError::ConflictingConcurrentWrite {
                assignment_id: assignment_id.to_string(),
            });
        }
        Ok(())
    }

    fn write_snapshot(&self, state: &StoreState, corpus_id: &str) -> Result<(), StoreError> {
        let (Some(dir), Some(corpus)) = (self.corpus_dir(corpus_id), state.corpora.get(corpus_id)) else {
            return Ok(());
        };
        let tmp = dir.join("snapshot.json.tmp");
        let mut out = BufWriter::new(File::create(&tmp)?);
        serde_json::to_writer(&mut out, corpus).map_err(io::Error::other)?;
        let file = out.into_inner().map_err(|e| e.into_error())?;
        file.sync_data()?;
        fs::rename(tmp, dir.join("snapshot.json"))?;
        Ok(())
    }

    /// Adds documents to a corpus, creating it on first use.
    ///
    /// Texts are NFC-normalized and the document's `corpus_id` metadata is set.
    /// Document ids must be unique across the whole store.
    pub fn ingest(
        &self,
        corpus_id: &str,
        taxonomy_version: &str,
        documents: Vec<Document>,
    ) -> Result<usize, StoreError> {
        if !valid_corpus_id(corpus_id) {
            return Err(StoreError::InvalidCorpusId(corpus_id.to_string()));
        }
        let mut state = self.state.write().expect("store lock");
        self.check_log_unchanged(&mut state, corpus_id, "")?;
        let mut events = Vec::with_capacity(documents.len() + 1);
        if !state.corpora.contains_key(corpus_id) {
            events.push(Event::CorpusCreated {
                corpus_id: corpus_id.to_string(),
                taxonomy_version: taxonomy_version.to_string(),
            });
        }
        let mut batch = std::collections::HashSet::new();
        for mut document in documents {
            if state.doc_index.contains_key(&document.doc_id) || !batch.insert(document.doc_id.clone()) {
                return Err(StoreError::DuplicateDocument(document.doc_id));
            }
            document.text = nfc(&document.text).into_owned();
            document.metadata.insert("corpus_id".into(), corpus_id.to_string());
            events.push(Event::DocumentIngested { document });
        }
        let count = batch.len();
        self.commit(&mut state, corpus_id, events)?;
        self.write_snapshot(&state, corpus_id)?;
        Ok(count)
    }

    /// Annotates every document that has no assignments yet and stores the
    /// suggestions. Documents are processed in parallel; results are stored
    /// in document-id order.
    pub fn analyze(
        &self,
        corpus_id: &str,
        taxonomy: &Taxonomy,
        config: &AnnotatorConfig,
        decided_at: DateTime<Utc>,
    ) -> Result<AnalyzeSummary, StoreError> {
        let mut state = self.state.write().expect("store lock");
        self.check_log_unchanged(&mut state, corpus_id, "")?;
        let corpus = state.corpus(corpus_id)?;
        let mut analyzed: std::collections::HashSet<&str> = std::collections::HashSet::new();
        for record in corpus.records.values() {
            analyzed.insert(&record.assignment.candidate.doc_id);
        }
        let pending: Vec<&Document> = corpus
            .documents
            .values()
            .filter(|d| !analyzed.contains(d.doc_id.as_str()))
            .collect();
        let documents_analyzed = pending.len();
        let records: Vec<AnnotationRecord> = pending
            .par_iter()
            .map(|doc| annotate_document(doc, taxonomy, config, decided_at).assignments)
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .map(AnnotationRecord::suggested)
            .collect();
        let assignments_added = records.len();
        if !records.is_empty() {
            self.commit(&mut state, corpus_id, vec![Event::RecordsAdded { records }])?;
            self.write_snapshot(&state, corpus_id)?;
        }
        Ok(AnalyzeSummary {
            corpus_id: corpus_id.to_string(),
            documents_analyzed,
            assignments_added,
        })
    }

    /// Applies a reviewer decision and appends it to the record's history.
    ///
    /// When `expected_history_len` is given and the record has moved on since
    /// the caller read it, the write is refused as a conflict. Reassigning to
    /// the frame already suggested counts as acceptance.
    pub fn record_decision(
        &self,
        assignment_id: &str,
        decision: &Decision,
        annotator_id: &str,
        taxonomy: &Taxonomy,
        expected_history_len: Option<usize>,
        at: DateTime<Utc>,
    ) -> Result<AnnotationRecord, StoreError> {
        if let Decision::Reassign(slug) = decision {
            if !taxonomy.contains(slug) {
                return Err(StoreError::UnknownFrame(slug.clone()));
            }
        }
        let mut state = self.state.write().expect("store lock");
        let corpus_id = state
            .assignment_index
            .get(assignment_id)
            .cloned()
            .ok_or_else(|| StoreError::UnknownAssignment(assignment_id.to_string()))?;
        self.check_log_unchanged(&mut state, &corpus_id, assignment_id)?;
        let record = state
            .corpus(&corpus_id)?
            .records
            .get(assignment_id)
            .ok_or_else(|| StoreError::UnknownAssignment(assignment_id.to_string()))?;
        if expected_history_len.is_some_and(|n| n != record.history.len()) {
            return Err(StoreError::ConflictingConcurrentWrite {
                assignment_id: assignment_id.to_string(),
            });
        }

        let mut assignment = record.assignment.clone();
        let (status, after_review, entry_frame) = match decision {
            Decision::Accept => (AssignmentStatus::Accepted, None, assignment.frame.clone()),
            Decision::Reject => (AssignmentStatus::Rejected, None, assignment.frame.clone()),
            Decision::Reassign(slug) if *slug == assignment.frame => {
                (AssignmentStatus::Accepted, None, assignment.frame.clone())
            }
            Decision::Reassign(slug) => (AssignmentStatus::Reassigned, Some(slug.clone()), slug.clone()),
        };
        assignment.status = status;
        assignment.assigned_frame_after_review = after_review;
        assignment.annotator_id = Some(annotator_id.to_string());
        assignment.decided_at = at;
        let entry = HistoryEntry {
            status,
            frame: entry_frame,
            annotator_id: Some(annotator_id.to_string()),
            timestamp: at,
        };
        self.commit(
            &mut state,
            &corpus_id,
            vec![Event::DecisionRecorded {
                assignment_id: assignment_id.to_string(),
                assignment,
                entry,
            }],
        )?;
        Ok(state.corpora[&corpus_id].records[assignment_id].clone())
    }

    pub fn corpus_ids(&self) -> Vec<String> {
        self.state.read().expect("store lock").corpora.keys().cloned().collect()
    }

    pub fn corpus_summaries(&self) -> Vec<CorpusSummary> {
        let state = self.state.read().expect("store lock");
        state
            .corpora
            .values()
            .map(|c| CorpusSummary {
                corpus_id: c.corpus_id.clone(),
                taxonomy_version: c.taxonomy_version.clone(),
                document_count: c.documents.len(),
                assignment_count: c.records.len(),
                revision: c.revision,
            })
            .collect()
    }

    pub fn revision(&self, corpus_id: &str) -> Result<u64, StoreError> {
        Ok(self.state.read().expect("store lock").corpus(corpus_id)?.revision)
    }

    pub fn taxonomy_version(&self, corpus_id: &str) -> Result<String, StoreError> {
        Ok(self.state.read().expect("store lock").corpus(corpus_id)?.taxonomy_version.clone())
    }

    /// Documents of a corpus in id order.
    pub fn documents(&self, corpus_id: &str) -> Result<Vec<Document>, StoreError> {
        Ok(self
            .state
            .read()
            .expect("store lock")
            .corpus(corpus_id)?
            .documents
            .values()
            .cloned()
            .collect())
    }

    pub fn document(&self, doc_id: &str) -> Result<Document, StoreError> {
        let state = self.state.read().expect("store lock");
        let corpus_id = state
            .doc_index
            .get(doc_id)
            .ok_or_else(|| StoreError::UnknownDocument(doc_id.to_string()))?;
        Ok(state.corpora[corpus_id].documents[doc_id].clone())
    }

    /// Records of a corpus in assignment-id order.
    pub fn records(&self, corpus_id: &str) -> Result<Vec<AnnotationRecord>, StoreError> {
        Ok(self
            .state
            .read()
            .expect("store lock")
            .corpus(corpus_id)?
            .records
            .values()
            .cloned()
            .collect())
    }

    /// Records of one document ordered by span start.
    pub fn document_records(&self, doc_id: &str) -> Result<Vec<AnnotationRecord>, StoreError> {
        let state = self.state.read().expect("store lock");
        let corpus_id = state
            .doc_index
            .get(doc_id)
            .ok_or_else(|| StoreError::UnknownDocument(doc_id.to_string()))?;
        let mut records: Vec<AnnotationRecord> = state.corpora[corpus_id]
            .records
            .values()
            .filter(|r| r.assignment.candidate.doc_id == doc_id)
            .cloned()
            .collect();
        records.sort_by_key(|r| r.assignment.candidate.span);
        Ok(records)
    }

    pub fn record(&self, assignment_id: &str) -> Result<AnnotationRecord, StoreError> {
        let state = self.state.read().expect("store lock");
        let corpus_id = state
            .assignment_index
            .get(assignment_id)
            .ok_or_else(|| StoreError::UnknownAssignment(assignment_id.to_string()))?;
        Ok(state.corpora[corpus_id].records[assignment_id].clone())
    }

    /// Non-orphan assignments of a corpus, for analytics.
    pub fn assignments(&self, corpus_id: &str) -> Result<Vec<FrameAssignment>, StoreError> {
        Ok(self
            .state
            .read()
            .expect("store lock")
            .corpus(corpus_id)?
            .records
            .values()
            .filter(|r| !r.orphan)
            .map(|r| r.assignment.clone())
            .collect())
    }

    /// Serializes a corpus to a gzip-compressed tar archive.
    ///
    /// The archive holds `documents.jsonl`, `assignments.jsonl`,
    /// `history.jsonl` and `taxonomy_version.txt`. Output is deterministic:
    /// entries are written in a fixed order with zeroed timestamps.
    pub fn export_corpus(&self, corpus_id: &str) -> Result<Vec<u8>, StoreError> {
        let state = self.state.read().expect("store lock");
        let corpus = state.corpus(corpus_id)?;
        let files = archive_files(corpus)?;
        let encoder = GzBuilder::new().mtime(0).write(Vec::new(), Compression::default());
        let mut builder = tar::Builder::new(encoder);
        builder.mode(tar::HeaderMode::Deterministic);
        for (name, body) in files {
            let mut header = tar::Header::new_gnu();
            header.set_size(body.len() as u64);
            header.set_mode(0o644);
            header.set_mtime(0);
            header.set_cksum();
            builder.append_data(&mut header, name, body.as_slice())?;
        }
        let encoder: GzEncoder<Vec<u8>> = builder.into_inner()?;
        Ok(encoder.finish()?)
    }

    /// Loads an exported corpus into this store.
    ///
    /// The corpus id comes from the documents' `corpus_id` metadata unless
    /// `corpus_id` overrides it. A differing taxonomy version is reported as
    /// a warning, and assignments naming frames unknown to `taxonomy` are
    /// imported flagged as orphans, which analytics skip.
    pub fn import_corpus(
        &self,
        archive: &[u8],
        taxonomy: &Taxonomy,
        corpus_id: Option<&str>,
    ) -> Result<ImportOutcome, StoreError> {
        let parsed = parse_archive(archive)?;
        let corpus_id = match corpus_id {
            Some(id) => id.to_string(),
            None => {
                let mut ids = parsed.documents.iter().filter_map(|d| d.corpus_id());
                let first = ids
                    .next()
                    .ok_or_else(|| StoreError::MalformedArchive("archive names no corpus_id".into()))?
                    .to_string();
                if ids.any(|id| id != first) {
                    return Err(StoreError::MalformedArchive("documents disagree on corpus_id".into()));
                }
                first
            }
        };
        if !valid_corpus_id(&corpus_id) {
            return Err(StoreError::InvalidCorpusId(corpus_id));
        }

        let mut warnings = Vec::new();
        if parsed.taxonomy_version != taxonomy.version() {
            warnings.push(ImportWarning::VersionMismatch {
                archive: parsed.taxonomy_version.clone(),
                current: taxonomy.version().to_string(),
            });
        }
        let mut orphans = Vec::new();
        let mut records = parsed.records;
        for record in &mut records {
            let a = &record.assignment;
            let known = taxonomy.contains(&a.frame)
                && a.assigned_frame_after_review.as_deref().is_none_or(|f| taxonomy.contains(f));
            if !known {
                record.orphan = true;
                orphans.push(record.assignment_id.clone());
            }
        }
        if !orphans.is_empty() {
            warnings.push(ImportWarning::OrphanAssignments(orphans));
        }

        let mut state = self.state.write().expect("store lock");
        if state.corpora.contains_key(&corpus_id) {
            return Err(StoreError::CorpusExists(corpus_id));
        }
        if let Some(dir) = self.corpus_dir(&corpus_id) {
            if dir.join("events.jsonl").exists() {
                return Err(StoreError::CorpusExists(corpus_id));
            }
        }
        for d in &parsed.documents {
            if state.doc_index.contains_key(&d.doc_id) {
                return Err(StoreError::DuplicateDocument(d.doc_id.clone()));
            }
        }
        let documents = parsed.documents.len();
        let assignments = records.len();
        let mut events = vec![Event::CorpusCreated {
            corpus_id: corpus_id.clone(),
            taxonomy_version: parsed.taxonomy_version,
        }];
        events.extend(parsed.documents.into_iter().map(|document| Event::DocumentIngested { document }));
        if !records.is_empty() {
            events.push(Event::RecordsAdded { records });
        }
        self.commit(&mut state, &corpus_id, events)?;
        self.write_snapshot(&state, &corpus_id)?;
        Ok(ImportOutcome {
            corpus_id,
            documents,
            assignments,
            warnings,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct AssignmentLine {
    assignment_id: String,
    #[serde(flatten)]
    assignment: FrameAssignment,
}

#[derive(Serialize, Deserialize)]
struct HistoryLine {
    assignment_id: String,
    #[serde(flatten)]
    entry: HistoryEntry,
}

const ARCHIVE_FILES: [&str; 4] = [
    "documents.jsonl",
    "assignments.jsonl",
    "history.jsonl",
    "taxonomy_version.txt",
];

fn jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> Result<Vec<u8>, StoreError> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, &item).map_err(io::Error::other)?;
        out.push(b'\n');
    }
    Ok(out)
}

fn archive_files(corpus: &CorpusState) -> Result<Vec<(&'static str, Vec<u8>)>, StoreError> {
    let documents = jsonl(corpus.documents.values())?;
    let assignments = jsonl(corpus.records.values().map(|r| AssignmentLine {
        assignment_id: r.assignment_id.clone(),
        assignment: r.assignment.clone(),
    }))?;
    let history = jsonl(corpus.records.values().flat_map(|r| {
        r.history.iter().map(|entry| HistoryLine {
            assignment_id: r.assignment_id.clone(),
            entry: entry.clone(),
        })
    }))?;
    let version = format!("{}\n", corpus.taxonomy_version).into_bytes();
    Ok(vec![
        (ARCHIVE_FILES[0], documents),
        (ARCHIVE_FILES[1], assignments),
        (ARCHIVE_FILES[2], history),
        (ARCHIVE_FILES[3], version),
    ])
}

struct ParsedArchive {
    documents: Vec<Document>,
    records: Vec<AnnotationRecord>,
    taxonomy_version: String,
}

fn parse_lines<T: for<'de> Deserialize<'de>>(name: &str, body: &[u8]) -> Result<Vec<T>, StoreError> {
    let text = std::str::from_utf8(body).map_err(|_| StoreError::MalformedArchive(format!("{name} is not UTF-8")))?;
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line)
                .map_err(|e| StoreError::MalformedArchive(format!("{name} line {}: {e}", i + 1)))
        })
        .collect()
}

fn parse_archive(bytes: &[u8]) -> Result<ParsedArchive, StoreError> {
    let malformed = |e: io::Error| StoreError::MalformedArchive(e.to_string());
    let mut archive = tar::Archive::new(GzDecoder::new(bytes));
    let mut files: HashMap<String, Vec<u8>> = HashMap::new();
    for entry in archive.entries().map_err(malformed)? {
        let mut entry = entry.map_err(malformed)?;
        let name = entry.path().map_err(malformed)?.to_string_lossy().into_owned();
        let mut body = Vec::new();
        entry.read_to_end(&mut body).map_err(malformed)?;
        files.insert(name, body);
    }
    for name in ARCHIVE_FILES {
        if !files.contains_key(name) {
            return Err(StoreError::MalformedArchive(format!("missing {name}")));
        }
    }
    let documents: Vec<Document> = parse_lines("documents.jsonl", &files["documents.jsonl"])?;
    let lines: Vec<AssignmentLine> = parse_lines("assignments.jsonl", &files["assignments.jsonl"])?;
    let history: Vec<HistoryLine> = parse_lines("history.jsonl", &files["history.jsonl"])?;
    let taxonomy_version = std::str::from_utf8(&files["taxonomy_version.txt"])
        .map_err(|_| StoreError::MalformedArchive("taxonomy_version.txt is not UTF-8".into()))?
        .trim_end_matches('\n')
        .to_string();

    let doc_ids: std::collections::HashSet<&str> = documents.iter().map(|d| d.doc_id.as_str()).collect();
    if doc_ids.len() != documents.len() {
        return Err(StoreError::MalformedArchive("duplicate doc_id".into()));
    }
    let mut records: BTreeMap<String, AnnotationRecord> = BTreeMap::new();
    for line in lines {
        if !doc_ids.contains(line.assignment.candidate.doc_id.as_str()) {
            return Err(StoreError::MalformedArchive(format!(
                "assignment {} references unknown document",
                line.assignment_id
            )));
        }
        let record = AnnotationRecord {
            assignment_id: line.assignment_id.clone(),
            assignment: line.assignment,
            history: Vec::new(),
            orphan: false,
        };
        if records.insert(line.assignment_id.clone(), record).is_some() {
            return Err(StoreError::MalformedArchive(format!("duplicate assignment {}", line.assignment_id)));
        }
    }
    for line in history {
        records
            .get_mut(&line.assignment_id)
            .ok_or_else(|| {
                StoreError::MalformedArchive(format!("history for unknown assignment {}", line.assignment_id))
            })?
            .history
            .push(line.entry);
    }
    if let Some(r) = records.values().find(|r| r.history.is_empty()) {
        return Err(StoreError::MalformedArchive(format!("assignment {} has no history", r.assignment_id)));
    }
    Ok(ParsedArchive {
        documents,
        records: records.into_values().collect(),
        taxonomy_version,
    })
}

/// Loads a corpus directory: snapshot first, then any newer log events.
fn load_corpus(dir: &Path) -> Result<CorpusState, StoreError> {
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let corrupt = |message: String| StoreError::CorruptLog {
        corpus: name.clone(),
        message,
    };
    let log_path = dir.join("events.jsonl");
    let log_len = fs::metadata(&log_path)?.len();
    let mut state = fs::read(dir.join("snapshot.json"))
        .ok()
        .and_then(|bytes| serde_json::from_slice::<CorpusState>(&bytes).ok())
        .filter(|s| s.log_len <= log_len)
        .unwrap_or_default();

    let mut file = File::open(&log_path)?;
    file.seek(SeekFrom::Start(state.log_len))?;
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    let mut offset = state.log_len;
    loop {
        line.clear();
        let n = reader.read_line(&mut line)?;
        if n == 0 {
            break;
        }
        if !line.ends_with('\n') {
            // A torn final write never completed; it was not acknowledged.
            break;
        }
        let event: Event = serde_json::from_str(&line).map_err(|e| corrupt(format!("byte {offset}: {e}")))?;
        state.apply(event);
        offset += n as u64;
    }
    state.log_len = offset;
    if state.corpus_id.is_empty() {
        return Err(corrupt("log does not start with corpus_created".into()));
    }
    Ok(state)
}

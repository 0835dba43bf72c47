//! Candidate identification, frame classification and blend detection.
//!
//! Identification approximates the metaphor-identification step with
//! lexicon membership: any token run whose lemmas spell a registry lexeme is
//! a candidate. Corpora about a literal topic (a military history corpus, say)
//! can list that frame in [`AnnotatorConfig::literal_topics`]; matches of its
//! lexemes are still reported but marked suppressed, and never classified.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::find_matches;
use crate::store::Document;
use crate::taxonomy::{LexemeRef, Taxonomy, Weight};
use crate::text::{lemma_key, segment, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown frame {0} in literal_topics")]
    UnknownFrame(String),
    #[error("blend_window_sentences must be at least 1")]
    EmptyWindow,
    #[error("min_score must not be negative")]
    NegativeMinScore,
    #[error("malformed annotator config: {0}")]
    Malformed(String),
}

fn default_window() -> usize {
    2
}

fn zero_weight() -> Weight {
    Weight::integer(0)
}

/// Per-corpus annotation settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatorConfig {
    #[serde(default)]
    pub literal_topics: Vec<String>,
    #[serde(default = "default_window")]
    pub blend_window_sentences: usize,
    #[serde(default = "zero_weight")]
    pub min_score: Weight,
}

impl Default for AnnotatorConfig {
    fn default() -> Self {
        AnnotatorConfig {
            literal_topics: Vec::new(),
            blend_window_sentences: default_window(),
            min_score: zero_weight(),
        }
    }
}

impl AnnotatorConfig {
    pub fn from_json(source: &str, taxonomy: &Taxonomy) -> Result<Self, ConfigError> {
        let config: AnnotatorConfig =
            serde_json::from_str(source).map_err(|e| ConfigError::Malformed(e.to_string()))?;
        config.validate(taxonomy)?;
        Ok(config)
    }

    pub fn validate(&self, taxonomy: &Taxonomy) -> Result<(), ConfigError> {
        if let Some(slug) = self.literal_topics.iter().find(|s| !taxonomy.contains(s)) {
            return Err(ConfigError::UnknownFrame(slug.clone()));
        }
        if self.blend_window_sentences == 0 {
            return Err(ConfigError::EmptyWindow);
        }
        if self.min_score.ratio() < Ratio::from_integer(0) {
            return Err(ConfigError::NegativeMinScore);
        }
        Ok(())
    }
}

/// A span of text flagged as potentially metaphoric.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CandidateMetaphor {
    pub doc_id: String,
    /// Character offsets `[start, end)` into the NFC-normalized document text.
    pub span: (usize, usize),
    pub matched_lexeme: String,
    pub sentence_index: usize,
    pub suppressed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suppression_reason: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignmentStatus {
    Suggested,
    Accepted,
    Rejected,
    Reassigned,
}

impl AssignmentStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            AssignmentStatus::Suggested => "suggested",
            AssignmentStatus::Accepted => "accepted",
            AssignmentStatus::Rejected => "rejected",
            AssignmentStatus::Reassigned => "reassigned",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "suggested" => Some(AssignmentStatus::Suggested),
            "accepted" => Some(AssignmentStatus::Accepted),
            "rejected" => Some(AssignmentStatus::Rejected),
            "reassigned" => Some(AssignmentStatus::Reassigned),
            _ => None,
        }
    }
}

/// A candidate labelled with a frame, plus its review state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameAssignment {
    pub candidate: CandidateMetaphor,
    pub frame: String,
    pub score: Weight,
    pub status: AssignmentStatus,
    #[serde(default)]
    pub assigned_frame_after_review: Option<String>,
    #[serde(default)]
    pub annotator_id: Option<String>,
    pub decided_at: DateTime<Utc>,
}

impl FrameAssignment {
    /// Stable identifier: document id plus character span.
    pub fn id(&self) -> String {
        assignment_id(&self.candidate.doc_id, self.candidate.span)
    }

    /// The frame this assignment counts toward, or `None` when rejected.
    pub fn effective_frame(&self) -> Option<&str> {
        match self.status {
            AssignmentStatus::Rejected => None,
            AssignmentStatus::Reassigned => self.assigned_frame_after_review.as_deref(),
            AssignmentStatus::Suggested | AssignmentStatus::Accepted => Some(&self.frame),
        }
    }
}

pub fn assignment_id(doc_id: &str, span: (usize, usize)) -> String {
    format!("{doc_id}#{}-{}", span.0, span.1)
}

/// Two frames co-occurring within a sentence window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlendInstance {
    pub doc_id: String,
    /// Slugs in lexicographic order.
    pub frame_pair: (String, String),
    /// Inclusive sentence range covering both pieces of evidence.
    pub window: (usize, usize),
    pub evidence: (CandidateMetaphor, CandidateMetaphor),
}

/// Everything the annotator produces for one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentAnnotation {
    pub doc_id: String,
    pub token_count: usize,
    pub candidates: Vec<CandidateMetaphor>,
    pub assignments: Vec<FrameAssignment>,
    pub blends: Vec<BlendInstance>,
}

/// Flags every lexeme match in `doc` as a candidate.
pub fn identify_candidates(
    doc: &Document,
    taxonomy: &Taxonomy,
    config: &AnnotatorConfig,
) -> Vec<CandidateMetaphor> {
    let tokens = segment(&doc.text);
    identify_in_tokens(&doc.doc_id, &tokens, taxonomy, config)
}

/// As [`identify_candidates`], over an already segmented document.
pub fn identify_in_tokens(
    doc_id: &str,
    tokens: &[Token],
    taxonomy: &Taxonomy,
    config: &AnnotatorConfig,
) -> Vec<CandidateMetaphor> {
    let literal: BTreeSet<usize> = config
        .literal_topics
        .iter()
        .filter_map(|slug| taxonomy.index_of(slug))
        .collect();
    find_matches(tokens, taxonomy)
        .into_iter()
        .map(|m| {
            let owners = m.owners(taxonomy);
            let literal_owner = owners.iter().map(|r| r.frame).filter(|f| literal.contains(f)).min();
            let first = owners[0];
            CandidateMetaphor {
                doc_id: doc_id.to_string(),
                span: (tokens[m.start].char_start, tokens[m.end - 1].char_end),
                matched_lexeme: taxonomy.lexeme(first).text.clone(),
                sentence_index: tokens[m.start].sentence_index,
                suppressed: literal_owner.is_some(),
                suppression_reason: literal_owner
                    .map(|f| format!("literal topic: {}", taxonomy.frames()[f].id)),
            }
        })
        .collect()
}

/// Picks the owning frame of a lexeme: a nested frame beats its own parent,
/// then highest weight, lowest salience rank, earliest registry position.
pub fn resolve_owner(owners: &[LexemeRef], taxonomy: &Taxonomy) -> Option<LexemeRef> {
    let frames = taxonomy.frames();
    owners
        .iter()
        .copied()
        .filter(|r| {
            let id = &frames[r.frame].id;
            !owners
                .iter()
                .any(|o| frames[o.frame].parent.as_deref() == Some(id.as_str()))
        })
        .min_by(|a, b| {
            let (la, lb) = (taxonomy.lexeme(*a), taxonomy.lexeme(*b));
            lb.weight
                .cmp(&la.weight)
                .then(la.salience_rank.cmp(&lb.salience_rank))
                .then(a.frame.cmp(&b.frame))
        })
}

/// Assigns each unsuppressed candidate to a frame with status `suggested`.
pub fn classify_candidates(
    candidates: &[CandidateMetaphor],
    taxonomy: &Taxonomy,
    decided_at: DateTime<Utc>,
) -> Vec<FrameAssignment> {
    candidates
        .iter()
        .filter(|c| !c.suppressed)
        .filter_map(|c| {
            let key = lemma_key(&c.matched_lexeme);
            let owner = resolve_owner(taxonomy.owners(&key), taxonomy)?;
            Some(FrameAssignment {
                candidate: c.clone(),
                frame: taxonomy.frames()[owner.frame].id.clone(),
                score: taxonomy.lexeme(owner).weight,
                status: AssignmentStatus::Suggested,
                assigned_frame_after_review: None,
                annotator_id: None,
                decided_at,
            })
        })
        .collect()
}

/// Finds pairs of distinct frames whose assignments fall within
/// `window_sentences` consecutive sentences of each other.
///
/// Rejected assignments are ignored and reassigned ones count under their
/// reviewed frame. One instance is emitted per document, frame pair and
/// sentence range; the output does not depend on input order.
pub fn detect_blends(assignments: &[FrameAssignment], window_sentences: usize) -> Vec<BlendInstance> {
    let mut by_doc: BTreeMap<&str, Vec<(&FrameAssignment, &str)>> = BTreeMap::new();
    for a in assignments {
        if let Some(frame) = a.effective_frame() {
            by_doc.entry(&a.candidate.doc_id).or_default().push((a, frame));
        }
    }
    let mut blends = Vec::new();
    for (doc_id, mut items) in by_doc {
        items.sort_by(|(a, fa), (b, fb)| {
            (a.candidate.sentence_index, a.candidate.span, *fa)
                .cmp(&(b.candidate.sentence_index, b.candidate.span, *fb))
        });
        let mut seen: BTreeMap<((&str, &str), (usize, usize)), (usize, usize)> = BTreeMap::new();
        for i in 0..items.len() {
            let si = items[i].0.candidate.sentence_index;
            for j in i + 1..items.len() {
                let sj = items[j].0.candidate.sentence_index;
                if sj - si >= window_sentences {
                    break;
                }
                let (fi, fj) = (items[i].1, items[j].1);
                if fi == fj {
                    continue;
                }
                let pair = if fi < fj { (fi, fj) } else { (fj, fi) };
                seen.entry((pair, (si, sj))).or_insert((i, j));
            }
        }
        for (((a, b), window), (i, j)) in seen {
            blends.push(BlendInstance {
                doc_id: doc_id.to_string(),
                frame_pair: (a.to_string(), b.to_string()),
                window,
                evidence: (items[i].0.candidate.clone(), items[j].0.candidate.clone()),
            });
        }
    }
    blends
}

/// Runs identification, classification and blend detection on one document.
pub fn annotate_document(
    doc: &Document,
    taxonomy: &Taxonomy,
    config: &AnnotatorConfig,
    decided_at: DateTime<Utc>,
) -> DocumentAnnotation {
    let tokens = segment(&doc.text);
    let candidates = identify_in_tokens(&doc.doc_id, &tokens, taxonomy, config);
    let assignments: Vec<FrameAssignment> = classify_candidates(&candidates, taxonomy, decided_at)
        .into_iter()
        .filter(|a| a.score >= config.min_score)
        .collect();
    let blends = detect_blends(&assignments, config.blend_window_sentences);
    DocumentAnnotation {
        doc_id: doc.doc_id.clone(),
        token_count: tokens.len(),
        candidates,
        assignments,
        blends,
    }
}

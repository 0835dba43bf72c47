//! Corpus statistics: frame distributions, absence, keyness and agreement.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::{AssignmentStatus, FrameAssignment};
use crate::store::{AnnotationRecord, Document, Store, StoreError};
use crate::taxonomy::Taxonomy;
use crate::text::token_count;

/// Label used in agreement data for a rejected candidate.
pub const REJECT_LABEL: &str = "REJECT";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error("assignment {assignment_id} refers to document {doc_id}, which is not in the corpus")]
    ForeignAssignment { assignment_id: String, doc_id: String },
    #[error("assignment {assignment_id} uses frame {frame}, unknown to the taxonomy")]
    UnknownFrame { assignment_id: String, frame: String },
    #[error("distributions use different taxonomy versions ({a} vs {b})")]
    TaxonomyMismatch { a: String, b: String },
    #[error("annotators coded different items (first difference: {item_id})")]
    ItemMismatch { item_id: String },
    #[error("item {0} is coded twice by one annotator")]
    DuplicateItem(String),
    #[error("no items to compare")]
    NoItems,
    #[error("expected agreement is 1; kappa is undefined")]
    DegenerateMarginals,
}

/// The documents of one corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub corpus_id: String,
    pub documents: Vec<Document>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountingMode {
    /// Accepted and reassigned decisions plus unreviewed suggestions.
    #[default]
    IncludeSuggested,
    /// Reviewed decisions only.
    AcceptedOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameCount {
    pub count: u64,
    /// Assignments per 1000 tokens.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDistribution {
    pub corpus_id: String,
    pub taxonomy_version: String,
    pub token_count: u64,
    /// Effective assignments counted.
    pub assignment_count: u64,
    /// Every frame, in registry order.
    pub per_frame: IndexMap<String, FrameCount>,
    pub present: Vec<String>,
    pub absent: Vec<String>,
}

/// The frame an assignment counts under, if it counts at all.
pub fn counted_frame(a: &FrameAssignment, mode: CountingMode) -> Option<&str> {
    match (a.status, mode) {
        (AssignmentStatus::Suggested, CountingMode::AcceptedOnly) => None,
        _ => a.effective_frame(),
    }
}

/// Counts effective assignments per frame and reports which frames are absent.
pub fn frame_distribution(
    corpus: &Corpus,
    assignments: &[FrameAssignment],
    taxonomy: &Taxonomy,
    mode: CountingMode,
) -> Result<FrameDistribution, AnalyticsError> {
    let doc_ids: HashSet<&str> = corpus.documents.iter().map(|d| d.doc_id.as_str()).collect();
    let mut counts = vec![0u64; taxonomy.frames().len()];
    for a in assignments {
        if !doc_ids.contains(a.candidate.doc_id.as_str()) {
            return Err(AnalyticsError::ForeignAssignment {
                assignment_id: a.id(),
                doc_id: a.candidate.doc_id.clone(),
            });
        }
        if let Some(frame) = counted_frame(a, mode) {
            let i = taxonomy.index_of(frame).ok_or_else(|| AnalyticsError::UnknownFrame {
                assignment_id: a.id(),
                frame: frame.to_string(),
            })?;
            counts[i] += 1;
        }
    }
    let tokens: u64 = corpus
        .documents
        .par_iter()
        .map(|d| token_count(&d.text) as u64)
        .sum();

    let mut per_frame = IndexMap::with_capacity(counts.len());
    let (mut present, mut absent) = (Vec::new(), Vec::new());
    for (frame, &count) in taxonomy.frames().iter().zip(&counts) {
        let density = if tokens == 0 {
            0.0
        } else {
            1000.0 * count as f64 / tokens as f64
        };
        per_frame.insert(frame.id.clone(), FrameCount { count, density });
        if count > 0 {
            present.push(frame.id.clone());
        } else {
            absent.push(frame.id.clone());
        }
    }
    Ok(FrameDistribution {
        corpus_id: corpus.corpus_id.clone(),
        taxonomy_version: taxonomy.version().to_string(),
        token_count: tokens,
        assignment_count: counts.iter().sum(),
        per_frame,
        present,
        absent,
    })
}

#[derive(Debug, Error)]
pub enum StoredReportError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

/// Distribution of a stored corpus. Orphaned assignments are skipped and the
/// result carries the taxonomy version the corpus was coded against.
pub fn stored_distribution(
    store: &Store,
    corpus_id: &str,
    taxonomy: &Taxonomy,
    mode: CountingMode,
) -> Result<FrameDistribution, StoredReportError> {
    let corpus = Corpus {
        corpus_id: corpus_id.to_string(),
        documents: store.documents(corpus_id)?,
    };
    let mut distribution = frame_distribution(&corpus, &store.assignments(corpus_id)?, taxonomy, mode)?;
    distribution.taxonomy_version = store.taxonomy_version(corpus_id)?;
    Ok(distribution)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameComparison {
    pub count_a: u64,
    pub count_b: u64,
    pub log_odds_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub corpus_a: String,
    pub corpus_b: String,
    pub taxonomy_version: String,
    pub per_frame: IndexMap<String, FrameComparison>,
    /// Slugs by |log_odds_ratio| descending, ties by slug.
    pub ranked: Vec<String>,
}

/// Smoothed log odds of `count` out of `total`.
fn log_odds(count: u64, total: u64) -> f64 {
    (count as f64 + 0.5).ln() - ((total - count) as f64 + 0.5).ln()
}

/// Log-odds keyness of every frame between two distributions (0.5 smoothing).
pub fn compare_corpora(a: &FrameDistribution, b: &FrameDistribution) -> Result<ComparisonReport, AnalyticsError> {
    if a.taxonomy_version != b.taxonomy_version || !a.per_frame.keys().eq(b.per_frame.keys()) {
        return Err(AnalyticsError::TaxonomyMismatch {
            a: a.taxonomy_version.clone(),
            b: b.taxonomy_version.clone(),
        });
    }
    let per_frame: IndexMap<String, FrameComparison> = a
        .per_frame
        .iter()
        .map(|(slug, fa)| {
            let fb = &b.per_frame[slug];
            let lor = log_odds(fa.count, a.assignment_count) - log_odds(fb.count, b.assignment_count);
            (
                slug.clone(),
                FrameComparison {
                    count_a: fa.count,
                    count_b: fb.count,
                    log_odds_ratio: lor,
                },
            )
        })
        .collect();
    let mut ranked: Vec<String> = per_frame.keys().cloned().collect();
    ranked.sort_by(|x, y| {
        let (lx, ly) = (per_frame[x].log_odds_ratio.abs(), per_frame[y].log_odds_ratio.abs());
        ly.total_cmp(&lx).then_with(|| x.cmp(y))
    });
    Ok(ComparisonReport {
        corpus_a: a.corpus_id.clone(),
        corpus_b: b.corpus_id.clone(),
        taxonomy_version: a.taxonomy_version.clone(),
        per_frame,
        ranked,
    })
}

/// One annotator's label for one item: a frame slug or [`REJECT_LABEL`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingDecision {
    pub item_id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub annotator_pair: (String, String),
    pub item_count: u64,
    pub observed_agreement: f64,
    pub expected_agreement: f64,
    pub kappa: f64,
    /// One-vs-rest kappa per frame label; `None` where undefined.
    pub per_frame_kappa: BTreeMap<String, Option<f64>>,
}

/// Kappa from integer tallies: `agree` matching items out of `n`, and
/// `chance` = Σ_k n_a(k)·n_b(k). Exact up to the final division.
fn kappa_from_counts(n: u64, agree: u64, chance: u128) -> Option<f64> {
    let n2 = u128::from(n) * u128::from(n);
    if chance == n2 {
        return None;
    }
    let num = i128::try_from(u128::from(agree) * u128::from(n)).ok()? - i128::try_from(chance).ok()?;
    let den = i128::try_from(n2 - chance).ok()?;
    Some(num as f64 / den as f64)
}

fn index_decisions(decisions: &[CodingDecision]) -> Result<BTreeMap<&str, &str>, AnalyticsError> {
    let mut map = BTreeMap::new();
    for d in decisions {
        if map.insert(d.item_id.as_str(), d.label.as_str()).is_some() {
            return Err(AnalyticsError::DuplicateItem(d.item_id.clone()));
        }
    }
    Ok(map)
}

/// Cohen's kappa between two annotators over the same items, with one-vs-rest
/// kappa for each frame label.
pub fn cohens_kappa(
    annotator_a: &str,
    decisions_a: &[CodingDecision],
    annotator_b: &str,
    decisions_b: &[CodingDecision],
) -> Result<AgreementReport, AnalyticsError> {
    let a = index_decisions(decisions_a)?;
    let b = index_decisions(decisions_b)?;
    if let Some(item) = a.keys().find(|k| !b.contains_key(*k)).or_else(|| b.keys().find(|k| !a.contains_key(*k))) {
        return Err(AnalyticsError::ItemMismatch { item_id: item.to_string() });
    }
    let n = a.len() as u64;
    if n == 0 {
        return Err(AnalyticsError::NoItems);
    }
    let mut agree = 0u64;
    let mut marg: HashMap<&str, (u64, u64)> = HashMap::new();
    for (item, la) in &a {
        let lb = b[item];
        agree += u64::from(*la == lb);
        marg.entry(la).or_default().0 += 1;
        marg.entry(lb).or_default().1 += 1;
    }
    let chance: u128 = marg.values().map(|&(x, y)| u128::from(x) * u128::from(y)).sum();
    let kappa = kappa_from_counts(n, agree, chance).ok_or(AnalyticsError::DegenerateMarginals)?;

    let labels: BTreeSet<&str> = marg.keys().copied().filter(|l| *l != REJECT_LABEL).collect();
    let per_frame_kappa = labels
        .into_iter()
        .map(|k| {
            let (mut agree_k, mut xa, mut xb) = (0u64, 0u64, 0u64);
            for (item, la) in &a {
                let (ia, ib) = (*la == k, b[item] == k);
                agree_k += u64::from(ia == ib);
                xa += u64::from(ia);
                xb += u64::from(ib);
            }
            let chance_k = u128::from(xa) * u128::from(xb) + u128::from(n - xa) * u128::from(n - xb);
            (k.to_string(), kappa_from_counts(n, agree_k, chance_k))
        })
        .collect();

    let nf = n as f64;
    Ok(AgreementReport {
        annotator_pair: (annotator_a.to_string(), annotator_b.to_string()),
        item_count: n,
        observed_agreement: agree as f64 / nf,
        expected_agreement: chance as f64 / (nf * nf),
        kappa,
        per_frame_kappa,
    })
}

/// Each record's latest decision by `annotator`, as agreement data.
pub fn annotator_decisions(records: &[AnnotationRecord], annotator: &str) -> Vec<CodingDecision> {
    records
        .iter()
        .filter_map(|r| {
            let entry = r
                .history
                .iter()
                .rev()
                .find(|e| e.annotator_id.as_deref() == Some(annotator))?;
            let label = match entry.status {
                AssignmentStatus::Rejected => REJECT_LABEL.to_string(),
                _ => entry.frame.clone(),
            };
            Some(CodingDecision {
                item_id: r.assignment_id.clone(),
                label,
            })
        })
        .collect()
}

/// Agreement over the items both annotators decided.
pub fn store_agreement(
    records: &[AnnotationRecord],
    annotator_a: &str,
    annotator_b: &str,
) -> Result<AgreementReport, AnalyticsError> {
    let mut a = annotator_decisions(records, annotator_a);
    let mut b = annotator_decisions(records, annotator_b);
    let ids_a: HashSet<String> = a.iter().map(|d| d.item_id.clone()).collect();
    let ids_b: HashSet<String> = b.iter().map(|d| d.item_id.clone()).collect();
    a.retain(|d| ids_b.contains(&d.item_id));
    b.retain(|d| ids_a.contains(&d.item_id));
    cohens_kappa(annotator_a, &a, annotator_b, &b)
}

fn fmt_float(x: f64) -> String {
    format!("{x:.4}")
}

/// Aligned plain-text table of a distribution followed by the absent frames.
pub fn distribution_text(d: &FrameDistribution) -> String {
    let width = d.per_frame.keys().map(String::len).max().unwrap_or(5).max(5);
    let mut out = String::new();
    let _ = writeln!(out, "corpus {}  tokens {}  assignments {}", d.corpus_id, d.token_count, d.assignment_count);
    let _ = writeln!(out, "{:<width$}  {:>8}  {:>10}", "frame", "count", "density");
    for (slug, fc) in &d.per_frame {
        if fc.count > 0 {
            let _ = writeln!(out, "{slug:<width$}  {:>8}  {:>10}", fc.count, fmt_float(fc.density));
        }
    }
    let _ = writeln!(out, "absent ({}): {}", d.absent.len(), d.absent.join(", "));
    out
}

/// `frame,count,density` rows for every frame, in registry order.
pub fn distribution_csv(d: &FrameDistribution) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["frame", "count", "density"]);
    for (slug, fc) in &d.per_frame {
        let _ = w.write_record([slug.as_str(), &fc.count.to_string(), &fc.density.to_string()]);
    }
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

pub fn comparison_text(r: &ComparisonReport) -> String {
    let width = r.ranked.iter().map(String::len).max().unwrap_or(5).max(5);
    let mut out = String::new();
    let _ = writeln!(out, "{} vs {}", r.corpus_a, r.corpus_b);
    let _ = writeln!(out, "{:<width$}  {:>8}  {:>8}  {:>9}", "frame", "count_a", "count_b", "log_odds");
    for slug in &r.ranked {
        let c = &r.per_frame[slug];
        let _ = writeln!(
            out,
            "{slug:<width$}  {:>8}  {:>8}  {:>9}",
            c.count_a,
            c.count_b,
            fmt_float(c.log_odds_ratio)
        );
    }
    out
}

pub fn comparison_csv(r: &ComparisonReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["frame", "count_a", "count_b", "log_odds_ratio"]);
    for slug in &r.ranked {
        let c = &r.per_frame[slug];
        let _ = w.write_record([
            slug.as_str(),
            &c.count_a.to_string(),
            &c.count_b.to_string(),
            &c.log_odds_ratio.to_string(),
        ]);
    }
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

pub fn agreement_text(r: &AgreementReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "annotators {} / {}  items {}", r.annotator_pair.0, r.annotator_pair.1, r.item_count);
    let _ = writeln!(out, "observed  {}", fmt_float(r.observed_agreement));
    let _ = writeln!(out, "expected  {}", fmt_float(r.expected_agreement));
    let _ = writeln!(out, "kappa     {}", fmt_float(r.kappa));
    let width = r.per_frame_kappa.keys().map(String::len).max().unwrap_or(5).max(5);
    for (label, k) in &r.per_frame_kappa {
        let shown = k.map_or_else(|| "undefined".to_string(), fmt_float);
        let _ = writeln!(out, "{label:<width$}  {shown:>9}");
    }
    out
}

pub fn agreement_csv(r: &AgreementReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["frame", "kappa"]);
    let _ = w.write_record(["*", &r.kappa.to_string()]);
    for (label, k) in &r.per_frame_kappa {
        let _ = w.write_record([label.as_str(), &k.map_or_else(String::new, |x| x.to_string())]);
    }
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

//! Coding of "X is Y" conceptual-metaphor statements to narrative frames.
//!
//! A statement is split at its copula into a topic (X) and a vehicle (Y).
//! Only the vehicle is coded: its lemmas are matched against the frame
//! lexicons and each frame scores the summed weight of its matched lexemes.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::find_matches;
use crate::taxonomy::Taxonomy;
use crate::text::{nfc, segment, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatementError {
    #[error("no standalone 'is' or 'are' in statement")]
    NoCopula,
    #[error("copula at the edge of the statement leaves an empty side")]
    EmptySide,
    #[error("no lexeme of any frame matches vehicle {vehicle:?}")]
    NoFrameEvidence { vehicle: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaphorStatement {
    /// NFC form of the input.
    pub raw: String,
    pub topic_domain: String,
    pub vehicle_domain: String,
    /// Character index of the copula in `raw`.
    pub copula_offset: usize,
    pub ambiguous_split: bool,
}

impl MetaphorStatement {
    /// The copula as written ("is", "ARE", ...).
    pub fn copula(&self) -> &str {
        let start = byte_index(&self.raw, self.copula_offset);
        let rest = &self.raw[start..];
        let len = rest.find(|c: char| !c.is_alphabetic()).unwrap_or(rest.len());
        &rest[..len]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationale {
    LexiconMatch,
    HeadNounSalience,
    Manual,
}

impl Rationale {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rationale::LexiconMatch => "lexicon_match",
            Rationale::HeadNounSalience => "head_noun_salience",
            Rationale::Manual => "manual",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementCoding {
    pub statement: MetaphorStatement,
    pub frame: String,
    pub alternates: Vec<String>,
    pub rationale: Rationale,
}

/// One line of batch output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementRecord {
    pub raw: String,
    pub topic: String,
    pub vehicle: String,
    pub frame: String,
    pub alternates: Vec<String>,
    pub rationale: Rationale,
}

impl From<StatementCoding> for StatementRecord {
    fn from(c: StatementCoding) -> Self {
        StatementRecord {
            raw: c.statement.raw,
            topic: c.statement.topic_domain,
            vehicle: c.statement.vehicle_domain,
            frame: c.frame,
            alternates: c.alternates,
            rationale: c.rationale,
        }
    }
}

fn byte_index(text: &str, char_index: usize) -> usize {
    text.char_indices().nth(char_index).map_or(text.len(), |(b, _)| b)
}

fn is_copula(token: &Token) -> bool {
    token.surface.eq_ignore_ascii_case("is") || token.surface.eq_ignore_ascii_case("are")
}

/// Splits a statement at its first standalone "is" or "are".
pub fn parse_statement(raw: &str) -> Result<MetaphorStatement, StatementError> {
    let raw = nfc(raw).into_owned();
    let tokens = segment(&raw);
    let mut copulas = tokens.iter().filter(|t| is_copula(t));
    let first = copulas.next().ok_or(StatementError::NoCopula)?;
    let ambiguous_split = copulas.next().is_some();
    let start = byte_index(&raw, first.char_start);
    let end = byte_index(&raw, first.char_end);
    let topic = raw[..start].trim();
    let vehicle = raw[end..].trim();
    if topic.is_empty() || vehicle.is_empty() {
        return Err(StatementError::EmptySide);
    }
    Ok(MetaphorStatement {
        topic_domain: topic.to_string(),
        vehicle_domain: vehicle.to_string(),
        copula_offset: first.char_start,
        ambiguous_split,
        raw,
    })
}

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "my", "our", "your", "their", "his", "her",
    "its", "some", "any", "every", "each", "no",
];

const PREPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "to", "for", "with", "from", "by", "about", "into", "onto", "through",
    "over", "under", "against", "between", "among", "toward", "towards", "across", "without",
    "within", "upon", "like", "as",
];

/// Index of the head noun: leading determiners are dropped, the phrase is cut
/// at its first preposition and the last remaining token is taken.
fn head_noun(tokens: &[Token]) -> Option<usize> {
    let is = |list: &[&str], t: &Token| list.contains(&t.lemma.as_str());
    let start = tokens.iter().position(|t| !is(DETERMINERS, t))?;
    let end = tokens[start..]
        .iter()
        .position(|t| is(PREPOSITIONS, t))
        .map_or(tokens.len(), |p| start + p);
    (start..end).rev().find(|&i| !is(DETERMINERS, &tokens[i]))
}

#[derive(Debug, Clone)]
struct FrameScore {
    score: Ratio<i64>,
    best_salience: u32,
    covers_head: bool,
}

/// Codes the vehicle of a statement to the best-scoring frame.
///
/// Ties on score go to the frame owning the head noun, then to the frame with
/// the most salient matched lexeme, then to registry order. A top-level
/// winner gives way to its best-scoring child when one matched.
pub fn code_statement(
    statement: &MetaphorStatement,
    taxonomy: &Taxonomy,
) -> Result<StatementCoding, StatementError> {
    let tokens = segment(&statement.vehicle_domain);
    let head = head_noun(&tokens);
    let mut scores: BTreeMap<usize, FrameScore> = BTreeMap::new();
    for m in find_matches(&tokens, taxonomy) {
        let covers_head = head.is_some_and(|h| (m.start..m.end).contains(&h));
        for r in m.owners(taxonomy) {
            let lexeme = taxonomy.lexeme(*r);
            let entry = scores.entry(r.frame).or_insert(FrameScore {
                score: Ratio::from_integer(0),
                best_salience: u32::MAX,
                covers_head: false,
            });
            entry.score += lexeme.weight.ratio();
            entry.best_salience = entry.best_salience.min(lexeme.salience_rank);
            entry.covers_head |= covers_head;
        }
    }
    scores.retain(|_, s| s.score > Ratio::from_integer(0));
    if scores.is_empty() {
        return Err(StatementError::NoFrameEvidence {
            vehicle: statement.vehicle_domain.clone(),
        });
    }

    let rank = |a: &(&usize, &FrameScore), b: &(&usize, &FrameScore)| {
        b.1.score
            .cmp(&a.1.score)
            .then(b.1.covers_head.cmp(&a.1.covers_head))
            .then(a.1.best_salience.cmp(&b.1.best_salience))
            .then(a.0.cmp(b.0))
    };
    let mut ordered: Vec<(&usize, &FrameScore)> = scores.iter().collect();
    ordered.sort_by(rank);
    let (&top, top_score) = ordered[0];
    let tied: Vec<_> = ordered.iter().filter(|(_, s)| s.score == top_score.score).collect();
    let head_decided = tied.len() > 1 && top_score.covers_head && tied.iter().filter(|(_, s)| s.covers_head).count() == 1;

    let frames = taxonomy.frames();
    let mut chosen = top;
    let mut overridden = false;
    if frames[top].parent.is_none() {
        if let Some((&child, _)) = ordered
            .iter()
            .find(|(i, _)| frames[**i].parent.as_deref() == Some(frames[top].id.as_str()))
        {
            chosen = child;
            overridden = true;
        }
    }

    let mut alternates: Vec<(&usize, &FrameScore)> = ordered.into_iter().filter(|(i, _)| **i != chosen).collect();
    alternates.sort_by(|a, b| b.1.score.cmp(&a.1.score).then(a.0.cmp(b.0)));
    Ok(StatementCoding {
        statement: statement.clone(),
        frame: frames[chosen].id.clone(),
        alternates: alternates.into_iter().map(|(i, _)| frames[*i].id.clone()).collect(),
        rationale: if head_decided && !overridden {
            Rationale::HeadNounSalience
        } else {
            Rationale::LexiconMatch
        },
    })
}

/// Parses and codes one statement.
pub fn code_line(raw: &str, taxonomy: &Taxonomy) -> Result<StatementRecord, StatementError> {
    let statement = parse_statement(raw)?;
    code_statement(&statement, taxonomy).map(StatementRecord::from)
}

/// Codes statements in parallel, keeping input order. Blank lines are skipped;
/// each result carries its 1-based line number.
pub fn code_batch(input: &str, taxonomy: &Taxonomy) -> Vec<(usize, Result<StatementRecord, StatementError>)> {
    let lines: Vec<(usize, &str)> = input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();
    lines
        .par_iter()
        .map(|(n, line)| (*n, code_line(line, taxonomy)))
        .collect()
}

//! The narrative frame registry.
//!
//! A [`Taxonomy`] holds the 49 frames (22 top-level, 27 nested), each with an
//! entailment lexicon, plus a crosswalk from labels used in earlier studies to
//! canonical frame slugs. It is loaded from a JSON registry and validated on
//! load; once built it is immutable and can be shared freely between threads.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::text::lemma_key;

/// Number of frames in a complete registry.
pub const FRAME_COUNT: usize = 49;
/// Number of top-level frames in a complete registry.
pub const TOP_LEVEL_COUNT: usize = 22;
/// Number of nested frames in a complete registry.
pub const NESTED_COUNT: usize = 27;

/// The registry shipped with the crate.
pub const BUNDLED_REGISTRY: &str = include_str!("../data/registry.json");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("malformed registry: {0}")]
    MalformedRegistry(String),
    #[error("{}", invariant_message(.frame, .message))]
    InvariantViolation {
        frame: Option<String>,
        message: String,
    },
    #[error("unmapped label {0:?}: extend the crosswalk")]
    UnmappedLabel(String),
}

fn invariant_message(frame: &Option<String>, message: &str) -> String {
    match frame {
        Some(id) => format!("invariant violation in frame {id}: {message}"),
        None => format!("invariant violation: {message}"),
    }
}

fn violation(frame: impl Into<Option<String>>, message: impl Into<String>) -> TaxonomyError {
    TaxonomyError::InvariantViolation {
        frame: frame.into(),
        message: message.into(),
    }
}

/// A positive rational lexeme weight.
///
/// Serialized as a JSON number when it has a finite decimal expansion and as
/// a `"p/q"` string otherwise, so registry round-trips are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(pub Ratio<i64>);

impl Weight {
    pub fn new(numer: i64, denom: i64) -> Self {
        Weight(Ratio::new(numer, denom))
    }

    pub fn integer(value: i64) -> Self {
        Weight(Ratio::from_integer(value))
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_positive(&self) -> bool {
        self.0 > Ratio::zero()
    }

    fn decimal_places(&self) -> Option<u32> {
        let mut d = *self.0.denom();
        let mut twos = 0u32;
        let mut fives = 0u32;
        while d % 2 == 0 {
            d /= 2;
            twos += 1;
        }
        while d % 5 == 0 {
            d /= 5;
            fives += 1;
        }
        (d == 1).then_some(twos.max(fives))
    }

    /// Parses `"3"`, `"0.25"` or `"1/3"`.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            return (d != 0).then(|| Weight::new(n, d));
        }
        let (negative, digits) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let denom = 10i64.checked_pow(frac_part.len() as u32)?;
        let digits = format!("{int_part}{frac_part}");
        let numer: i64 = digits.parse().ok()?;
        let numer = if negative { -numer } else { numer };
        Some(Weight::new(numer, denom))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            serializer.serialize_i64(*self.0.numer())
        } else if self.decimal_places().is_some_and(|p| p <= 15) {
            serializer.serialize_f64(self.to_f64())
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct WeightVisitor;

        impl Visitor<'_> for WeightVisitor {
            type Value = Weight;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Weight, E> {
                Ok(Weight::integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Weight, E> {
                i64::try_from(v)
                    .map(Weight::integer)
                    .map_err(|_| E::custom("weight out of range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Weight, E> {
                if !v.is_finite() {
                    return Err(E::custom("weight must be finite"));
                }
                // Display gives the shortest decimal that round-trips.
                Weight::parse(&v.to_string()).ok_or_else(|| E::custom("weight out of range"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Weight, E> {
                Weight::parse(v).ok_or_else(|| E::custom(format!("invalid weight {v:?}")))
            }
        }

        deserializer.deserialize_any(WeightVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    TopLevel,
    Nested,
}

/// Where a lexeme came from: the source text itself, or curated seed entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Paper,
    Curated,
}

/// A word or phrase that carries a frame's entailments into text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexeme {
    pub text: String,
    pub weight: Weight,
    pub salience_rank: u32,
    pub provenance: Provenance,
}

/// Notes on how a frame defines problems, assigns causes, evaluates and
/// recommends remedies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramingFunctions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem_definition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub causal_interpretation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moral_evaluation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub treatment_recommendation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub id: String,
    pub parent: Option<String>,
    pub description: String,
    pub lexemes: Vec<Lexeme>,
    #[serde(default)]
    pub framing_functions: FramingFunctions,
    #[serde(default)]
    pub blend_affinities: Vec<String>,
}

impl Frame {
    pub fn tier(&self) -> Tier {
        if self.parent.is_some() {
            Tier::Nested
        } else {
            Tier::TopLevel
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosswalkEntry {
    pub label: String,
    pub frame: String,
    #[serde(default)]
    pub provisional: bool,
    #[serde(default)]
    pub source_note: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct RegistryDocument {
    version: String,
    frames: Vec<Frame>,
    #[serde(default)]
    crosswalk: Vec<CrosswalkEntry>,
}

/// Identifies one lexeme of one frame by registry position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexemeRef {
    pub frame: usize,
    pub lexeme: usize,
}

/// How a label was resolved by [`Taxonomy::normalize_label`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMapping {
    pub label: String,
    pub frame: String,
    pub provisional: bool,
    pub source_note: String,
}

/// A validated, immutable frame registry.
#[derive(Debug, Clone)]
pub struct Taxonomy {
    version: String,
    frames: Vec<Frame>,
    crosswalk: Vec<CrosswalkEntry>,
    by_id: HashMap<String, usize>,
    by_label: HashMap<String, usize>,
    owners: HashMap<Vec<String>, Vec<LexemeRef>>,
    lemma_keys: Vec<Vec<Vec<String>>>,
    by_first: HashMap<String, Vec<Vec<String>>>,
    longest_lexeme: usize,
}

impl PartialEq for Taxonomy {
    fn eq(&self, other: &Self) -> bool {
        self.version == other.version && self.frames == other.frames && self.crosswalk == other.crosswalk
    }
}

impl Eq for Taxonomy {}

impl Taxonomy {
    /// Parses and validates a JSON registry document.
    pub fn load(registry_source: &str) -> Result<Self, TaxonomyError> {
        let doc: RegistryDocument = serde_json::from_str(registry_source)
            .map_err(|e| TaxonomyError::MalformedRegistry(e.to_string()))?;
        Self::from_parts(doc.version, doc.frames, doc.crosswalk)
    }

    /// The registry bundled with this crate.
    pub fn bundled() -> &'static Taxonomy {
        static BUNDLED: OnceLock<Taxonomy> = OnceLock::new();
        BUNDLED.get_or_init(|| Taxonomy::load(BUNDLED_REGISTRY).expect("bundled registry is valid"))
    }

    pub fn from_parts(
        version: String,
        frames: Vec<Frame>,
        crosswalk: Vec<CrosswalkEntry>,
    ) -> Result<Self, TaxonomyError> {
        for frame in &frames {
            validate_frame(frame)?;
        }

        let mut by_id = HashMap::with_capacity(frames.len());
        for (i, frame) in frames.iter().enumerate() {
            if by_id.insert(frame.id.clone(), i).is_some() {
                return Err(violation(frame.id.clone(), format!("duplicate id {}", frame.id)));
            }
        }

        for frame in &frames {
            validate_hierarchy(frame, &frames, &by_id)?;
        }

        let nested = frames.iter().filter(|f| f.parent.is_some()).count();
        let top = frames.len() - nested;
        if frames.len() != FRAME_COUNT {
            return Err(violation(None, format!("frame count {} \u{2260} {FRAME_COUNT}", frames.len())));
        }
        if top != TOP_LEVEL_COUNT || nested != NESTED_COUNT {
            return Err(violation(
                None,
                format!("tier counts {top} top-level / {nested} nested \u{2260} {TOP_LEVEL_COUNT} / {NESTED_COUNT}"),
            ));
        }

        for frame in &frames {
            for affinity in &frame.blend_affinities {
                if affinity == &frame.id {
                    return Err(violation(frame.id.clone(), "frame lists itself as a blend affinity"));
                }
                if !by_id.contains_key(affinity) {
                    return Err(violation(frame.id.clone(), format!("unknown blend affinity {affinity}")));
                }
            }
        }

        let mut by_label = HashMap::with_capacity(crosswalk.len());
        for (i, entry) in crosswalk.iter().enumerate() {
            let key = fold_label(&entry.label);
            if key.is_empty() {
                return Err(violation(None, "empty crosswalk label"));
            }
            if !by_id.contains_key(&entry.frame) {
                return Err(violation(
                    entry.frame.clone(),
                    format!("crosswalk label {:?} targets unknown frame {}", entry.label, entry.frame),
                ));
            }
            if let Some((id, _)) = by_id.iter().find(|(id, _)| fold_label(id) == key) {
                if id != &entry.frame {
                    return Err(violation(
                        id.clone(),
                        format!("crosswalk label {:?} shadows frame id {id} but maps to {}", entry.label, entry.frame),
                    ));
                }
            }
            if by_label.insert(key, i).is_some() {
                return Err(violation(None, format!("duplicate crosswalk label {:?}", entry.label)));
            }
        }

        let mut owners: HashMap<Vec<String>, Vec<LexemeRef>> = HashMap::new();
        let mut lemma_keys = Vec::with_capacity(frames.len());
        let mut longest_lexeme = 0;
        for (fi, frame) in frames.iter().enumerate() {
            let mut keys = Vec::with_capacity(frame.lexemes.len());
            for (li, lexeme) in frame.lexemes.iter().enumerate() {
                let key = lemma_key(&lexeme.text);
                if key.is_empty() {
                    return Err(violation(frame.id.clone(), format!("lexeme {:?} has no words", lexeme.text)));
                }
                longest_lexeme = longest_lexeme.max(key.len());
                owners.entry(key.clone()).or_default().push(LexemeRef { frame: fi, lexeme: li });
                keys.push(key);
            }
            lemma_keys.push(keys);
        }

        let mut by_first: HashMap<String, Vec<Vec<String>>> = HashMap::new();
        for keys in &lemma_keys {
            for key in keys {
                let bucket = by_first.entry(key[0].clone()).or_default();
                if !bucket.contains(key) {
                    bucket.push(key.clone());
                }
            }
        }
        for bucket in by_first.values_mut() {
            // Longest first; ties keep registry order.
            bucket.sort_by_key(|k| std::cmp::Reverse(k.len()));
        }

        Ok(Taxonomy {
            version,
            frames,
            crosswalk,
            by_id,
            by_label,
            owners,
            lemma_keys,
            by_first,
            longest_lexeme,
        })
    }

    /// Pretty-printed registry JSON; [`Taxonomy::load`] inverts it.
    pub fn to_registry_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            version: &'a str,
            frames: &'a [Frame],
            crosswalk: &'a [CrosswalkEntry],
        }
        serde_json::to_string_pretty(&Out {
            version: &self.version,
            frames: &self.frames,
            crosswalk: &self.crosswalk,
        })
        .expect("registry serializes")
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Frames in registry order.
    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn crosswalk(&self) -> &[CrosswalkEntry] {
        &self.crosswalk
    }

    pub fn slugs(&self) -> impl Iterator<Item = &str> {
        self.frames.iter().map(|f| f.id.as_str())
    }

    pub fn frame(&self, id: &str) -> Option<&Frame> {
        self.by_id.get(id).map(|&i| &self.frames[i])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn parent_of(&self, id: &str) -> Option<&str> {
        self.frame(id).and_then(|f| f.parent.as_deref())
    }

    pub fn children_of<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Frame> + 'a {
        self.frames.iter().filter(move |f| f.parent.as_deref() == Some(id))
    }

    pub fn top_level_count(&self) -> usize {
        self.frames.iter().filter(|f| f.tier() == Tier::TopLevel).count()
    }

    pub fn nested_count(&self) -> usize {
        self.frames.iter().filter(|f| f.tier() == Tier::Nested).count()
    }

    pub fn lexeme(&self, r: LexemeRef) -> &Lexeme {
        &self.frames[r.frame].lexemes[r.lexeme]
    }

    pub fn lexeme_key(&self, r: LexemeRef) -> &[String] {
        &self.lemma_keys[r.frame][r.lexeme]
    }

    /// Every (frame, lexeme) whose lemma sequence equals `key`, in registry order.
    pub fn owners(&self, key: &[String]) -> &[LexemeRef] {
        self.owners.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Lemma sequences of lexemes beginning with `lemma`, longest first.
    pub fn phrases_starting_with(&self, lemma: &str) -> &[Vec<String>] {
        self.by_first.get(lemma).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Length in tokens of the longest lexeme.
    pub fn longest_lexeme(&self) -> usize {
        self.longest_lexeme
    }

    /// Maps a study-specific label onto a canonical slug.
    ///
    /// Crosswalk labels are tried first, case-insensitively, then frame ids.
    /// Labels that match neither are reported rather than bucketed.
    pub fn normalize_label(&self, label: &str) -> Result<LabelMapping, TaxonomyError> {
        let key = fold_label(label);
        if let Some(&i) = self.by_label.get(&key) {
            let entry = &self.crosswalk[i];
            return Ok(LabelMapping {
                label: label.to_string(),
                frame: entry.frame.clone(),
                provisional: entry.provisional,
                source_note: entry.source_note.clone(),
            });
        }
        if let Some(frame) = self.frames.iter().find(|f| fold_label(&f.id) == key) {
            return Ok(LabelMapping {
                label: label.to_string(),
                frame: frame.id.clone(),
                provisional: false,
                source_note: "canonical frame id".to_string(),
            });
        }
        Err(TaxonomyError::UnmappedLabel(label.to_string()))
    }

    /// True when `ancestor` is `id` itself or its parent.
    pub fn is_self_or_parent(&self, ancestor: &str, id: &str) -> bool {
        ancestor == id || self.parent_of(id) == Some(ancestor)
    }
}

fn fold_label(label: &str) -> String {
    label.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

fn validate_frame(frame: &Frame) -> Result<(), TaxonomyError> {
    let id = &frame.id;
    if id.trim().is_empty() || id.trim() != id {
        return Err(violation(id.clone(), "frame id must be nonempty and trimmed"));
    }
    if frame.lexemes.len() < 3 {
        return Err(violation(
            id.clone(),
            format!("lexicon has {} entries, at least 3 required", frame.lexemes.len()),
        ));
    }
    let mut texts = HashSet::new();
    let mut ranks = HashSet::new();
    for lexeme in &frame.lexemes {
        let text = &lexeme.text;
        if text.is_empty() || text.trim() != text || text.to_lowercase() != *text {
            return Err(violation(id.clone(), format!("lexeme {text:?} must be lowercase and trimmed")));
        }
        if !texts.insert(text.as_str()) {
            return Err(violation(id.clone(), format!("duplicate lexeme {text:?}")));
        }
        if !lexeme.weight.is_positive() {
            return Err(violation(id.clone(), format!("lexeme {text:?} has non-positive weight {}", lexeme.weight)));
        }
        if lexeme.salience_rank == 0 {
            return Err(violation(id.clone(), format!("lexeme {text:?} has salience rank 0")));
        }
        if !ranks.insert(lexeme.salience_rank) {
            return Err(violation(id.clone(), format!("duplicate salience rank {}", lexeme.salience_rank)));
        }
    }
    Ok(())
}

fn validate_hierarchy(
    frame: &Frame,
    frames: &[Frame],
    by_id: &HashMap<String, usize>,
) -> Result<(), TaxonomyError> {
    let id = &frame.id;
    let segments: Vec<&str> = id.split('/').collect();
    match (&frame.parent, segments.as_slice()) {
        (None, [_]) => Ok(()),
        (None, _) => Err(violation(id.clone(), format!("nested id {id} has no parent"))),
        (Some(parent), _) => {
            let Some(&pi) = by_id.get(parent) else {
                return Err(violation(id.clone(), format!("orphan parent {parent}")));
            };
            if frames[pi].parent.is_some() {
                return Err(violation(id.clone(), format!("parent {parent} is itself nested (depth > 2)")));
            }
            match segments.as_slice() {
                [head, child] if head == parent && !child.is_empty() => Ok(()),
                _ => Err(violation(id.clone(), format!("nested id must be {parent}/CHILD"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry_value() -> serde_json::Value {
        serde_json::from_str(BUNDLED_REGISTRY).unwrap()
    }

    fn load_value(v: &serde_json::Value) -> Result<Taxonomy, TaxonomyError> {
        Taxonomy::load(&serde_json::to_string(v).unwrap())
    }

    #[test]
    fn bundled_counts() {
        let t = Taxonomy::bundled();
        assert_eq!(t.frames().len(), 49);
        assert_eq!(t.top_level_count(), 22);
        assert_eq!(t.nested_count(), 27);
    }

    #[test]
    fn dropping_war_breaks_count() {
        let mut v = registry_value();
        v["frames"].as_array_mut().unwrap().retain(|f| f["id"] != "WAR");
        let err = load_value(&v).unwrap_err();
        assert!(err.to_string().contains("frame count 48 \u{2260} 49"), "{err}");
    }

    #[test]
    fn orphan_parent_is_named() {
        let mut v = registry_value();
        for f in v["frames"].as_array_mut().unwrap() {
            if f["id"] == "JOURNEY/RACE" {
                f["parent"] = "TRIP".into();
            }
        }
        let err = load_value(&v).unwrap_err();
        assert!(err.to_string().contains("orphan parent TRIP"), "{err}");
        assert!(err.to_string().contains("JOURNEY/RACE"), "{err}");
    }

    #[test]
    fn duplicate_and_empty_lexicon_rejected() {
        let mut v = registry_value();
        let dup = v["frames"][0].clone();
        v["frames"].as_array_mut().unwrap().push(dup);
        assert!(matches!(load_value(&v), Err(TaxonomyError::InvariantViolation { .. })));

        let mut v = registry_value();
        v["frames"][3]["lexemes"] = serde_json::json!([]);
        let err = load_value(&v).unwrap_err();
        assert!(err.to_string().contains("WAR"), "{err}");
    }

    #[test]
    fn lexeme_rules() {
        let mut v = registry_value();
        v["frames"][0]["lexemes"][0]["text"] = "Deadline".into();
        assert!(load_value(&v).is_err());

        let mut v = registry_value();
        v["frames"][0]["lexemes"][0]["weight"] = 0.into();
        assert!(load_value(&v).is_err());

        let mut v = registry_value();
        v["frames"][0]["lexemes"][1]["salience_rank"] = 1.into();
        assert!(load_value(&v).is_err());
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(Taxonomy::load("{\"version\": "), Err(TaxonomyError::MalformedRegistry(_))));
    }

    #[test]
    fn round_trip() {
        let t = Taxonomy::bundled();
        let again = Taxonomy::load(&t.to_registry_json()).unwrap();
        assert_eq!(&again, t);
    }

    #[test]
    fn weights_parse_exactly() {
        assert_eq!(Weight::parse("0.1"), Some(Weight::new(1, 10)));
        assert_eq!(Weight::parse("3"), Some(Weight::integer(3)));
        assert_eq!(Weight::parse("2/6"), Some(Weight::new(1, 3)));
        assert_eq!(Weight::parse("abc"), None);
        let w: Weight = serde_json::from_str("0.5").unwrap();
        assert_eq!(w, Weight::new(1, 2));
        assert_eq!(serde_json::to_string(&Weight::new(1, 3)).unwrap(), "\"1/3\"");
        assert_eq!(serde_json::to_string(&Weight::new(1, 4)).unwrap(), "0.25");
    }

    #[test]
    fn hierarchy_queries() {
        let t = Taxonomy::bundled();
        assert_eq!(t.parent_of("JOURNEY/RACE"), Some("JOURNEY"));
        assert_eq!(t.parent_of("WAR"), None);
        let kids: Vec<&str> = t.children_of("JOURNEY").map(|f| f.id.as_str()).collect();
        assert_eq!(kids, vec!["JOURNEY/RACE", "JOURNEY/QUEST", "JOURNEY/SPATIAL"]);
    }

    #[test]
    fn crosswalk_examples() {
        let t = Taxonomy::bundled();
        assert_eq!(t.normalize_label("CONFLICT").unwrap().frame, "WAR");
        assert_eq!(t.normalize_label("WAR").unwrap().frame, "WAR");
        assert_eq!(t.normalize_label("conflict").unwrap().frame, "WAR");
        let disease = t.normalize_label("DISEASE/ILLNESS").unwrap();
        assert_eq!(disease.frame, "HEALTHCARE/DISEASE");
        assert!(disease.provisional);
        assert_eq!(t.normalize_label("TIME").unwrap().frame, "TIME");
        assert!(matches!(t.normalize_label("DEAD ISSUE"), Err(TaxonomyError::UnmappedLabel(_))));
    }
}

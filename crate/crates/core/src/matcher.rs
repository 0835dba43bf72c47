//! Leftmost-longest lexicon matching over lemma sequences.

use crate::taxonomy::{LexemeRef, Taxonomy};
use crate::text::Token;

/// A run of tokens whose lemmas spell out a registry lexeme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexemeMatch<'t> {
    /// Index of the first matched token.
    pub start: usize,
    /// One past the last matched token.
    pub end: usize,
    pub key: &'t [String],
}

impl<'t> LexemeMatch<'t> {
    pub fn owners(&self, taxonomy: &'t Taxonomy) -> &'t [LexemeRef] {
        taxonomy.owners(self.key)
    }
}

/// Scans left to right; at each position the longest lexeme wins and the scan
/// resumes after it, so matches never overlap. Phrases do not cross sentence
/// boundaries.
pub fn find_matches<'t>(tokens: &[Token], taxonomy: &'t Taxonomy) -> Vec<LexemeMatch<'t>> {
    let mut matches = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let sentence = tokens[i].sentence_index;
        let found = taxonomy
            .phrases_starting_with(&tokens[i].lemma)
            .iter()
            .find(|key| {
                let end = i + key.len();
                end <= tokens.len()
                    && tokens[i..end]
                        .iter()
                        .zip(key.iter())
                        .all(|(t, k)| t.sentence_index == sentence && &t.lemma == k)
            });
        match found {
            Some(key) => {
                matches.push(LexemeMatch {
                    start: i,
                    end: i + key.len(),
                    key,
                });
                i += key.len();
            }
            None => i += 1,
        }
    }
    matches
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::segment;

    fn matched(text: &str) -> Vec<String> {
        let tokens = segment(text);
        find_matches(&tokens, Taxonomy::bundled())
            .iter()
            .map(|m| {
                tokens[m.start..m.end]
                    .iter()
                    .map(|t| t.surface.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    #[test]
    fn longest_match_wins() {
        assert_eq!(matched("On the front lines of AI Ethics"), vec!["the front lines"]);
        assert_eq!(matched("hold the front lines"), vec!["the front lines"]);
        assert_eq!(matched("front lines"), vec!["front lines"]);
        assert_eq!(matched("in the race against time"), vec!["race against"]);
    }

    #[test]
    fn phrases_stay_inside_sentences() {
        // "race. Against" must not match the phrase "race against".
        assert_eq!(matched("It is a race. Against all odds."), vec!["race"]);
    }

    #[test]
    fn inflected_phrase_matches_on_lemmas() {
        assert_eq!(matched("Racing to the top in green technology"), vec!["Racing to the top"]);
        assert_eq!(matched("they were leading the pack"), vec!["leading the pack"]);
    }

    #[test]
    fn no_matches_in_plain_text() {
        assert!(matched("The committee met on Tuesday").is_empty());
    }
}

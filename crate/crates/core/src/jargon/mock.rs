use std::collections::HashSet;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

use super::repair::locate;
use super::{ExpandedAudienceContext, JargonError, JargonProvider, JargonTerm};
use crate::deck::AudienceProfile;

/// Lexicon shipped with the crate, used when no live provider is configured.
pub const BUNDLED_LEXICON: &str = include_str!("../../fixtures/lexicon.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub term: String,
    /// 1 (everyone knows it) to 5 (specialists only).
    pub difficulty: u8,
    pub definition: String,
    pub alternatives: Vec<String>,
}

/// Deterministic offline provider driven by a fixed lexicon.
///
/// The expanded context treats every lexicon term at or below the audience
/// level as known; detection flags lexicon terms above the inferred level at
/// their first (case-insensitive) occurrence.
#[derive(Clone, Debug)]
pub struct MockProvider {
    lexicon: Vec<LexiconEntry>,
}

impl MockProvider {
    pub fn new(lexicon: Vec<LexiconEntry>) -> Result<Self, JargonError> {
        let mut seen = HashSet::new();
        for e in &lexicon {
            if !seen.insert(e.term.to_lowercase()) {
                return Err(JargonError::DuplicateLexiconTerm(e.term.clone()));
            }
            if e.term.trim().is_empty() {
                return Err(JargonError::InvalidLexicon("empty term".into()));
            }
            if !(1..=5).contains(&e.difficulty) {
                return Err(JargonError::InvalidLexicon(format!(
                    "`{}`: difficulty must be 1..=5",
                    e.term
                )));
            }
            if e.alternatives.len() != 2 {
                return Err(JargonError::InvalidLexicon(format!(
                    "`{}`: exactly two alternatives required",
                    e.term
                )));
            }
        }
        Ok(Self { lexicon })
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, JargonError> {
        let lexicon: Vec<LexiconEntry> =
            serde_json::from_slice(bytes).map_err(|e| JargonError::InvalidLexicon(e.to_string()))?;
        Self::new(lexicon)
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_LEXICON.as_bytes()).expect("bundled lexicon is valid")
    }

    pub fn lexicon(&self) -> &[LexiconEntry] {
        &self.lexicon
    }
}

#[async_trait]
impl JargonProvider for MockProvider {
    async fn expand(
        &self,
        audience: &AudienceProfile,
        _presentation_context: Option<&str>,
    ) -> Result<ExpandedAudienceContext, JargonError> {
        let level = audience.expertise_level;
        let (known, jargon): (Vec<&LexiconEntry>, Vec<&LexiconEntry>) =
            self.lexicon.iter().partition(|e| e.difficulty <= level);
        Ok(ExpandedAudienceContext {
            original_description: audience.description.clone(),
            original_expertise_level: level,
            expanded_description: format!(
                "{} (expertise level {level}/5)",
                audience.description.trim()
            ),
            inferred_expertise_level: level,
            known_concepts: known.into_iter().map(|e| e.term.clone()).collect(),
            likely_jargon: jargon.into_iter().map(|e| e.term.clone()).collect(),
            domain_background: "Not specified".into(),
        })
    }

    async fn detect(
        &self,
        _slide_title: Option<&str>,
        slide_text: &str,
        context: &ExpandedAudienceContext,
        _presentation_context: Option<&str>,
    ) -> Result<Vec<JargonTerm>, JargonError> {
        let mut out: Vec<JargonTerm> = self
            .lexicon
            .iter()
            .filter(|e| e.difficulty > context.inferred_expertise_level)
            .filter_map(|e| {
                let (start, end, found) = locate(slide_text, &e.term)?;
                Some(JargonTerm {
                    term: found,
                    definition: e.definition.clone(),
                    alternatives: e.alternatives.clone(),
                    start_index: start,
                    end_index: end,
                    hidden: false,
                })
            })
            .collect();
        out.sort_by_key(|t| (t.start_index, t.end_index));
        Ok(out)
    }
}

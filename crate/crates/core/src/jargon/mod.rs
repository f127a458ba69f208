//! Audience-aware jargon detection.
//!
//! Two provider calls: the first expands the author's short audience
//! description into a profile (known concepts, likely jargon, background),
//! the second flags terms in one slide against that profile. Everything a
//! provider returns is checked here: spans are repaired against the slide's
//! canonical text, terms the audience already knows are dropped, and so are
//! terms the author has hidden.

mod hide;
mod live;
mod mock;
pub mod prompts;
mod repair;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

pub use hide::{HideState, SlideHidden};
pub use live::{
    parse_model_json, ChatBackend, HttpChatBackend, LiveConfig, LlmProvider, DEFAULT_API_URL,
    DEFAULT_MODEL,
};
pub use mock::{LexiconEntry, MockProvider, BUNDLED_LEXICON};
pub use repair::{char_slice, locate, validate_and_repair_indices};

use crate::deck::{AudienceProfile, ElementKind, Slide, MAX_EXPERTISE_LEVEL, MIN_EXPERTISE_LEVEL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JargonError {
    #[error("provider error: {0}")]
    Provider(String),
    #[error("audience needs an expertise level in 1..=5 and a non-empty description")]
    InvalidAudience,
    #[error("slide has no text to analyze")]
    EmptySlide,
    #[error("lexicon term `{0}` appears more than once")]
    DuplicateLexiconTerm(String),
    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedAudienceContext {
    pub original_description: String,
    /// The level the author picked, kept next to the provider's estimate.
    pub original_expertise_level: u8,
    pub expanded_description: String,
    pub inferred_expertise_level: u8,
    pub known_concepts: Vec<String>,
    pub likely_jargon: Vec<String>,
    pub domain_background: String,
}

impl ExpandedAudienceContext {
    pub fn knows(&self, term: &str) -> bool {
        let t = term.trim().to_lowercase();
        self.known_concepts.iter().any(|k| k.trim().to_lowercase() == t)
    }
}

/// A flagged span of the slide's canonical text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JargonTerm {
    pub term: String,
    pub definition: String,
    pub alternatives: Vec<String>,
    pub start_index: usize,
    pub end_index: usize,
    #[serde(default)]
    pub hidden: bool,
}

/// Backend that does the actual expansion and detection.
///
/// `detect` returns spans relative to `slide_text` (the slide body, without
/// the title line); the pipeline maps them onto the canonical text.
#[async_trait]
pub trait JargonProvider: Send + Sync {
    async fn expand(
        &self,
        audience: &AudienceProfile,
        presentation_context: Option<&str>,
    ) -> Result<ExpandedAudienceContext, JargonError>;

    async fn detect(
        &self,
        slide_title: Option<&str>,
        slide_text: &str,
        context: &ExpandedAudienceContext,
        presentation_context: Option<&str>,
    ) -> Result<Vec<JargonTerm>, JargonError>;
}

pub async fn expand_audience_context(
    provider: &dyn JargonProvider,
    audience: &AudienceProfile,
    presentation_context: Option<&str>,
) -> Result<ExpandedAudienceContext, JargonError> {
    if !audience.is_valid() {
        return Err(JargonError::InvalidAudience);
    }
    let mut context = provider.expand(audience, presentation_context).await?;
    context.original_description = audience.description.clone();
    context.original_expertise_level = audience.expertise_level;
    context.inferred_expertise_level = context
        .inferred_expertise_level
        .clamp(MIN_EXPERTISE_LEVEL, MAX_EXPERTISE_LEVEL);
    if context.expanded_description.trim().is_empty() {
        context.expanded_description = audience.description.clone();
    }
    Ok(context)
}

/// Slide body sent to the provider: text elements joined by newlines.
pub fn slide_body(slide: &Slide) -> String {
    slide.text_contents().collect::<Vec<_>>().join("\n")
}

/// Where the body starts inside [`Slide::canonical_text`], in characters.
fn body_offset(slide: &Slide) -> usize {
    slide.title.as_deref().unwrap_or("").chars().count() + 1
}

pub async fn detect_jargon(
    provider: &dyn JargonProvider,
    slide: &Slide,
    context: &ExpandedAudienceContext,
    hidden: &HideState,
    presentation_context: Option<&str>,
) -> Result<Vec<JargonTerm>, JargonError> {
    let canonical = slide.canonical_text();
    if canonical.trim().is_empty() {
        return Err(JargonError::EmptySlide);
    }
    if hidden.all_hidden(&slide.id) {
        return Ok(Vec::new());
    }
    let body = slide_body(slide);
    let has_body = slide.elements.iter().any(|e| e.kind == ElementKind::Text);
    let offset = if has_body { body_offset(slide) } else { 0 };

    let raw = provider
        .detect(slide.title.as_deref(), &body, context, presentation_context)
        .await?;
    let shifted: Vec<JargonTerm> = raw
        .into_iter()
        .filter_map(|mut t| {
            t.term = t.term.trim().to_owned();
            if t.alternatives.len() < 2 {
                return None;
            }
            t.alternatives.truncate(2);
            t.start_index = t.start_index.saturating_add(offset);
            t.end_index = t.end_index.saturating_add(offset);
            t.hidden = false;
            Some(t)
        })
        .collect();

    let mut terms: Vec<JargonTerm> = validate_and_repair_indices(&canonical, shifted)
        .into_iter()
        .filter(|t| !context.knows(&t.term))
        .filter(|t| !hidden.is_hidden(&slide.id, &t.term))
        .collect();
    terms.sort_by(|a, b| (a.start_index, a.end_index, &a.term).cmp(&(b.start_index, b.end_index, &b.term)));
    terms.dedup_by(|a, b| a.start_index == b.start_index && a.end_index == b.end_index);
    Ok(terms)
}

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::deck::SlideId;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlideHidden {
    /// Lowercased terms.
    pub terms: BTreeSet<String>,
    pub all_hidden: bool,
}

/// Terms the author chose to hide, per slide, for one presentation session.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HideState {
    slides: BTreeMap<SlideId, SlideHidden>,
}

fn key(term: &str) -> String {
    term.trim().to_lowercase()
}

impl HideState {
    pub fn hide_term(&self, slide: &SlideId, term: &str) -> HideState {
        let mut next = self.clone();
        next.slides.entry(slide.clone()).or_default().terms.insert(key(term));
        next
    }

    pub fn hide_all(&self, slide: &SlideId) -> HideState {
        let mut next = self.clone();
        next.slides.entry(slide.clone()).or_default().all_hidden = true;
        next
    }

    pub fn reset(&self, slide: &SlideId) -> HideState {
        let mut next = self.clone();
        next.slides.remove(slide);
        next
    }

    pub fn slide(&self, slide: &SlideId) -> Option<&SlideHidden> {
        self.slides.get(slide)
    }

    pub fn all_hidden(&self, slide: &SlideId) -> bool {
        self.slides.get(slide).is_some_and(|s| s.all_hidden)
    }

    pub fn is_hidden(&self, slide: &SlideId, term: &str) -> bool {
        self.slides
            .get(slide)
            .is_some_and(|s| s.all_hidden || s.terms.contains(&key(term)))
    }
}

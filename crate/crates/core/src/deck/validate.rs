use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::model::{ElementKind, MAX_EXPERTISE_LEVEL, MIN_EXPERTISE_LEVEL};
use super::serial::Deck;

/// One broken invariant, located by a JSON pointer into the deck document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub pointer: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pointer, self.message)
    }
}

/// True for a lowercase hex SHA-256 digest.
pub fn is_asset_hash(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

/// Checks every deck invariant that can be checked without a repository.
/// An empty result means the deck is valid.
pub fn validate_deck(deck: &Deck) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |pointer: String, message: &str| {
        out.push(Violation {
            pointer,
            message: message.to_owned(),
        })
    };

    let p = &deck.presentation;
    if p.total_duration_s == 0 {
        push("/presentation/total_duration_s".into(), "must be positive");
    }
    if !(MIN_EXPERTISE_LEVEL..=MAX_EXPERTISE_LEVEL).contains(&p.audience.expertise_level) {
        push(
            "/presentation/audience/expertise_level".into(),
            "must be between 1 and 5",
        );
    }
    if p.audience.description.trim().is_empty() {
        push("/presentation/audience/description".into(), "must not be empty");
    }

    let mut section_ids = HashSet::new();
    let mut slide_ids = HashSet::new();
    for (si, section) in p.sections.iter().enumerate() {
        let base = format!("/presentation/sections/{si}");
        if !section_ids.insert(&section.id) {
            push(format!("{base}/id"), "duplicate section id");
        }
        if section.duration_s == 0 {
            push(format!("{base}/duration_s"), "must be positive");
        }
        for (pi, slide) in section.slides.iter().enumerate() {
            let base = format!("{base}/slides/{pi}");
            if !slide_ids.insert(&slide.id) {
                push(format!("{base}/id"), "duplicate slide id");
            }
            let mut element_ids = HashSet::new();
            for (ei, element) in slide.elements.iter().enumerate() {
                let base = format!("{base}/elements/{ei}");
                if !element_ids.insert(&element.id) {
                    push(format!("{base}/id"), "duplicate element id within slide");
                }
                if !element.bounds.is_valid() {
                    push(
                        format!("{base}/bounds"),
                        "must lie within the unit square with positive width and height",
                    );
                }
                if element.kind == ElementKind::Image && !is_asset_hash(&element.content) {
                    push(
                        format!("{base}/content"),
                        "image content must be a sha256 asset hash",
                    );
                }
            }
        }
    }
    out
}

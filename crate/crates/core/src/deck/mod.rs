//! Deck data model: presentation, section, slide and element, plus editing
//! operations and the versioned JSON document form.

mod edit;
mod ids;
mod model;
mod serial;
mod validate;

pub use edit::{ConstraintPatch, ElementEdit, NewSection, SectionPatch};
pub use ids::{ElementId, EntryId, LineageId, PresentationId, SectionId, SlideId};
pub use model::{
    AudienceProfile, Bounds, Element, ElementKind, Emphasis, LineageRef, Presentation, Section,
    Slide, DEFAULT_SECTION_DURATION_S, MAX_EXPERTISE_LEVEL, MIN_EXPERTISE_LEVEL,
};
pub use serial::{deserialize, serialize, Deck, SCHEMA_VERSION};
pub use validate::{is_asset_hash, validate_deck, Violation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeckError {
    #[error("duration must be a positive number of seconds")]
    InvalidDuration,
    #[error("audience needs an expertise level in 1..=5 and a non-empty description")]
    InvalidAudience,
    #[error("position {position} is out of range (length {len})")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("new order is not a permutation of the existing sections")]
    NotAPermutation,
    #[error("unknown slide `{0}`")]
    UnknownSlide(SlideId),
    #[error("unknown section `{0}`")]
    UnknownSection(SectionId),
    #[error("unknown element `{0}`")]
    UnknownElement(ElementId),
    #[error("bounds must lie within the unit square with positive width and height")]
    InvalidBounds,
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("unsupported schema version {0}")]
    UnsupportedSchemaVersion(u64),
}

use serde::{Deserialize, Serialize};

use super::model::Presentation;
use super::DeckError;

pub const SCHEMA_VERSION: u64 = 1;

/// The on-disk/on-wire deck document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deck {
    pub schema_version: u64,
    pub presentation: Presentation,
}

impl Deck {
    pub fn new(presentation: Presentation) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            presentation,
        }
    }
}

/// Pretty-printed JSON; key order follows field declaration order, so the
/// output is stable for equal decks.
pub fn serialize(deck: &Deck) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(deck).expect("deck values always serialize");
    out.push(b'\n');
    out
}

pub fn deserialize(bytes: &[u8]) -> Result<Deck, DeckError> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| DeckError::MalformedDocument(e.to_string()))?;
    match value.get("schema_version").and_then(serde_json::Value::as_u64) {
        Some(SCHEMA_VERSION) => {}
        Some(other) => return Err(DeckError::UnsupportedSchemaVersion(other)),
        None => {
            return Err(DeckError::MalformedDocument(
                "missing or non-integer `schema_version`".into(),
            ))
        }
    }
    serde_json::from_value(value).map_err(|e| DeckError::MalformedDocument(e.to_string()))
}

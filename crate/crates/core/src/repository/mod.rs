//! Central slide repository.
//!
//! Saves presentations, sections and slides as self-contained entries, keeps
//! one linear lineage of versions per slide, reports element-level changes of
//! a working slide against the version it came from, and applies one of four
//! sync decisions to fold those changes back into the lineage.

mod diff;
mod search;
mod store;

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

pub use diff::{detect_changes, ElementField, ModifiedElement, SlideDiff};
pub use search::{tokenize, HitTarget, SearchHit, BODY_WEIGHT, TITLE_WEIGHT};
pub use store::{sha256_hex, DocumentStore, FileStore, MemoryStore, StoreSnapshot};

use search::{IndexedDoc, SearchIndex};

use crate::deck::{
    DeckError, EntryId, LineageId, LineageRef, Presentation, PresentationId, Section, SectionId,
    Slide,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RepoError {
    #[error("unknown repository entry `{0}`")]
    UnknownEntry(EntryId),
    #[error("unknown lineage `{0}`")]
    UnknownLineage(LineageId),
    #[error("lineage `{lineage_id}` has no version {version_index}")]
    UnknownVersion {
        lineage_id: LineageId,
        version_index: usize,
    },
    #[error("entry holds a {found:?} but a {expected:?} was required")]
    GranularityMismatch {
        expected: Granularity,
        found: Granularity,
    },
    #[error("invalid sync decision: {0}")]
    InvalidDecision(String),
    #[error("search query is empty")]
    EmptyQuery,
    #[error("slide has no lineage reference")]
    NoLineage,
    #[error(transparent)]
    Deck(#[from] DeckError),
    #[error("storage failure: {0}")]
    Storage(String),
    #[error("corrupt store: {0}")]
    CorruptStore(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Presentation,
    Section,
    Slide,
}

impl Granularity {
    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::Presentation => "presentation",
            Granularity::Section => "section",
            Granularity::Slide => "slide",
        }
    }
}

impl std::str::FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "presentation" => Ok(Granularity::Presentation),
            "section" => Ok(Granularity::Section),
            "slide" => Ok(Granularity::Slide),
            other => Err(format!("unknown granularity `{other}`")),
        }
    }
}

/// A saved value. Sections carry their duration and emphasis, presentations
/// their time limit and audience.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "granularity", content = "value", rename_all = "lowercase")]
pub enum Payload {
    Presentation(Presentation),
    Section(Section),
    Slide(Slide),
}

impl Payload {
    pub fn granularity(&self) -> Granularity {
        match self {
            Payload::Presentation(_) => Granularity::Presentation,
            Payload::Section(_) => Granularity::Section,
            Payload::Slide(_) => Granularity::Slide,
        }
    }

    pub fn title(&self) -> String {
        match self {
            Payload::Presentation(p) => p.title.clone(),
            Payload::Section(s) => s.title.clone(),
            Payload::Slide(s) => s.title.clone().unwrap_or_default(),
        }
    }

    fn slides_mut(&mut self) -> Box<dyn Iterator<Item = &mut Slide> + '_> {
        match self {
            Payload::Presentation(p) => {
                Box::new(p.sections.iter_mut().flat_map(|s| s.slides.iter_mut()))
            }
            Payload::Section(s) => Box::new(s.slides.iter_mut()),
            Payload::Slide(s) => Box::new(std::iter::once(s)),
        }
    }

    pub fn slides(&self) -> Vec<&Slide> {
        match self {
            Payload::Presentation(p) => p.slides().collect(),
            Payload::Section(s) => s.slides.iter().collect(),
            Payload::Slide(s) => vec![s],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepositoryEntry {
    pub entry_id: EntryId,
    pub saved_at: DateTime<Utc>,
    pub source_presentation_id: Option<PresentationId>,
    pub payload: Payload,
}

impl RepositoryEntry {
    pub fn granularity(&self) -> Granularity {
        self.payload.granularity()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlideVersion {
    pub version_index: usize,
    /// The slide as saved; its own `lineage_ref` is always empty.
    pub slide: Slide,
    pub saved_at: DateTime<Utc>,
    pub replaced_at: Option<DateTime<Utc>>,
}

/// Linear history of one slide. Version 0 is the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlideLineage {
    pub lineage_id: LineageId,
    pub versions: Vec<SlideVersion>,
}

impl SlideLineage {
    fn origin(slide: &Slide, at: DateTime<Utc>) -> Self {
        let mut lineage = Self {
            lineage_id: LineageId::generate(),
            versions: Vec::new(),
        };
        lineage.append(slide, at);
        lineage
    }

    fn append(&mut self, slide: &Slide, at: DateTime<Utc>) -> usize {
        let version_index = self.versions.len();
        let mut slide = slide.clone();
        slide.lineage_ref = None;
        self.versions.push(SlideVersion {
            version_index,
            slide,
            saved_at: at,
            replaced_at: None,
        });
        version_index
    }

    pub fn len(&self) -> usize {
        self.versions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.versions.is_empty()
    }

    pub fn head(&self) -> &SlideVersion {
        self.versions.last().expect("lineages are never empty")
    }
}

/// How to fold a changed reused slide back into its lineage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum SyncDecision {
    /// Discard the changes; the lineage keeps the prior version.
    IgnoreChanges,
    /// Start a new lineage with the working slide as its origin.
    SetAsOrigin,
    /// Append the working slide as the newest version.
    KeepBoth,
    /// Overwrite the listed versions with the working slide's content.
    ReplaceContent { targets: Vec<usize> },
}

/// What to save.
#[derive(Clone, Debug)]
pub enum SaveValue {
    Presentation(Presentation),
    Section(Section),
    Slide(Slide),
}

#[derive(Clone, Copy, Debug)]
pub enum ImportTarget<'a> {
    /// A saved presentation becomes a new working presentation.
    Workspace,
    /// A saved section is inserted into an existing presentation.
    Into {
        presentation: &'a Presentation,
        position: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Imported {
    Presentation(Presentation),
    Section {
        presentation: Presentation,
        section_id: SectionId,
    },
}

#[derive(Default)]
struct State {
    entries: BTreeMap<EntryId, RepositoryEntry>,
    lineages: BTreeMap<LineageId, SlideLineage>,
    index: SearchIndex,
}

impl State {
    fn index_entry(&mut self, entry: &RepositoryEntry) {
        let target = HitTarget::Entry {
            entry_id: entry.entry_id.clone(),
        };
        match &entry.payload {
            // slides are searchable through their lineages
            Payload::Slide(_) => {}
            payload => self.index.upsert(
                target,
                IndexedDoc::new(payload.granularity(), payload.title(), Vec::new(), entry.saved_at),
            ),
        }
    }

    fn index_lineage(&mut self, lineage: &SlideLineage) {
        for v in &lineage.versions {
            let target = HitTarget::SlideVersion {
                lineage_id: lineage.lineage_id.clone(),
                version_index: v.version_index,
            };
            let body = v.slide.text_contents().map(str::to_owned).collect();
            let at = v.replaced_at.unwrap_or(v.saved_at);
            self.index.upsert(
                target,
                IndexedDoc::new(
                    Granularity::Slide,
                    v.slide.title.clone().unwrap_or_default(),
                    body,
                    at,
                ),
            );
        }
    }

    fn version(&self, lineage_id: &LineageId, version_index: usize) -> Result<&SlideVersion, RepoError> {
        let lineage = self
            .lineages
            .get(lineage_id)
            .ok_or_else(|| RepoError::UnknownLineage(lineage_id.clone()))?;
        lineage.versions.get(version_index).ok_or_else(|| RepoError::UnknownVersion {
            lineage_id: lineage_id.clone(),
            version_index,
        })
    }
}

/// Shared repository handle. Reads run concurrently; writes are serialized.
pub struct Repository {
    store: Box<dyn DocumentStore>,
    state: RwLock<State>,
}

impl Repository {
    /// Loads everything from `store` and rebuilds the search index.
    pub fn open(store: impl DocumentStore + 'static) -> Result<Self, RepoError> {
        let snapshot = store.load()?;
        let mut state = State::default();
        for entry in snapshot.entries.values() {
            state.index_entry(entry);
        }
        for lineage in snapshot.lineages.values() {
            state.index_lineage(lineage);
        }
        state.entries = snapshot.entries;
        state.lineages = snapshot.lineages;
        Ok(Self {
            store: Box::new(store),
            state: RwLock::new(state),
        })
    }

    pub fn in_memory() -> Self {
        Self::open(MemoryStore::default()).expect("memory store always loads")
    }

    pub fn entry(&self, id: &EntryId) -> Result<RepositoryEntry, RepoError> {
        self.state
            .read()
            .entries
            .get(id)
            .cloned()
            .ok_or_else(|| RepoError::UnknownEntry(id.clone()))
    }

    pub fn entries(&self) -> Vec<RepositoryEntry> {
        self.state.read().entries.values().cloned().collect()
    }

    pub fn lineage(&self, id: &LineageId) -> Result<SlideLineage, RepoError> {
        self.state
            .read()
            .lineages
            .get(id)
            .cloned()
            .ok_or_else(|| RepoError::UnknownLineage(id.clone()))
    }

    pub fn lineages(&self) -> Vec<SlideLineage> {
        self.state.read().lineages.values().cloned().collect()
    }

    pub fn version(&self, lineage_id: &LineageId, version_index: usize) -> Result<Slide, RepoError> {
        Ok(self.state.read().version(lineage_id, version_index)?.slide.clone())
    }

    /// SHA-256 over the canonical JSON of all entries and lineages.
    pub fn state_digest(&self) -> String {
        let state = self.state.read();
        let doc = serde_json::json!({
            "entries": state.entries,
            "lineages": state.lineages,
        });
        sha256_hex(&serde_json::to_vec(&doc).expect("state serializes"))
    }

    /// Stores a deep copy. Slides without a lineage reference start a new
    /// lineage (as version 0) and the stored copy points at it; existing
    /// references must resolve and are kept as they are.
    pub fn save(
        &self,
        value: SaveValue,
        source_presentation_id: Option<PresentationId>,
    ) -> Result<RepositoryEntry, RepoError> {
        let now = Utc::now();
        let (mut payload, source) = match value {
            SaveValue::Presentation(p) => {
                let id = p.id.clone();
                (Payload::Presentation(p), Some(id))
            }
            SaveValue::Section(s) => (Payload::Section(s), source_presentation_id),
            SaveValue::Slide(s) => (Payload::Slide(s), source_presentation_id),
        };

        let mut state = self.state.write();
        let mut new_lineages = Vec::new();
        for slide in payload.slides_mut() {
            match &slide.lineage_ref {
                Some(r) => {
                    state.version(&r.lineage_id, r.version_index)?;
                }
                None => {
                    let lineage = SlideLineage::origin(slide, now);
                    slide.lineage_ref = Some(LineageRef {
                        lineage_id: lineage.lineage_id.clone(),
                        version_index: 0,
                    });
                    new_lineages.push(lineage);
                }
            }
        }
        let entry = RepositoryEntry {
            entry_id: EntryId::generate(),
            saved_at: now,
            source_presentation_id: source,
            payload,
        };

        for lineage in &new_lineages {
            self.store.put_lineage(lineage)?;
        }
        self.store.put_entry(&entry)?;

        for lineage in new_lineages {
            state.index_lineage(&lineage);
            state.lineages.insert(lineage.lineage_id.clone(), lineage);
        }
        state.index_entry(&entry);
        state.entries.insert(entry.entry_id.clone(), entry.clone());
        Ok(entry)
    }

    /// Copies a saved presentation or section into the workspace with fresh
    /// ids. Copied slides keep pointing at the versions they came from.
    pub fn import(&self, entry_id: &EntryId, target: ImportTarget<'_>) -> Result<Imported, RepoError> {
        let entry = self.entry(entry_id)?;
        match (target, &entry.payload) {
            (ImportTarget::Workspace, Payload::Presentation(p)) => {
                Ok(Imported::Presentation(p.fresh_copy()))
            }
            (ImportTarget::Workspace, other) => Err(RepoError::GranularityMismatch {
                expected: Granularity::Presentation,
                found: other.granularity(),
            }),
            (
                ImportTarget::Into {
                    presentation,
                    position,
                },
                Payload::Section(s),
            ) => {
                let copy = s.fresh_copy();
                let section_id = copy.id.clone();
                let presentation = presentation.insert_section(copy, position)?;
                Ok(Imported::Section {
                    presentation,
                    section_id,
                })
            }
            (ImportTarget::Into { .. }, other) => Err(RepoError::GranularityMismatch {
                expected: Granularity::Section,
                found: other.granularity(),
            }),
        }
    }

    /// Places a fresh copy of a lineage version into a section.
    pub fn reuse_slide(
        &self,
        lineage_id: &LineageId,
        version_index: usize,
        presentation: &Presentation,
        section_id: &SectionId,
        position: Option<usize>,
    ) -> Result<(Presentation, Slide), RepoError> {
        let mut slide = self.version(lineage_id, version_index)?.fresh_copy();
        slide.lineage_ref = Some(LineageRef {
            lineage_id: lineage_id.clone(),
            version_index,
        });
        let presentation = presentation.add_slide(section_id, slide.clone(), position)?;
        Ok((presentation, slide))
    }

    /// The saved version a working slide was copied from.
    pub fn base_of(&self, working: &Slide) -> Result<Slide, RepoError> {
        let r = working.lineage_ref.as_ref().ok_or(RepoError::NoLineage)?;
        self.version(&r.lineage_id, r.version_index)
    }

    pub fn detect_changes(&self, working: &Slide) -> Result<SlideDiff, RepoError> {
        Ok(detect_changes(working, &self.base_of(working)?))
    }

    /// Applies a sync decision and returns the working slide as it should
    /// look afterwards (content and lineage reference).
    pub fn resolve_sync(
        &self,
        lineage_id: &LineageId,
        working: &Slide,
        decision: &SyncDecision,
    ) -> Result<Slide, RepoError> {
        let now = Utc::now();
        let mut state = self.state.write();
        let mut lineage = state
            .lineages
            .get(lineage_id)
            .cloned()
            .ok_or_else(|| RepoError::UnknownLineage(lineage_id.clone()))?;
        let mut out = working.clone();

        match decision {
            SyncDecision::IgnoreChanges => {
                if let Some(r) = working.lineage_ref.as_ref().filter(|r| &r.lineage_id == lineage_id) {
                    let base = &state.version(lineage_id, r.version_index)?.slide;
                    out.title = base.title.clone();
                    out.elements = base.elements.clone();
                }
                return Ok(out);
            }
            SyncDecision::SetAsOrigin => {
                let fresh = SlideLineage::origin(working, now);
                self.store.put_lineage(&fresh)?;
                out.lineage_ref = Some(LineageRef {
                    lineage_id: fresh.lineage_id.clone(),
                    version_index: 0,
                });
                state.index_lineage(&fresh);
                state.lineages.insert(fresh.lineage_id.clone(), fresh);
                return Ok(out);
            }
            SyncDecision::KeepBoth => {
                let version_index = lineage.append(working, now);
                out.lineage_ref = Some(LineageRef {
                    lineage_id: lineage_id.clone(),
                    version_index,
                });
            }
            SyncDecision::ReplaceContent { targets } => {
                if targets.is_empty() {
                    return Err(RepoError::InvalidDecision(
                        "replace_content needs at least one target version".into(),
                    ));
                }
                if let Some(&bad) = targets.iter().find(|&&t| t >= lineage.len()) {
                    return Err(RepoError::UnknownVersion {
                        lineage_id: lineage_id.clone(),
                        version_index: bad,
                    });
                }
                let mut content = working.clone();
                content.lineage_ref = None;
                for &t in targets {
                    let v = &mut lineage.versions[t];
                    v.slide = content.clone();
                    v.replaced_at = Some(now);
                }
                let keep = working
                    .lineage_ref
                    .as_ref()
                    .filter(|r| &r.lineage_id == lineage_id && targets.contains(&r.version_index))
                    .map(|r| r.version_index);
                let version_index =
                    keep.unwrap_or_else(|| *targets.iter().min().expect("non-empty"));
                out.lineage_ref = Some(LineageRef {
                    lineage_id: lineage_id.clone(),
                    version_index,
                });
            }
        }

        self.store.put_lineage(&lineage)?;
        state.index_lineage(&lineage);
        state.lineages.insert(lineage_id.clone(), lineage);
        Ok(out)
    }

    pub fn search(&self, query: &str, granularity: Option<Granularity>) -> Result<Vec<SearchHit>, RepoError> {
        if query.trim().is_empty() {
            return Err(RepoError::EmptyQuery);
        }
        Ok(self.state.read().index.search(query, granularity))
    }

    /// Stores an asset under its SHA-256. Returns the hash and whether it was new.
    pub fn put_asset(&self, bytes: &[u8]) -> Result<(String, bool), RepoError> {
        let hash = sha256_hex(bytes);
        let _guard = self.state.write();
        if self.store.get_asset(&hash)?.is_some() {
            return Ok((hash, false));
        }
        self.store.put_asset(&hash, bytes)?;
        Ok((hash, true))
    }

    pub fn get_asset(&self, hash: &str) -> Result<Option<Vec<u8>>, RepoError> {
        if !crate::deck::is_asset_hash(hash) {
            return Ok(None);
        }
        self.store.get_asset(hash)
    }
}

use std::collections::HashMap;

use serde::Serialize;

use super::error::ApiError;
use crate::deck::{Presentation, PresentationId, SectionId, SlideId};
use crate::jargon::{ExpandedAudienceContext, HideState};
use crate::repository::Repository;

/// One working presentation held by the service.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub presentation: Presentation,
    /// Bumped on every accepted change; clients echo it back to detect
    /// concurrent edits.
    pub revision: u64,
    pub hidden: HideState,
    /// Expanded audience context, keyed by the audience it was built for.
    pub audience_context: Option<ExpandedAudienceContext>,
}

/// What most presentation endpoints return.
#[derive(Clone, Debug, Serialize)]
pub struct PresentationView {
    pub revision: u64,
    pub presentation: Presentation,
    /// Reused slides whose content differs from their saved base.
    pub dirty_slides: Vec<SlideId>,
}

pub fn dirty_slides(repo: &Repository, p: &Presentation) -> Vec<SlideId> {
    p.slides()
        .filter(|s| s.lineage_ref.is_some())
        .filter(|s| repo.detect_changes(s).map(|d| !d.is_empty()).unwrap_or(false))
        .map(|s| s.id.clone())
        .collect()
}

impl Workspace {
    pub fn view(&self, repo: &Repository) -> PresentationView {
        PresentationView {
            revision: self.revision,
            presentation: self.presentation.clone(),
            dirty_slides: dirty_slides(repo, &self.presentation),
        }
    }
}

/// All open workspaces plus reverse indexes from section and slide ids.
#[derive(Default)]
pub struct Sessions {
    workspaces: HashMap<PresentationId, Workspace>,
    section_owner: HashMap<SectionId, PresentationId>,
    slide_owner: HashMap<SlideId, PresentationId>,
}

pub(crate) fn check_revision(ws: &Workspace, expected: Option<u64>) -> Result<(), ApiError> {
    match expected {
        Some(r) if r != ws.revision => Err(ApiError::new(
            "revision_conflict",
            format!("revision {r} is stale; current revision is {}", ws.revision),
        )
        .with_details(serde_json::json!({ "current_revision": ws.revision }))),
        _ => Ok(()),
    }
}

impl Sessions {
    pub fn insert(&mut self, presentation: Presentation) -> &Workspace {
        let id = presentation.id.clone();
        self.index(&presentation);
        self.workspaces.insert(
            id.clone(),
            Workspace {
                presentation,
                revision: 1,
                hidden: HideState::default(),
                audience_context: None,
            },
        );
        &self.workspaces[&id]
    }

    pub fn all(&self) -> impl Iterator<Item = &Workspace> {
        self.workspaces.values()
    }

    pub fn get(&self, id: &PresentationId) -> Result<&Workspace, ApiError> {
        self.workspaces.get(id).ok_or_else(|| {
            ApiError::new("unknown_presentation", format!("unknown presentation `{id}`"))
        })
    }

    pub fn get_mut(&mut self, id: &PresentationId) -> Result<&mut Workspace, ApiError> {
        self.workspaces.get_mut(id).ok_or_else(|| {
            ApiError::new("unknown_presentation", format!("unknown presentation `{id}`"))
        })
    }

    pub fn owner_of_section(&self, id: &SectionId) -> Result<PresentationId, ApiError> {
        self.section_owner
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new("unknown_section", format!("unknown section `{id}`")))
    }

    pub fn owner_of_slide(&self, id: &SlideId) -> Result<PresentationId, ApiError> {
        self.slide_owner
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new("unknown_slide", format!("unknown slide `{id}`")))
    }

    /// Runs `f` against a workspace's presentation and commits the result,
    /// bumping the revision. Nothing changes if `f` fails or the revision
    /// is stale.
    pub fn update<T>(
        &mut self,
        id: &PresentationId,
        expected_revision: Option<u64>,
        f: impl FnOnce(&Workspace) -> Result<(Presentation, T), ApiError>,
    ) -> Result<(&Workspace, T), ApiError> {
        let ws = self.get(id)?;
        check_revision(ws, expected_revision)?;
        let (next, out) = f(ws)?;
        self.unindex(id);
        self.index(&next);
        let ws = self.workspaces.get_mut(id).expect("checked above");
        if ws.presentation.audience != next.audience {
            ws.audience_context = None;
        }
        ws.presentation = next;
        ws.revision += 1;
        Ok((ws, out))
    }

    fn index(&mut self, p: &Presentation) {
        for s in &p.sections {
            self.section_owner.insert(s.id.clone(), p.id.clone());
            for slide in &s.slides {
                self.slide_owner.insert(slide.id.clone(), p.id.clone());
            }
        }
    }

    fn unindex(&mut self, id: &PresentationId) {
        if let Some(ws) = self.workspaces.get(id) {
            for s in &ws.presentation.sections {
                self.section_owner.remove(&s.id);
                for slide in &s.slides {
                    self.slide_owner.remove(&slide.id);
                }
            }
        }
    }
}

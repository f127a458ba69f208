use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::deck::{Element, ElementId, Slide};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementField {
    Content,
    Bounds,
    Kind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifiedElement {
    pub id: ElementId,
    pub changed_fields: BTreeSet<ElementField>,
}

/// Element-level differences between a working slide and a saved version,
/// keyed by element id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlideDiff {
    pub added: Vec<ElementId>,
    pub removed: Vec<ElementId>,
    pub modified: Vec<ModifiedElement>,
    pub title_changed: bool,
}

impl SlideDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty()
            && self.removed.is_empty()
            && self.modified.is_empty()
            && !self.title_changed
    }
}

fn changed_fields(working: &Element, base: &Element) -> BTreeSet<ElementField> {
    let mut fields = BTreeSet::new();
    if working.content != base.content {
        fields.insert(ElementField::Content);
    }
    if working.bounds != base.bounds {
        fields.insert(ElementField::Bounds);
    }
    if working.kind != base.kind {
        fields.insert(ElementField::Kind);
    }
    fields
}

/// Added/modified follow the working slide's element order, removed follows
/// the base order. Element order changes alone are not reported.
pub fn detect_changes(working: &Slide, base: &Slide) -> SlideDiff {
    let mut diff = SlideDiff {
        title_changed: working.title != base.title,
        ..SlideDiff::default()
    };
    for w in &working.elements {
        match base.element(&w.id) {
            None => diff.added.push(w.id.clone()),
            Some(b) => {
                let fields = changed_fields(w, b);
                if !fields.is_empty() {
                    diff.modified.push(ModifiedElement {
                        id: w.id.clone(),
                        changed_fields: fields,
                    });
                }
            }
        }
    }
    diff.removed = base
        .elements
        .iter()
        .filter(|b| working.element(&b.id).is_none())
        .map(|b| b.id.clone())
        .collect();
    diff
}

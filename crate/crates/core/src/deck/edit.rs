//! Editing operations. Every operation takes `&self` and returns a new value;
//! the receiver is never modified.

use std::collections::HashSet;

use chrono::Utc;

use super::ids::{ElementId, PresentationId, SectionId, SlideId};
use super::model::{
    AudienceProfile, Bounds, Element, Emphasis, Presentation, Section, Slide,
    DEFAULT_SECTION_DURATION_S,
};
use super::DeckError;

/// Arguments for [`Presentation::add_section`].
#[derive(Clone, Debug, Default)]
pub struct NewSection {
    pub title: String,
    pub duration_s: Option<u64>,
    pub emphasis: Option<Emphasis>,
    pub position: Option<usize>,
}

impl NewSection {
    pub fn titled(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn duration(mut self, seconds: u64) -> Self {
        self.duration_s = Some(seconds);
        self
    }

    pub fn emphasis(mut self, emphasis: Emphasis) -> Self {
        self.emphasis = Some(emphasis);
        self
    }

    pub fn at(mut self, position: usize) -> Self {
        self.position = Some(position);
        self
    }
}

#[derive(Clone, Debug, Default)]
pub struct SectionPatch {
    pub title: Option<String>,
    pub duration_s: Option<u64>,
    pub emphasis: Option<Emphasis>,
}

#[derive(Clone, Debug, Default)]
pub struct ConstraintPatch {
    pub title: Option<String>,
    pub total_duration_s: Option<u64>,
    pub audience: Option<AudienceProfile>,
    pub topic: Option<Option<String>>,
}

/// A single-field element change.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementEdit {
    Content(String),
    Bounds(Bounds),
}

fn check_duration(seconds: u64) -> Result<(), DeckError> {
    if seconds == 0 {
        Err(DeckError::InvalidDuration)
    } else {
        Ok(())
    }
}

fn check_audience(audience: &AudienceProfile) -> Result<(), DeckError> {
    if audience.is_valid() {
        Ok(())
    } else {
        Err(DeckError::InvalidAudience)
    }
}

fn check_position(position: usize, len: usize) -> Result<(), DeckError> {
    if position > len {
        Err(DeckError::PositionOutOfRange { position, len })
    } else {
        Ok(())
    }
}

impl Presentation {
    pub fn create(
        title: impl Into<String>,
        total_duration_s: u64,
        audience: AudienceProfile,
    ) -> Result<Self, DeckError> {
        check_duration(total_duration_s)?;
        check_audience(&audience)?;
        Ok(Self {
            id: PresentationId::generate(),
            title: title.into(),
            total_duration_s,
            audience,
            created_at: Utc::now(),
            topic: None,
            sections: Vec::new(),
        })
    }

    pub fn update_constraints(&self, patch: ConstraintPatch) -> Result<Self, DeckError> {
        let mut next = self.clone();
        if let Some(total) = patch.total_duration_s {
            check_duration(total)?;
            next.total_duration_s = total;
        }
        if let Some(audience) = patch.audience {
            check_audience(&audience)?;
            next.audience = audience;
        }
        if let Some(title) = patch.title {
            next.title = title;
        }
        if let Some(topic) = patch.topic {
            next.topic = topic;
        }
        Ok(next)
    }

    /// Inserts a section (at the end unless a position is given). Missing
    /// duration defaults to two minutes, missing emphasis to `None`.
    pub fn add_section(&self, spec: NewSection) -> Result<(Self, SectionId), DeckError> {
        let duration_s = spec.duration_s.unwrap_or(DEFAULT_SECTION_DURATION_S);
        check_duration(duration_s)?;
        let position = spec.position.unwrap_or(self.sections.len());
        check_position(position, self.sections.len())?;

        let section = Section {
            id: SectionId::generate(),
            title: spec.title,
            duration_s,
            emphasis: spec.emphasis.unwrap_or_default(),
            slides: Vec::new(),
        };
        let id = section.id.clone();
        let mut next = self.clone();
        next.sections.insert(position, section);
        Ok((next, id))
    }

    /// Inserts an already-built section, e.g. one restored from the repository.
    pub fn insert_section(&self, section: Section, position: usize) -> Result<Self, DeckError> {
        check_duration(section.duration_s)?;
        check_position(position, self.sections.len())?;
        let mut next = self.clone();
        next.sections.insert(position, section);
        Ok(next)
    }

    pub fn update_section(&self, id: &SectionId, patch: SectionPatch) -> Result<Self, DeckError> {
        let idx = self
            .section_index(id)
            .ok_or_else(|| DeckError::UnknownSection(id.clone()))?;
        let mut next = self.clone();
        let section = &mut next.sections[idx];
        if let Some(d) = patch.duration_s {
            check_duration(d)?;
            section.duration_s = d;
        }
        if let Some(t) = patch.title {
            section.title = t;
        }
        if let Some(e) = patch.emphasis {
            section.emphasis = e;
        }
        Ok(next)
    }

    pub fn remove_section(&self, id: &SectionId) -> Result<(Self, Section), DeckError> {
        let idx = self
            .section_index(id)
            .ok_or_else(|| DeckError::UnknownSection(id.clone()))?;
        let mut next = self.clone();
        let removed = next.sections.remove(idx);
        Ok((next, removed))
    }

    /// Replaces the section order. `order` must name every section exactly once.
    pub fn reorder_sections(&self, order: &[SectionId]) -> Result<Self, DeckError> {
        if order.len() != self.sections.len() {
            return Err(DeckError::NotAPermutation);
        }
        let mut seen = HashSet::with_capacity(order.len());
        let mut sections = Vec::with_capacity(order.len());
        for id in order {
            if !seen.insert(id) {
                return Err(DeckError::NotAPermutation);
            }
            let section = self.section(id).ok_or(DeckError::NotAPermutation)?;
            sections.push(section.clone());
        }
        let mut next = self.clone();
        next.sections = sections;
        Ok(next)
    }

    pub fn add_slide(
        &self,
        section_id: &SectionId,
        slide: Slide,
        position: Option<usize>,
    ) -> Result<Self, DeckError> {
        let idx = self
            .section_index(section_id)
            .ok_or_else(|| DeckError::UnknownSection(section_id.clone()))?;
        if self.slide_position(&slide.id).is_some() {
            return Err(DeckError::DuplicateId(slide.id.to_string()));
        }
        validate_slide_elements(&slide)?;
        let len = self.sections[idx].slides.len();
        let position = position.unwrap_or(len);
        check_position(position, len)?;
        let mut next = self.clone();
        next.sections[idx].slides.insert(position, slide);
        Ok(next)
    }

    pub fn remove_slide(&self, slide_id: &SlideId) -> Result<(Self, Slide), DeckError> {
        let (si, pi) = self
            .slide_position(slide_id)
            .ok_or_else(|| DeckError::UnknownSlide(slide_id.clone()))?;
        let mut next = self.clone();
        let removed = next.sections[si].slides.remove(pi);
        Ok((next, removed))
    }

    /// Moves a slide into `target` at `position`. The position is checked
    /// against the target's slide count before the slide is taken out.
    pub fn move_slide(
        &self,
        slide_id: &SlideId,
        target: &SectionId,
        position: usize,
    ) -> Result<Self, DeckError> {
        let (si, pi) = self
            .slide_position(slide_id)
            .ok_or_else(|| DeckError::UnknownSlide(slide_id.clone()))?;
        let ti = self
            .section_index(target)
            .ok_or_else(|| DeckError::UnknownSection(target.clone()))?;
        check_position(position, self.sections[ti].slides.len())?;

        let mut next = self.clone();
        let slide = next.sections[si].slides.remove(pi);
        let dest = &mut next.sections[ti].slides;
        dest.insert(position.min(dest.len()), slide);
        Ok(next)
    }

    /// Swaps in a new value for an existing slide (matched by id).
    pub fn replace_slide(&self, slide: Slide) -> Result<Self, DeckError> {
        let (si, pi) = self
            .slide_position(&slide.id)
            .ok_or_else(|| DeckError::UnknownSlide(slide.id.clone()))?;
        validate_slide_elements(&slide)?;
        let mut next = self.clone();
        next.sections[si].slides[pi] = slide;
        Ok(next)
    }
}

fn validate_slide_elements(slide: &Slide) -> Result<(), DeckError> {
    let mut seen = HashSet::new();
    for e in &slide.elements {
        if !seen.insert(&e.id) {
            return Err(DeckError::DuplicateId(e.id.to_string()));
        }
        if !e.bounds.is_valid() {
            return Err(DeckError::InvalidBounds);
        }
    }
    Ok(())
}

impl Slide {
    pub fn edit_element(&self, id: &ElementId, edit: ElementEdit) -> Result<Self, DeckError> {
        let idx = self
            .elements
            .iter()
            .position(|e| &e.id == id)
            .ok_or_else(|| DeckError::UnknownElement(id.clone()))?;
        let mut next = self.clone();
        match edit {
            ElementEdit::Content(content) => next.elements[idx].content = content,
            ElementEdit::Bounds(bounds) => {
                if !bounds.is_valid() {
                    return Err(DeckError::InvalidBounds);
                }
                next.elements[idx].bounds = bounds;
            }
        }
        Ok(next)
    }

    pub fn add_element(&self, element: Element) -> Result<Self, DeckError> {
        if !element.bounds.is_valid() {
            return Err(DeckError::InvalidBounds);
        }
        if self.element(&element.id).is_some() {
            return Err(DeckError::DuplicateId(element.id.to_string()));
        }
        let mut next = self.clone();
        next.elements.push(element);
        Ok(next)
    }

    pub fn remove_element(&self, id: &ElementId) -> Result<Self, DeckError> {
        let idx = self
            .elements
            .iter()
            .position(|e| &e.id == id)
            .ok_or_else(|| DeckError::UnknownElement(id.clone()))?;
        let mut next = self.clone();
        next.elements.remove(idx);
        Ok(next)
    }

    pub fn with_title(&self, title: Option<String>) -> Self {
        let mut next = self.clone();
        next.title = title;
        next
    }

    /// Deep copy with a fresh slide id. Element ids are slide-scoped and kept,
    /// so a copy diffs clean against the version it came from. The lineage
    /// reference is kept too.
    pub fn fresh_copy(&self) -> Self {
        let mut next = self.clone();
        next.id = SlideId::generate();
        next
    }
}

impl Section {
    /// Deep copy with fresh ids for the section, its slides and their elements.
    pub fn fresh_copy(&self) -> Self {
        Section {
            id: SectionId::generate(),
            title: self.title.clone(),
            duration_s: self.duration_s,
            emphasis: self.emphasis,
            slides: self.slides.iter().map(Slide::fresh_copy).collect(),
        }
    }
}

impl Presentation {
    /// Deep copy with fresh ids at every level.
    pub fn fresh_copy(&self) -> Self {
        let mut next = self.clone();
        next.id = PresentationId::generate();
        next.sections = self.sections.iter().map(Section::fresh_copy).collect();
        next
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alice() -> Presentation {
        Presentation::create(
            "Multitasking",
            600,
            AudienceProfile::new(3, "high school students, parents, community members"),
        )
        .unwrap()
    }

    #[test]
    fn create_records_constraints() {
        let p = alice();
        assert_eq!(p.total_duration_s, 600);
        assert_eq!(p.audience.expertise_level, 3);
        assert!(p.sections.is_empty());

        let minimal = Presentation::create("x", 1, AudienceProfile::new(1, "a")).unwrap();
        assert_eq!(minimal.total_duration_s, 1);
    }

    #[test]
    fn create_rejects_bad_input() {
        let audience = AudienceProfile::new(1, "a");
        assert_eq!(
            Presentation::create("x", 0, audience).unwrap_err(),
            DeckError::InvalidDuration
        );
        for bad in [
            AudienceProfile::new(0, "a"),
            AudienceProfile::new(6, "a"),
            AudienceProfile::new(3, "   "),
        ] {
            assert_eq!(
                Presentation::create("x", 10, bad).unwrap_err(),
                DeckError::InvalidAudience
            );
        }
    }

    #[test]
    fn add_section_defaults_and_explicit_values() {
        let p = alice();
        let (p, id) = p
            .add_section(
                NewSection::titled("Illusion of productivity")
                    .duration(210)
                    .emphasis(Emphasis::High),
            )
            .unwrap();
        let s = p.section(&id).unwrap();
        assert_eq!((s.duration_s, s.emphasis), (210, Emphasis::High));

        let (p, intro) = p.add_section(NewSection::titled("Intro").at(0)).unwrap();
        let s = p.section(&intro).unwrap();
        assert_eq!((s.duration_s, s.emphasis), (120, Emphasis::None));
        assert_eq!(p.sections[0].id, intro);

        let err = p.add_section(NewSection::titled("X").duration(10).at(4)).unwrap_err();
        assert_eq!(err, DeckError::PositionOutOfRange { position: 4, len: 2 });
        assert_eq!(
            p.add_section(NewSection::titled("X").duration(0)).unwrap_err(),
            DeckError::InvalidDuration
        );
    }

    fn three_sections() -> (Presentation, Vec<SectionId>) {
        let mut p = alice();
        let mut ids = Vec::new();
        for t in ["A", "B", "C"] {
            let (n, id) = p.add_section(NewSection::titled(t)).unwrap();
            p = n;
            ids.push(id);
        }
        (p, ids)
    }

    #[test]
    fn reorder_sections_permutations() {
        let (p, ids) = three_sections();
        let order = vec![ids[2].clone(), ids[0].clone(), ids[1].clone()];
        let q = p.reorder_sections(&order).unwrap();
        let got: Vec<_> = q.sections.iter().map(|s| s.id.clone()).collect();
        assert_eq!(got, order);

        let dup = vec![ids[0].clone(), ids[0].clone(), ids[1].clone()];
        assert_eq!(p.reorder_sections(&dup).unwrap_err(), DeckError::NotAPermutation);

        let same = p.reorder_sections(&ids).unwrap();
        assert_eq!(same, p);
        assert_eq!(same.sum_duration_s(), p.sum_duration_s());
    }

    #[test]
    fn move_slide_between_and_within_sections() {
        let (p, ids) = three_sections();
        let s1 = Slide::new(Some("s1".into()), vec![]);
        let s2 = Slide::new(Some("s2".into()), vec![]);
        let s3 = Slide::new(Some("s3".into()), vec![]);
        let p = p
            .add_slide(&ids[0], s1.clone(), None)
            .and_then(|p| p.add_slide(&ids[0], s2.clone(), None))
            .and_then(|p| p.add_slide(&ids[1], s3.clone(), None))
            .unwrap();

        let moved = p.move_slide(&s1.id, &ids[1], 0).unwrap();
        assert_eq!(moved.sections[0].slides, vec![s2.clone()]);
        assert_eq!(moved.sections[1].slides, vec![s1.clone(), s3.clone()]);

        let same = p.move_slide(&s2.id, &ids[0], 1).unwrap();
        assert_eq!(same, p);

        assert_eq!(
            p.move_slide(&s1.id, &SectionId::from("nope"), 0).unwrap_err(),
            DeckError::UnknownSection(SectionId::from("nope"))
        );
        assert!(matches!(
            p.move_slide(&s1.id, &ids[2], 1),
            Err(DeckError::PositionOutOfRange { .. })
        ));
    }

    #[test]
    fn edit_element_changes_only_named_field() {
        let e = Element::text("Heavy Media Multitaskers (HMMs)", Bounds::new(0.1, 0.1, 0.5, 0.2));
        let slide = Slide::new(None, vec![e.clone()]);
        let edited = slide
            .edit_element(&e.id, ElementEdit::Content("frequent media users".into()))
            .unwrap();
        assert_eq!(edited.elements[0].content, "frequent media users");
        assert_eq!(edited.elements[0].bounds, e.bounds);

        assert_eq!(
            slide
                .edit_element(&e.id, ElementEdit::Bounds(Bounds::new(0.8, 0.0, 0.5, 0.5)))
                .unwrap_err(),
            DeckError::InvalidBounds
        );
        let same = slide
            .edit_element(&e.id, ElementEdit::Content(e.content.clone()))
            .unwrap();
        assert_eq!(same, slide);
        assert!(matches!(
            slide.edit_element(&ElementId::from("zz"), ElementEdit::Content("x".into())),
            Err(DeckError::UnknownElement(_))
        ));
    }

    #[test]
    fn fresh_copy_keeps_content_and_lineage() {
        let mut slide = Slide::new(
            Some("t".into()),
            vec![Element::text("body", Bounds::full())],
        );
        slide.lineage_ref = Some(crate::deck::LineageRef {
            lineage_id: "L".into(),
            version_index: 2,
        });
        let copy = slide.fresh_copy();
        assert_ne!(copy.id, slide.id);
        assert!(copy.same_content(&slide));
        assert_eq!(copy.lineage_ref, slide.lineage_ref);
        assert_eq!(copy.elements[0].content, "body");
    }
}

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::ids::{ElementId, LineageId, PresentationId, SectionId, SlideId};

/// Section duration applied when the author does not give one (two minutes).
pub const DEFAULT_SECTION_DURATION_S: u64 = 120;

pub const MIN_EXPERTISE_LEVEL: u8 = 1;
pub const MAX_EXPERTISE_LEVEL: u8 = 5;

/// Who the talk is for: a 1 (novice) to 5 (expert) rating plus free text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AudienceProfile {
    pub expertise_level: u8,
    pub description: String,
}

impl AudienceProfile {
    pub fn new(expertise_level: u8, description: impl Into<String>) -> Self {
        Self {
            expertise_level,
            description: description.into(),
        }
    }

    pub fn is_valid(&self) -> bool {
        (MIN_EXPERTISE_LEVEL..=MAX_EXPERTISE_LEVEL).contains(&self.expertise_level)
            && !self.description.trim().is_empty()
    }
}

/// How central a section is to the talk. `None` sections take no part in
/// emphasis/time conflict checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emphasis {
    #[default]
    None,
    Low,
    Medium,
    High,
}

impl Emphasis {
    pub const ALL: [Emphasis; 4] = [Emphasis::None, Emphasis::Low, Emphasis::Medium, Emphasis::High];

    pub fn as_str(self) -> &'static str {
        match self {
            Emphasis::None => "none",
            Emphasis::Low => "low",
            Emphasis::Medium => "medium",
            Emphasis::High => "high",
        }
    }
}

impl std::str::FromStr for Emphasis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Emphasis::None),
            "low" => Ok(Emphasis::Low),
            "medium" => Ok(Emphasis::Medium),
            "high" => Ok(Emphasis::High),
            other => Err(format!("unknown emphasis `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Text,
    Image,
}

/// Element placement in normalized slide coordinates (the slide is the unit square).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Bounds {
    const SLACK: f64 = 1e-9;

    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn full() -> Self {
        Self::new(0.0, 0.0, 1.0, 1.0)
    }

    pub fn is_valid(&self) -> bool {
        let unit = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        unit(self.x)
            && unit(self.y)
            && unit(self.w)
            && unit(self.h)
            && self.w > 0.0
            && self.h > 0.0
            && self.x + self.w <= 1.0 + Self::SLACK
            && self.y + self.h <= 1.0 + Self::SLACK
    }
}

/// A text box or an image. For images `content` is the SHA-256 of the asset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub id: ElementId,
    pub kind: ElementKind,
    pub content: String,
    pub bounds: Bounds,
}

impl Element {
    pub fn text(content: impl Into<String>, bounds: Bounds) -> Self {
        Self {
            id: ElementId::generate(),
            kind: ElementKind::Text,
            content: content.into(),
            bounds,
        }
    }

    pub fn image(asset_hash: impl Into<String>, bounds: Bounds) -> Self {
        Self {
            id: ElementId::generate(),
            kind: ElementKind::Image,
            content: asset_hash.into(),
            bounds,
        }
    }
}

/// Points a reused slide at the repository version it was copied from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineageRef {
    pub lineage_id: LineageId,
    pub version_index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slide {
    pub id: SlideId,
    pub title: Option<String>,
    pub lineage_ref: Option<LineageRef>,
    pub elements: Vec<Element>,
}

impl Slide {
    pub fn new(title: Option<String>, elements: Vec<Element>) -> Self {
        Self {
            id: SlideId::generate(),
            title,
            lineage_ref: None,
            elements,
        }
    }

    pub fn element(&self, id: &ElementId) -> Option<&Element> {
        self.elements.iter().find(|e| &e.id == id)
    }

    /// The string jargon offsets index into: the title followed by every
    /// text element, joined by newlines.
    pub fn canonical_text(&self) -> String {
        let mut parts = vec![self.title.as_deref().unwrap_or("")];
        parts.extend(self.text_contents());
        parts.join("\n")
    }

    /// Text element contents in element order.
    pub fn text_contents(&self) -> impl Iterator<Item = &str> {
        self.elements
            .iter()
            .filter(|e| e.kind == ElementKind::Text)
            .map(|e| e.content.as_str())
    }

    /// Same slide content, ignoring slide id and lineage reference.
    pub fn same_content(&self, other: &Slide) -> bool {
        self.title == other.title && self.elements == other.elements
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub id: SectionId,
    pub title: String,
    pub duration_s: u64,
    pub emphasis: Emphasis,
    pub slides: Vec<Slide>,
}

impl Section {
    pub fn slide(&self, id: &SlideId) -> Option<&Slide> {
        self.slides.iter().find(|s| &s.id == id)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Presentation {
    pub id: PresentationId,
    pub title: String,
    pub total_duration_s: u64,
    pub audience: AudienceProfile,
    pub created_at: DateTime<Utc>,
    pub topic: Option<String>,
    pub sections: Vec<Section>,
}

impl Presentation {
    pub fn section(&self, id: &SectionId) -> Option<&Section> {
        self.sections.iter().find(|s| &s.id == id)
    }

    pub fn section_index(&self, id: &SectionId) -> Option<usize> {
        self.sections.iter().position(|s| &s.id == id)
    }

    /// Locates a slide: (section index, slide index).
    pub fn slide_position(&self, id: &SlideId) -> Option<(usize, usize)> {
        self.sections.iter().enumerate().find_map(|(si, sec)| {
            sec.slides.iter().position(|s| &s.id == id).map(|pi| (si, pi))
        })
    }

    pub fn slide(&self, id: &SlideId) -> Option<&Slide> {
        self.slide_position(id)
            .map(|(si, pi)| &self.sections[si].slides[pi])
    }

    pub fn slides(&self) -> impl Iterator<Item = &Slide> {
        self.sections.iter().flat_map(|s| s.slides.iter())
    }

    pub fn sum_duration_s(&self) -> u64 {
        self.sections.iter().map(|s| s.duration_s).sum()
    }
}

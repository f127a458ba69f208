//! Timeline and constraint checks: cumulative section times, emphasis/time
//! conflicts between sections, and overflow past the presentation time limit.
//!
//! For every ordered pair (A, B) where A carries more emphasis than B (and
//! neither is `None`), the ratio r = duration(A) / duration(B) is banded:
//!
//! | ratio            | level  |
//! |------------------|--------|
//! | r <= 0.5         | High   |
//! | 0.5 < r <= 0.75  | Medium |
//! | 0.75 < r <= 1    | Low    |
//! | r > 1            | none   |
//!
//! Only the more-emphasized side of a pair is marked. Classification uses
//! integer cross-multiplication, never floating point.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::deck::{Emphasis, Presentation, SectionId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConflictLevel {
    #[default]
    #[serde(rename = "none")]
    NoConflict,
    Low,
    Medium,
    High,
}

impl ConflictLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            ConflictLevel::NoConflict => "none",
            ConflictLevel::Low => "low",
            ConflictLevel::Medium => "medium",
            ConflictLevel::High => "high",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TimelineEntry {
    pub section_id: SectionId,
    pub start_s: u64,
    pub end_s: u64,
    pub duration_s: u64,
}

/// Sections laid end to end from t = 0, in deck order.
pub fn compute_timeline(presentation: &Presentation) -> Vec<TimelineEntry> {
    let mut clock = 0;
    presentation
        .sections
        .iter()
        .map(|s| {
            let start_s = clock;
            clock += s.duration_s;
            TimelineEntry {
                section_id: s.id.clone(),
                start_s,
                end_s: clock,
                duration_s: s.duration_s,
            }
        })
        .collect()
}

/// Bands a more-important/less-important duration ratio.
pub fn classify_ratio(important_s: u64, other_s: u64) -> ConflictLevel {
    // compare important/other against 1/2, 3/4 and 1 without division
    let (a, b) = (u128::from(important_s), u128::from(other_s));
    if 2 * a <= b {
        ConflictLevel::High
    } else if 4 * a <= 3 * b {
        ConflictLevel::Medium
    } else if a <= b {
        ConflictLevel::Low
    } else {
        ConflictLevel::NoConflict
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConflictPair {
    /// The less-emphasized section of the pair.
    pub other_id: SectionId,
    #[serde(serialize_with = "ratio_as_number")]
    pub ratio: Ratio<u64>,
}

impl ConflictPair {
    pub fn level(&self) -> ConflictLevel {
        classify_ratio(*self.ratio.numer(), *self.ratio.denom())
    }
}

fn ratio_as_number<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(ratio_to_f64(r))
}

pub fn ratio_to_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionConflict {
    pub id: SectionId,
    pub conflict_level: ConflictLevel,
    pub overflow: bool,
    /// Conflicting pairs where this section is the more-emphasized side.
    pub pairs: Vec<ConflictPair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConflictReport {
    pub sections: Vec<SectionConflict>,
    pub total_duration_s: u64,
    pub sum_duration_s: u64,
}

impl ConflictReport {
    pub fn section(&self, id: &SectionId) -> Option<&SectionConflict> {
        self.sections.iter().find(|s| &s.id == id)
    }

    /// Compact JSON, the exact body served by the HTTP API and printed by the CLI.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Section ids whose cumulative end time is strictly past the time limit.
pub fn compute_overflow(presentation: &Presentation) -> BTreeSet<SectionId> {
    compute_timeline(presentation)
        .into_iter()
        .filter(|e| e.end_s > presentation.total_duration_s)
        .map(|e| e.section_id)
        .collect()
}

pub fn compute_conflicts(presentation: &Presentation) -> ConflictReport {
    let overflow = compute_overflow(presentation);
    let sections = presentation
        .sections
        .iter()
        .map(|a| {
            let pairs: Vec<ConflictPair> = if a.emphasis == Emphasis::None {
                Vec::new()
            } else {
                presentation
                    .sections
                    .iter()
                    .filter(|b| b.emphasis != Emphasis::None && a.emphasis > b.emphasis)
                    .filter(|b| classify_ratio(a.duration_s, b.duration_s) != ConflictLevel::NoConflict)
                    .map(|b| ConflictPair {
                        other_id: b.id.clone(),
                        ratio: Ratio::new(a.duration_s, b.duration_s),
                    })
                    .collect()
            };
            let conflict_level = pairs
                .iter()
                .map(ConflictPair::level)
                .max()
                .unwrap_or_default();
            SectionConflict {
                id: a.id.clone(),
                conflict_level,
                overflow: overflow.contains(&a.id),
                pairs,
            }
        })
        .collect();

    ConflictReport {
        sections,
        total_duration_s: presentation.total_duration_s,
        sum_duration_s: presentation.sum_duration_s(),
    }
}

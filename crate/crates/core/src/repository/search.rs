//! In-memory inverted index over repository titles and slide text.
//!
//! Tokens are maximal runs of alphanumeric characters, ASCII-lowercased. A
//! document scores 2 for every distinct query token found in its title and 1
//! for every one found in its body.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::Granularity;
use crate::deck::{EntryId, LineageId};

pub const TITLE_WEIGHT: u32 = 2;
pub const BODY_WEIGHT: u32 = 1;

pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_ascii_lowercase())
}

/// What a hit points at.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HitTarget {
    Entry { entry_id: EntryId },
    SlideVersion { lineage_id: LineageId, version_index: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub target: HitTarget,
    pub granularity: Granularity,
    pub score: u32,
    pub title: String,
    pub snippet: String,
    pub saved_at: DateTime<Utc>,
}

#[derive(Clone, Debug)]
pub(crate) struct IndexedDoc {
    pub granularity: Granularity,
    pub title: String,
    pub body: Vec<String>,
    pub saved_at: DateTime<Utc>,
    title_tokens: BTreeSet<String>,
    body_tokens: BTreeSet<String>,
}

impl IndexedDoc {
    pub fn new(
        granularity: Granularity,
        title: String,
        body: Vec<String>,
        saved_at: DateTime<Utc>,
    ) -> Self {
        let title_tokens = tokenize(&title).collect();
        let body_tokens = body.iter().flat_map(|b| tokenize(b)).collect();
        Self {
            granularity,
            title,
            body,
            saved_at,
            title_tokens,
            body_tokens,
        }
    }

    fn score(&self, query: &BTreeSet<String>) -> u32 {
        query
            .iter()
            .map(|q| {
                let mut s = 0;
                if self.title_tokens.contains(q) {
                    s += TITLE_WEIGHT;
                }
                if self.body_tokens.contains(q) {
                    s += BODY_WEIGHT;
                }
                s
            })
            .sum()
    }

    fn snippet(&self, query: &BTreeSet<String>) -> String {
        self.body
            .iter()
            .find(|line| tokenize(line).any(|t| query.contains(&t)))
            .cloned()
            .unwrap_or_else(|| self.title.clone())
    }
}

#[derive(Default)]
pub(crate) struct SearchIndex {
    docs: BTreeMap<HitTarget, IndexedDoc>,
    postings: HashMap<String, BTreeSet<HitTarget>>,
}

impl SearchIndex {
    pub fn upsert(&mut self, target: HitTarget, doc: IndexedDoc) {
        self.remove(&target);
        for token in doc.title_tokens.iter().chain(&doc.body_tokens) {
            self.postings
                .entry(token.clone())
                .or_default()
                .insert(target.clone());
        }
        self.docs.insert(target, doc);
    }

    pub fn remove(&mut self, target: &HitTarget) {
        if let Some(old) = self.docs.remove(target) {
            for token in old.title_tokens.iter().chain(&old.body_tokens) {
                if let Some(set) = self.postings.get_mut(token) {
                    set.remove(target);
                    if set.is_empty() {
                        self.postings.remove(token);
                    }
                }
            }
        }
    }

    /// Hits sorted by score (descending), then most recent save, then target.
    pub fn search(&self, query: &str, granularity: Option<Granularity>) -> Vec<SearchHit> {
        let tokens: BTreeSet<String> = tokenize(query).collect();
        let candidates: BTreeSet<&HitTarget> = tokens
            .iter()
            .filter_map(|t| self.postings.get(t))
            .flatten()
            .collect();
        let mut hits: Vec<SearchHit> = candidates
            .into_iter()
            .filter_map(|target| {
                let doc = &self.docs[target];
                if granularity.is_some_and(|g| g != doc.granularity) {
                    return None;
                }
                let score = doc.score(&tokens);
                (score > 0).then(|| SearchHit {
                    target: target.clone(),
                    granularity: doc.granularity,
                    score,
                    title: doc.title.clone(),
                    snippet: doc.snippet(&tokens),
                    saved_at: doc.saved_at,
                })
            })
            .collect();
        hits.sort_by(|a, b| {
            b.score
                .cmp(&a.score)
                .then(b.saved_at.cmp(&a.saved_at))
                .then(a.target.cmp(&b.target))
        });
        hits
    }
}

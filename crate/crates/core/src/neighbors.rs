//! Banded neighbor retrieval.
//!
//! A corpus record is a candidate neighbor of a target profile when it has an
//! iconicity rating, shares at least one hand with the target, and its
//! handshape similarity clears the prefilter. Candidates are split into
//! rounds by their congruency total: round `r` holds the candidates whose
//! total falls in `bands[r]`, ranked by total descending with ties broken
//! by record id ascending.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, GestureRecord};
use crate::par::{self, Execution};
use crate::similarity::{congruency, CongruencyScore, SimilarityError};
use crate::sublexical::SubLexicalProfile;

pub const DEFAULT_HANDSHAPE_PREFILTER: f64 = 0.8;
pub const DEFAULT_ROUND0_FLOOR: f64 = 2.4;
pub const DEFAULT_ROUND1_FLOOR: f64 = 1.7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeighborError {
    #[error("round {index} out of range ({rounds} bands configured)")]
    BadRound { index: usize, rounds: usize },
    #[error("invalid round config: {0}")]
    InvalidConfig(String),
    #[error("scoring against `{id}`: {source}")]
    Similarity { id: String, source: SimilarityError },
}

/// Congruency interval `[lower, upper)`; no upper bound when `upper` is `None`.
/// Serialized as `[lower, upper]` with `null` for an open top.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(f64, Option<f64>)", into = "(f64, Option<f64>)")]
pub struct Band {
    pub lower: f64,
    pub upper: Option<f64>,
}

impl Band {
    pub fn new(lower: f64, upper: Option<f64>) -> Self {
        Band { lower, upper }
    }

    pub fn contains(&self, total: f64) -> bool {
        total >= self.lower && self.upper.is_none_or(|u| total < u)
    }
}

impl From<(f64, Option<f64>)> for Band {
    fn from((lower, upper): (f64, Option<f64>)) -> Self {
        Band { lower, upper }
    }
}

impl From<Band> for (f64, Option<f64>) {
    fn from(b: Band) -> Self {
        (b.lower, b.upper)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundConfig {
    pub handshape_prefilter: f64,
    pub bands: Vec<Band>,
}

impl Default for RoundConfig {
    fn default() -> Self {
        RoundConfig {
            handshape_prefilter: DEFAULT_HANDSHAPE_PREFILTER,
            bands: vec![
                Band::new(DEFAULT_ROUND0_FLOOR, None),
                Band::new(DEFAULT_ROUND1_FLOOR, Some(DEFAULT_ROUND0_FLOOR)),
            ],
        }
    }
}

impl RoundConfig {
    /// Bands must be nonempty intervals, strictly descending and disjoint.
    pub fn validate(&self) -> Result<(), NeighborError> {
        let bad = |m: String| Err(NeighborError::InvalidConfig(m));
        if !(-1.0..=1.0).contains(&self.handshape_prefilter) {
            return bad(format!("handshape_prefilter {} outside [-1, 1]", self.handshape_prefilter));
        }
        if self.bands.is_empty() {
            return bad("at least one band is required".into());
        }
        for (i, b) in self.bands.iter().enumerate() {
            if !b.lower.is_finite() || b.upper.is_some_and(|u| !u.is_finite() || u <= b.lower) {
                return bad(format!("band {i} is not a nonempty finite interval"));
            }
            if i > 0 && b.upper.is_none() {
                return bad(format!("only the first band may be unbounded above (band {i})"));
            }
            if let Some(prev) = i.checked_sub(1).map(|p| self.bands[p]) {
                if b.upper.is_some_and(|u| u > prev.lower) {
                    return bad(format!("band {i} overlaps band {}", i - 1));
                }
            }
        }
        Ok(())
    }

    pub fn rounds(&self) -> usize {
        self.bands.len()
    }

    /// Index of the band holding `total`, if any.
    pub fn round_of(&self, total: f64) -> Option<usize> {
        self.bands.iter().position(|b| b.contains(total))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub record_id: String,
    pub congruency: CongruencyScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborList {
    pub round_index: usize,
    pub entries: Vec<Neighbor>,
}

impl NeighborList {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Rank order: total descending, then id ascending.
pub fn rank_order(a: &Neighbor, b: &Neighbor) -> Ordering {
    b.congruency.total.total_cmp(&a.congruency.total).then_with(|| a.record_id.cmp(&b.record_id))
}

fn score_record(
    target: &SubLexicalProfile,
    record: &GestureRecord,
    prefilter: f64,
) -> Result<Option<Neighbor>, NeighborError> {
    if record.iconicity_rating.is_none() {
        return Ok(None);
    }
    let score = match congruency(target, &record.profile) {
        Ok(s) => s,
        Err(SimilarityError::NoSharedHands) => return Ok(None),
        Err(source) => return Err(NeighborError::Similarity { id: record.id.clone(), source }),
    };
    if score.handshape_sim < prefilter {
        return Ok(None);
    }
    Ok(Some(Neighbor { record_id: record.id.clone(), congruency: score }))
}

/// Every rated record passing the handshape prefilter, scored, in corpus order.
pub fn scored_candidates(
    target: &SubLexicalProfile,
    corpus: &Corpus,
    cfg: &RoundConfig,
    exec: Execution,
) -> Result<Vec<Neighbor>, NeighborError> {
    let records = corpus.records_vec();
    let scored = par::map(exec, &records, |r| score_record(target, r, cfg.handshape_prefilter));
    let mut out = Vec::with_capacity(scored.len());
    for s in scored {
        if let Some(n) = s? {
            out.push(n);
        }
    }
    Ok(out)
}

/// Split scored candidates into per-round ranked lists.
pub fn bucket_into_rounds(candidates: Vec<Neighbor>, cfg: &RoundConfig) -> Vec<NeighborList> {
    let mut lists: Vec<NeighborList> =
        (0..cfg.rounds()).map(|round_index| NeighborList { round_index, entries: Vec::new() }).collect();
    for n in candidates {
        if let Some(r) = cfg.round_of(n.congruency.total) {
            lists[r].entries.push(n);
        }
    }
    for l in &mut lists {
        l.entries.sort_by(rank_order);
    }
    lists
}

pub fn find_neighbors(
    target: &SubLexicalProfile,
    corpus: &Corpus,
    round_index: usize,
    cfg: &RoundConfig,
) -> Result<NeighborList, NeighborError> {
    find_neighbors_with(target, corpus, round_index, cfg, Execution::default())
}

pub fn find_neighbors_with(
    target: &SubLexicalProfile,
    corpus: &Corpus,
    round_index: usize,
    cfg: &RoundConfig,
    exec: Execution,
) -> Result<NeighborList, NeighborError> {
    cfg.validate()?;
    let band =
        *cfg.bands.get(round_index).ok_or(NeighborError::BadRound { index: round_index, rounds: cfg.rounds() })?;
    let mut entries: Vec<Neighbor> = scored_candidates(target, corpus, cfg, exec)?
        .into_iter()
        .filter(|n| band.contains(n.congruency.total))
        .collect();
    entries.sort_by(rank_order);
    Ok(NeighborList { round_index, entries })
}

/// One ranked list per configured band.
pub fn rank_all(
    target: &SubLexicalProfile,
    corpus: &Corpus,
    cfg: &RoundConfig,
) -> Result<Vec<NeighborList>, NeighborError> {
    rank_all_with(target, corpus, cfg, Execution::default())
}

pub fn rank_all_with(
    target: &SubLexicalProfile,
    corpus: &Corpus,
    cfg: &RoundConfig,
    exec: Execution,
) -> Result<Vec<NeighborList>, NeighborError> {
    cfg.validate()?;
    Ok(bucket_into_rounds(scored_candidates(target, corpus, cfg, exec)?, cfg))
}

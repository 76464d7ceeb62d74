//! Rating assignment.
//!
//! Rounds are walked in order. Within a round, neighbors are tested in rank
//! order; the first whose gloss has word similarity `S >= tau` with the
//! target gloss donates its rating, lowered by the round index and clamped
//! at the bottom of the 1-7 scale. A gloss missing from the word vectors
//! never qualifies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, GestureRecord, RATING_MIN};
use crate::neighbors::{bucket_into_rounds, scored_candidates, NeighborError, RoundConfig};
use crate::par::{self, Execution};
use crate::sublexical::SubLexicalProfile;
use crate::wordvec::{WordVecError, WordVectorTable};

pub const DEFAULT_TAU: f64 = 0.3;

#[derive(Debug, Error)]
pub enum AssignError {
    #[error("invalid assign config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Neighbor(#[from] NeighborError),
    #[error(transparent)]
    WordVec(#[from] WordVecError),
    #[error("neighbor `{0}` has no rating")]
    UnratedNeighbor(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignConfig {
    pub tau: f64,
    pub rounds: RoundConfig,
    pub clamp_floor: f64,
}

impl Default for AssignConfig {
    fn default() -> Self {
        AssignConfig { tau: DEFAULT_TAU, rounds: RoundConfig::default(), clamp_floor: RATING_MIN }
    }
}

impl AssignConfig {
    pub fn validate(&self) -> Result<(), AssignError> {
        if !(-1.0..=1.0).contains(&self.tau) {
            return Err(AssignError::InvalidConfig(format!("tau {} outside [-1, 1]", self.tau)));
        }
        if self.clamp_floor != RATING_MIN {
            return Err(AssignError::InvalidConfig(format!(
                "clamp_floor must be the scale minimum {RATING_MIN}, got {}",
                self.clamp_floor
            )));
        }
        self.rounds.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AssignmentResult {
    Assigned { rating: f64, neighbor_id: String, round_index: usize, word_similarity: f64, congruency_total: f64 },
    Unassigned { rounds_exhausted: usize, candidates_tested: usize },
}

impl AssignmentResult {
    pub fn rating(&self) -> Option<f64> {
        match self {
            AssignmentResult::Assigned { rating, .. } => Some(*rating),
            AssignmentResult::Unassigned { .. } => None,
        }
    }

    pub fn is_assigned(&self) -> bool {
        matches!(self, AssignmentResult::Assigned { .. })
    }
}

/// A gesture awaiting a rating.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub gesture_id: String,
    pub word: String,
    pub profile: SubLexicalProfile,
}

impl From<&GestureRecord> for Target {
    fn from(r: &GestureRecord) -> Self {
        Target { gesture_id: r.id.clone(), word: r.word.clone(), profile: r.profile.clone() }
    }
}

/// Donated rating for a neighbor found in `round`.
pub fn lowered_rating(neighbor_rating: f64, round: usize, floor: f64) -> f64 {
    (neighbor_rating - round as f64).max(floor)
}

pub fn assign(
    target_profile: &SubLexicalProfile,
    target_word: &str,
    corpus: &Corpus,
    table: &WordVectorTable,
    cfg: &AssignConfig,
) -> Result<AssignmentResult, AssignError> {
    assign_with(target_profile, target_word, corpus, table, cfg, Execution::default())
}

pub fn assign_with(
    target_profile: &SubLexicalProfile,
    target_word: &str,
    corpus: &Corpus,
    table: &WordVectorTable,
    cfg: &AssignConfig,
    exec: Execution,
) -> Result<AssignmentResult, AssignError> {
    cfg.validate()?;
    let candidates = scored_candidates(target_profile, corpus, &cfg.rounds, exec)?;
    let rounds = bucket_into_rounds(candidates, &cfg.rounds);

    let mut tested = 0;
    for list in &rounds {
        for n in &list.entries {
            tested += 1;
            let record = corpus.get(&n.record_id).expect("neighbor ids come from the corpus");
            let s = match table.word_similarity(target_word, &record.word) {
                Ok(s) => s,
                Err(WordVecError::OutOfVocabulary(_)) => continue,
                Err(e) => return Err(e.into()),
            };
            if s >= cfg.tau {
                let donor = record.iconicity_rating.ok_or_else(|| AssignError::UnratedNeighbor(record.id.clone()))?;
                return Ok(AssignmentResult::Assigned {
                    rating: lowered_rating(donor, list.round_index, cfg.clamp_floor),
                    neighbor_id: record.id.clone(),
                    round_index: list.round_index,
                    word_similarity: s,
                    congruency_total: n.congruency.total,
                });
            }
        }
    }
    Ok(AssignmentResult::Unassigned { rounds_exhausted: rounds.len(), candidates_tested: tested })
}

/// Assign every target independently; one failure does not stop the rest.
/// Output order follows input order.
pub fn assign_batch(
    targets: &[Target],
    corpus: &Corpus,
    table: &WordVectorTable,
    cfg: &AssignConfig,
) -> Vec<(String, Result<AssignmentResult, AssignError>)> {
    assign_batch_with(targets, corpus, table, cfg, Execution::default())
}

pub fn assign_batch_with(
    targets: &[Target],
    corpus: &Corpus,
    table: &WordVectorTable,
    cfg: &AssignConfig,
    exec: Execution,
) -> Vec<(String, Result<AssignmentResult, AssignError>)> {
    par::map(exec, targets, |t| {
        let r = assign_with(&t.profile, &t.word, corpus, table, cfg, Execution::Sequential);
        (t.gesture_id.clone(), r)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Assigned,
    Unassigned,
    Error,
}

/// One entry of the batch output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    pub gesture_id: String,
    pub word: String,
    pub outcome: OutcomeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbor_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round: Option<usize>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub word_similarity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub congruency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl AssignmentRecord {
    pub fn new(target: &Target, result: &Result<AssignmentResult, AssignError>) -> Self {
        let mut rec = AssignmentRecord {
            gesture_id: target.gesture_id.clone(),
            word: target.word.clone(),
            outcome: OutcomeKind::Unassigned,
            rating: None,
            neighbor_id: None,
            round: None,
            word_similarity: None,
            congruency: None,
            error: None,
        };
        match result {
            Ok(AssignmentResult::Assigned { rating, neighbor_id, round_index, word_similarity, congruency_total }) => {
                rec.outcome = OutcomeKind::Assigned;
                rec.rating = Some(*rating);
                rec.neighbor_id = Some(neighbor_id.clone());
                rec.round = Some(*round_index);
                rec.word_similarity = Some(*word_similarity);
                rec.congruency = Some(*congruency_total);
            }
            Ok(AssignmentResult::Unassigned { .. }) => {}
            Err(e) => {
                rec.outcome = OutcomeKind::Error;
                rec.error = Some(e.to_string());
            }
        }
        rec
    }
}

/// Render batch output as a pretty-printed JSON array with a trailing newline.
pub fn render_records(records: &[AssignmentRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("assignment records serialize");
    s.push('\n');
    s
}

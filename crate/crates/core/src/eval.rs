//! Accuracy of assigned ratings against manual ratings.
//!
//! An assigned rating is correct when it lies within `tolerance` of the
//! manual rating on the real-valued scale. Targets without an assigned
//! rating are excluded from the denominator.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assign::{AssignmentRecord, OutcomeKind};
use crate::corpus::{RATING_MAX, RATING_MIN};

pub const DEFAULT_TOLERANCE: f64 = 1.0;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("no manual rating for `{0}`")]
    MissingManualRating(String),
    #[error("manual ratings line {line}: {reason}")]
    MalformedManual { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    Incorrect,
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalItem {
    pub gesture_id: String,
    pub manual: f64,
    pub auto: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_targets: usize,
    pub n_unassigned: usize,
    pub n_scored: usize,
    pub n_correct: usize,
    /// `None` when nothing was scored.
    pub accuracy: Option<f64>,
    pub tolerance: f64,
    pub per_item: Vec<EvalItem>,
}

impl EvalReport {
    pub fn accuracy_percent(&self) -> Option<f64> {
        self.accuracy.map(|a| a * 100.0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable table followed by a summary line.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<24} {:>7} {:>7}  verdict", "gesture_id", "manual", "auto");
        for item in &self.per_item {
            let auto = item.auto.map_or_else(|| "-".to_string(), |a| format!("{a:.2}"));
            let verdict = match item.verdict {
                Verdict::Correct => "correct",
                Verdict::Incorrect => "incorrect",
                Verdict::Excluded => "excluded",
            };
            let _ = writeln!(out, "{:<24} {:>7.2} {:>7}  {}", item.gesture_id, item.manual, auto, verdict);
        }
        let _ = writeln!(
            out,
            "targets: {}  unassigned: {}  scored: {}  correct: {}  tolerance: ±{}",
            self.n_targets, self.n_unassigned, self.n_scored, self.n_correct, self.tolerance
        );
        match self.accuracy_percent() {
            Some(p) => {
                let _ = writeln!(out, "accuracy: {p:.4}% ({}/{})", self.n_correct, self.n_scored);
            }
            None => {
                let _ = writeln!(out, "accuracy: undefined (no scored items)");
            }
        }
        out
    }
}

/// Parse `gesture_id rating` lines. Blank lines and `#` comments are skipped.
pub fn parse_manual(text: &str) -> Result<BTreeMap<String, f64>, EvalError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| EvalError::MalformedManual { line: i + 1, reason: reason.into() };
        let mut fields = line.split_whitespace();
        let (Some(id), Some(rating), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad("expected `gesture_id rating`"));
        };
        let rating: f64 = rating.parse().map_err(|_| bad("rating is not a number"))?;
        if !(RATING_MIN..=RATING_MAX).contains(&rating) {
            return Err(bad("rating outside [1, 7]"));
        }
        if out.insert(id.to_string(), rating).is_some() {
            return Err(bad("duplicate gesture id"));
        }
    }
    Ok(out)
}

/// Score assignments against manual ratings. Unassigned and errored targets
/// are excluded.
pub fn score(
    assignments: &[AssignmentRecord],
    manual: &BTreeMap<String, f64>,
    tolerance: f64,
) -> Result<EvalReport, EvalError> {
    let mut per_item = Vec::with_capacity(assignments.len());
    let (mut n_scored, mut n_correct) = (0, 0);
    for a in assignments {
        let manual_rating =
            *manual.get(&a.gesture_id).ok_or_else(|| EvalError::MissingManualRating(a.gesture_id.clone()))?;
        let auto = match a.outcome {
            OutcomeKind::Assigned => a.rating,
            OutcomeKind::Unassigned | OutcomeKind::Error => None,
        };
        let verdict = match auto {
            None => Verdict::Excluded,
            Some(r) => {
                n_scored += 1;
                if (r - manual_rating).abs() <= tolerance {
                    n_correct += 1;
                    Verdict::Correct
                } else {
                    Verdict::Incorrect
                }
            }
        };
        per_item.push(EvalItem { gesture_id: a.gesture_id.clone(), manual: manual_rating, auto, verdict });
    }
    Ok(EvalReport {
        n_targets: assignments.len(),
        n_unassigned: assignments.len() - n_scored,
        n_scored,
        n_correct,
        accuracy: (n_scored > 0).then(|| n_correct as f64 / n_scored as f64),
        tolerance,
        per_item,
    })
}

//! Cosine similarity and congruency scoring between gesture profiles.
//!
//! The congruency score of two profiles is the sum of three property
//! similarities, each in `[-1, 1]`:
//!
//! - location: cosine of the one-hot encodings of `(start_bucket, end_bucket)`
//! - handshape: mean of the initial and final handshape cosines
//! - movement: cosine of the movement descriptors
//!
//! Two-handed comparisons average each property over the hands both
//! profiles have, so totals stay on the `[-3, 3]` scale.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sublexical::{BucketId, HandProfile, SubLexicalProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimilarityError {
    #[error("vector dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("cosine of a zero vector is undefined")]
    ZeroVector,
    #[error("profiles share no hand")]
    NoSharedHands,
}

/// `u·v / (‖u‖‖v‖)`, clamped to `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, SimilarityError> {
    if u.len() != v.len() {
        return Err(SimilarityError::DimensionMismatch(u.len(), v.len()));
    }
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(SimilarityError::ZeroVector);
    }
    // sqrt of the product (not the product of square roots) makes
    // cosine(v, v) exactly 1.
    Ok((dot / (uu * vv).sqrt()).clamp(-1.0, 1.0))
}

/// Cosine of the one-hot `(start, end)` bucket encodings: matches / 2.
pub fn location_similarity(a: (BucketId, BucketId), b: (BucketId, BucketId)) -> f64 {
    // Each encoding has exactly two ones, so the norms are both √2 and the
    // cosine reduces to the count of agreeing slots over 2.
    let matches = u8::from(a.0 == b.0) + u8::from(a.1 == b.1);
    f64::from(matches) / 2.0
}

pub fn handshape_similarity(a: &HandProfile, b: &HandProfile) -> Result<f64, SimilarityError> {
    let initial = cosine(&a.initial_handshape.vector, &b.initial_handshape.vector)?;
    let last = cosine(&a.final_handshape.vector, &b.final_handshape.vector)?;
    Ok((initial + last) / 2.0)
}

/// Cosine of movement descriptors. Two stationary wrists are identical (1.0);
/// a stationary wrist against a moving one scores 0.0.
pub fn movement_similarity(a: &HandProfile, b: &HandProfile) -> Result<f64, SimilarityError> {
    let (u, v) = (&a.movement.vector, &b.movement.vector);
    if u.len() != v.len() {
        return Err(SimilarityError::DimensionMismatch(u.len(), v.len()));
    }
    match (a.movement.is_zero(), b.movement.is_zero()) {
        (true, true) => Ok(1.0),
        (true, false) | (false, true) => Ok(0.0),
        (false, false) => cosine(u, v),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CongruencyScore {
    pub location_sim: f64,
    pub handshape_sim: f64,
    pub movement_sim: f64,
    pub total: f64,
}

impl CongruencyScore {
    pub fn new(location_sim: f64, handshape_sim: f64, movement_sim: f64) -> Self {
        CongruencyScore {
            location_sim,
            handshape_sim,
            movement_sim,
            total: location_sim + handshape_sim + movement_sim,
        }
    }
}

pub fn congruency(a: &SubLexicalProfile, b: &SubLexicalProfile) -> Result<CongruencyScore, SimilarityError> {
    let mut loc = 0.0;
    let mut hs = 0.0;
    let mut mov = 0.0;
    let mut shared = 0u32;
    for (hand, ha) in a.hands() {
        let Some(hb) = b.hand(hand) else { continue };
        loc += location_similarity((ha.start_bucket, ha.end_bucket), (hb.start_bucket, hb.end_bucket));
        hs += handshape_similarity(ha, hb)?;
        mov += movement_similarity(ha, hb)?;
        shared += 1;
    }
    match shared {
        0 => Err(SimilarityError::NoSharedHands),
        1 => Ok(CongruencyScore::new(loc, hs, mov)),
        n => {
            let n = f64::from(n);
            Ok(CongruencyScore::new(loc / n, hs / n, mov / n))
        }
    }
}

//! Sub-lexical property extraction: location buckets, handshape descriptors
//! and movement descriptors, per hand.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keypoint::{Hand, Landmark, NormalizedSequence, HAND_LANDMARKS};

/// Default number of resampled wrist positions in a movement descriptor.
pub const DEFAULT_RESAMPLE_LEN: usize = 32;

#[derive(Debug, Error, PartialEq)]
pub enum ExtractError {
    #[error("all hand landmarks coincide")]
    DegenerateHand,
    #[error("hand has {0} landmarks, expected 21")]
    BadHandArity(usize),
    #[error("{0} wrist is never observed")]
    NoWristData(Hand),
    #[error("no hand is tracked at both keyframes")]
    NoHands,
    #[error("trajectory has no points")]
    EmptyPath,
    #[error("resample length must be at least 2, got {0}")]
    BadResampleLen(usize),
}

/// Quadrant of the shoulder frame. 0 upper-left, 1 upper-right,
/// 2 lower-left, 3 lower-right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct BucketId(u8);

impl BucketId {
    pub const UPPER_LEFT: BucketId = BucketId(0);
    pub const UPPER_RIGHT: BucketId = BucketId(1);
    pub const LOWER_LEFT: BucketId = BucketId(2);
    pub const LOWER_RIGHT: BucketId = BucketId(3);

    pub fn new(value: u8) -> Option<BucketId> {
        (value < 4).then_some(BucketId(value))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u8> for BucketId {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        BucketId::new(v).ok_or_else(|| format!("bucket {v} outside 0..=3"))
    }
}

impl From<BucketId> for u8 {
    fn from(b: BucketId) -> u8 {
        b.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Native,
    Imported,
}

/// A fixed-length feature vector for one handshape or one movement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub vector: Vec<f64>,
    pub provenance: Provenance,
}

impl Descriptor {
    pub fn native(vector: Vec<f64>) -> Self {
        Descriptor { vector, provenance: Provenance::Native }
    }

    pub fn imported(vector: Vec<f64>) -> Self {
        Descriptor { vector, provenance: Provenance::Imported }
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vector.iter().all(|&v| v == 0.0)
    }
}

pub type HandshapeDescriptor = Descriptor;
pub type MovementDescriptor = Descriptor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandProfile {
    pub start_bucket: BucketId,
    pub end_bucket: BucketId,
    pub initial_handshape: HandshapeDescriptor,
    pub final_handshape: HandshapeDescriptor,
    pub movement: MovementDescriptor,
}

/// Per-hand sub-lexical properties of one gesture. At least one hand is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubLexicalProfile {
    pub left: Option<HandProfile>,
    pub right: Option<HandProfile>,
}

impl SubLexicalProfile {
    pub fn hand(&self, hand: Hand) -> Option<&HandProfile> {
        match hand {
            Hand::Left => self.left.as_ref(),
            Hand::Right => self.right.as_ref(),
        }
    }

    pub fn hand_mut(&mut self, hand: Hand) -> Option<&mut HandProfile> {
        match hand {
            Hand::Left => self.left.as_mut(),
            Hand::Right => self.right.as_mut(),
        }
    }

    pub fn hands(&self) -> impl Iterator<Item = (Hand, &HandProfile)> {
        Hand::BOTH.into_iter().filter_map(|h| self.hand(h).map(|p| (h, p)))
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_none() && self.right.is_none()
    }
}

/// Initial and final handshape frame indices for a clip of `n_frames`.
///
/// The clip is split at `m = n / 2`. The final frame is the lower median of
/// `[m, n)`; the initial frame is the lower median of `[m / 2, m)`, the
/// second half of the first half. A one-frame clip uses frame 0 for both.
pub fn select_keyframes(n_frames: usize) -> (usize, usize) {
    assert!(n_frames >= 1, "select_keyframes needs at least one frame");
    let lower_median = |a: usize, b: usize| a + (b - a - 1) / 2;
    let m = n_frames / 2;
    let final_index = lower_median(m, n_frames);
    let initial_index = if m == 0 { final_index } else { lower_median(m / 2, m) };
    (initial_index, final_index)
}

/// Shoulder-frame quadrant of a point. Points on an axis go right / up.
pub fn bucket_location(x: f64, y: f64) -> BucketId {
    let row = if y >= 0.0 { 0 } else { 2 };
    let col = if x >= 0.0 { 1 } else { 0 };
    BucketId(row + col)
}

/// Scale-normalized pairwise landmark distances, ordered (0,1), (0,2), ..., (19,20).
pub fn hand_descriptor(landmarks: &[Landmark]) -> Result<HandshapeDescriptor, ExtractError> {
    if landmarks.len() != HAND_LANDMARKS {
        return Err(ExtractError::BadHandArity(landmarks.len()));
    }
    let mut dists = Vec::with_capacity(HAND_LANDMARKS * (HAND_LANDMARKS - 1) / 2);
    for (i, a) in landmarks.iter().enumerate() {
        for b in &landmarks[i + 1..] {
            dists.push((a.x - b.x).hypot(a.y - b.y));
        }
    }
    let max = dists.iter().copied().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return Err(ExtractError::DegenerateHand);
    }
    for d in &mut dists {
        *d /= max;
    }
    Ok(Descriptor::native(dists))
}

/// Resample a polyline to `len` points spaced uniformly by arc length,
/// flatten as `x0, y0, x1, y1, ...`, and center each axis on zero.
pub fn trajectory_descriptor(points: &[[f64; 2]], len: usize) -> Result<Vec<f64>, ExtractError> {
    if len < 2 {
        return Err(ExtractError::BadResampleLen(len));
    }
    if points.is_empty() {
        return Err(ExtractError::EmptyPath);
    }

    let mut cumulative = Vec::with_capacity(points.len());
    let mut total = 0.0;
    cumulative.push(0.0);
    for w in points.windows(2) {
        total += (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
        cumulative.push(total);
    }

    if total == 0.0 {
        // A single repeated point centers to exactly zero.
        return Ok(vec![0.0; 2 * len]);
    }
    let mut resampled = Vec::with_capacity(len);
    let mut seg = 0;
    for j in 0..len {
        let s = if j == len - 1 { total } else { total * j as f64 / (len - 1) as f64 };
        // Advance to the segment [cumulative[seg], cumulative[seg + 1]] holding s,
        // skipping zero-length segments from repeated positions.
        while seg + 2 < cumulative.len() && (cumulative[seg + 1] < s || cumulative[seg + 1] == cumulative[seg]) {
            seg += 1;
        }
        let (a, b) = (points[seg], points[seg + 1]);
        let span = cumulative[seg + 1] - cumulative[seg];
        let t = if span > 0.0 { ((s - cumulative[seg]) / span).clamp(0.0, 1.0) } else { 1.0 };
        resampled.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }

    let n = len as f64;
    let mean_x = resampled.iter().map(|p| p[0]).sum::<f64>() / n;
    let mean_y = resampled.iter().map(|p| p[1]).sum::<f64>() / n;
    Ok(resampled.iter().flat_map(|p| [p[0] - mean_x, p[1] - mean_y]).collect())
}

/// Movement descriptor of one wrist over the clip.
pub fn extract_trajectory(
    seq: &NormalizedSequence,
    hand: Hand,
    resample_len: usize,
) -> Result<MovementDescriptor, ExtractError> {
    let points: Vec<[f64; 2]> =
        seq.frames().iter().filter_map(|f| f.point(hand.wrist_point()).map(Landmark::xy)).collect();
    if points.is_empty() {
        return Err(ExtractError::NoWristData(hand));
    }
    trajectory_descriptor(&points, resample_len).map(Descriptor::native)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractConfig {
    pub resample_len: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig { resample_len: DEFAULT_RESAMPLE_LEN }
    }
}

/// Sub-lexical profile of a normalized gesture. A hand is present when its
/// landmark list exists at both keyframes; location is read from that hand's
/// wrist at the same two frames.
pub fn extract_profile(seq: &NormalizedSequence, cfg: &ExtractConfig) -> Result<SubLexicalProfile, ExtractError> {
    let frames = seq.frames();
    let (initial, last) = select_keyframes(frames.len());
    let mut profile = SubLexicalProfile { left: None, right: None };

    for hand in Hand::BOTH {
        let (Some(start_hand), Some(end_hand)) = (frames[initial].hand(hand), frames[last].hand(hand)) else {
            continue;
        };
        let wrist = |i: usize| {
            frames[i]
                .point(hand.wrist_point())
                .map(|w| bucket_location(w.x, w.y))
                .ok_or(ExtractError::NoWristData(hand))
        };
        let hp = HandProfile {
            start_bucket: wrist(initial)?,
            end_bucket: wrist(last)?,
            initial_handshape: hand_descriptor(start_hand)?,
            final_handshape: hand_descriptor(end_hand)?,
            movement: extract_trajectory(seq, hand, cfg.resample_len)?,
        };
        match hand {
            Hand::Left => profile.left = Some(hp),
            Hand::Right => profile.right = Some(hp),
        }
    }

    if profile.is_empty() {
        return Err(ExtractError::NoHands);
    }
    Ok(profile)
}

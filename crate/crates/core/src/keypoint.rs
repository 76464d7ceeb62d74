//! Keypoint sequence ingestion and shoulder-frame normalization.
//!
//! Gesture files are JSON documents produced by an external pose estimator:
//!
//! ```json
//! {
//!   "gesture_id": "g01",
//!   "word": "network",
//!   "fps": 30,
//!   "frames": [
//!     { "pose": { "nose": [0.5, 0.2], "left_shoulder": [0.4, 0.5], ... },
//!       "left_hand": null,
//!       "right_hand": [[0.61, 0.42], ... 21 entries] }
//!   ]
//! }
//! ```
//!
//! A coordinate is `[x, y]`, `[x, y, z]` or `[x, y, z, visibility]`; `z` may
//! be `null` when only visibility is known. Depth and visibility are carried
//! through but never used by extraction, which works in the image plane.
//! No temporal smoothing is applied.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of landmarks in one tracked hand.
pub const HAND_LANDMARKS: usize = 21;

/// Body points every frame must carry.
pub const REQUIRED_POSE_POINTS: [&str; 9] = [
    "nose",
    "left_eye",
    "right_eye",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
];

#[derive(Debug, Error, PartialEq)]
pub enum KeypointError {
    #[error("malformed gesture file: {0}")]
    MalformedInput(String),
    #[error("frame {frame}: required pose point `{name}` is missing")]
    MissingPosePoint { frame: usize, name: &'static str },
    #[error("frame {frame}: {hand} hand has {len} landmarks, expected 21")]
    BadHandArity { frame: usize, hand: Hand, len: usize },
    #[error("gesture has no frames")]
    EmptySequence,
    #[error("frame {frame}: shoulders coincide")]
    DegenerateShoulders { frame: usize },
    #[error("frame {frame}: nose lies on the shoulder line")]
    NoseOnAxis { frame: usize },
}

/// Which side of the signer's body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hand {
    Left,
    Right,
}

impl Hand {
    pub const BOTH: [Hand; 2] = [Hand::Left, Hand::Right];

    pub fn wrist_point(self) -> &'static str {
        match self {
            Hand::Left => "left_wrist",
            Hand::Right => "right_wrist",
        }
    }
}

impl std::fmt::Display for Hand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Hand::Left => "left",
            Hand::Right => "right",
        })
    }
}

/// One tracked point. `x`/`y` are image-normalized before normalization and
/// shoulder-frame coordinates after.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmark {
    pub x: f64,
    pub y: f64,
    pub z: Option<f64>,
    pub visibility: Option<f64>,
}

impl Landmark {
    pub fn new(x: f64, y: f64) -> Self {
        Landmark { x, y, z: None, visibility: None }
    }

    pub fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    fn validate(&self) -> Result<(), String> {
        if !self.x.is_finite() || !self.y.is_finite() {
            return Err("landmark coordinates must be finite".into());
        }
        if let Some(z) = self.z {
            if !z.is_finite() {
                return Err("landmark depth must be finite".into());
            }
        }
        if let Some(v) = self.visibility {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("landmark visibility {v} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

impl Serialize for Landmark {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut v: Vec<Option<f64>> = vec![Some(self.x), Some(self.y)];
        match (self.z, self.visibility) {
            (None, None) => {}
            (z, None) => v.push(z),
            (z, vis) => {
                v.push(z);
                v.push(vis);
            }
        }
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Landmark {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<Option<f64>> = Vec::deserialize(d)?;
        if !(2..=4).contains(&raw.len()) {
            return Err(D::Error::custom(format!("coordinate must have 2 to 4 components, got {}", raw.len())));
        }
        let (Some(x), Some(y)) = (raw[0], raw[1]) else {
            return Err(D::Error::custom("coordinate x and y must be numbers"));
        };
        let lm = Landmark { x, y, z: raw.get(2).copied().flatten(), visibility: raw.get(3).copied().flatten() };
        lm.validate().map_err(D::Error::custom)?;
        Ok(lm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseFrame {
    pub pose: BTreeMap<String, Landmark>,
    #[serde(default)]
    pub left_hand: Option<Vec<Landmark>>,
    #[serde(default)]
    pub right_hand: Option<Vec<Landmark>>,
}

impl PoseFrame {
    pub fn point(&self, name: &str) -> Option<&Landmark> {
        self.pose.get(name)
    }

    pub fn hand(&self, hand: Hand) -> Option<&[Landmark]> {
        match hand {
            Hand::Left => self.left_hand.as_deref(),
            Hand::Right => self.right_hand.as_deref(),
        }
    }

    fn validate(&self, frame: usize) -> Result<(), KeypointError> {
        for name in REQUIRED_POSE_POINTS {
            if !self.pose.contains_key(name) {
                return Err(KeypointError::MissingPosePoint { frame, name });
            }
        }
        for hand in Hand::BOTH {
            if let Some(lms) = self.hand(hand) {
                if lms.len() != HAND_LANDMARKS {
                    return Err(KeypointError::BadHandArity { frame, hand, len: lms.len() });
                }
            }
        }
        Ok(())
    }

    fn map_landmarks(&self, f: impl Fn(&Landmark) -> Landmark) -> PoseFrame {
        PoseFrame {
            pose: self.pose.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
            left_hand: self.left_hand.as_ref().map(|h| h.iter().map(&f).collect()),
            right_hand: self.right_hand.as_ref().map(|h| h.iter().map(&f).collect()),
        }
    }
}

/// A validated gesture recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSequence {
    pub gesture_id: String,
    pub word: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fps: Option<f64>,
    pub frames: Vec<PoseFrame>,
}

impl FrameSequence {
    pub fn validate(&self) -> Result<(), KeypointError> {
        if self.gesture_id.is_empty() {
            return Err(KeypointError::MalformedInput("gesture_id is empty".into()));
        }
        if self.word.is_empty() || self.word.chars().any(|c| c.is_uppercase()) {
            return Err(KeypointError::MalformedInput(format!("word `{}` must be nonempty and lowercase", self.word)));
        }
        if self.frames.is_empty() {
            return Err(KeypointError::EmptySequence);
        }
        for (i, frame) in self.frames.iter().enumerate() {
            frame.validate(i)?;
        }
        Ok(())
    }
}

/// Parse and validate a gesture file.
pub fn parse_sequence(raw: &[u8]) -> Result<FrameSequence, KeypointError> {
    let text = std::str::from_utf8(raw).map_err(|e| KeypointError::MalformedInput(e.to_string()))?;
    let seq: FrameSequence = serde_json::from_str(text).map_err(|e| KeypointError::MalformedInput(e.to_string()))?;
    seq.validate()?;
    Ok(seq)
}

/// Render a sequence in the gesture file format.
pub fn serialize_sequence(seq: &FrameSequence) -> Vec<u8> {
    // FrameSequence holds only strings, finite floats and maps with string keys.
    serde_json::to_vec_pretty(seq).expect("frame sequence serializes")
}

/// A sequence whose coordinates are expressed in the per-frame shoulder frame:
/// origin at the shoulder midpoint, X from left to right shoulder, Y toward
/// the head, one unit per shoulder width.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSequence(FrameSequence);

impl NormalizedSequence {
    pub fn sequence(&self) -> &FrameSequence {
        &self.0
    }

    pub fn frames(&self) -> &[PoseFrame] {
        &self.0.frames
    }

    pub fn into_inner(self) -> FrameSequence {
        self.0
    }
}

pub fn normalize(seq: &FrameSequence) -> Result<NormalizedSequence, KeypointError> {
    let frames = seq.frames.iter().enumerate().map(|(i, f)| normalize_frame(f, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(NormalizedSequence(FrameSequence { frames, ..seq.clone() }))
}

fn normalize_frame(frame: &PoseFrame, index: usize) -> Result<PoseFrame, KeypointError> {
    let get = |name: &'static str| {
        frame.point(name).map(Landmark::xy).ok_or(KeypointError::MissingPosePoint { frame: index, name })
    };
    let left = get("left_shoulder")?;
    let right = get("right_shoulder")?;
    let nose = get("nose")?;

    let origin = [(left[0] + right[0]) / 2.0, (left[1] + right[1]) / 2.0];
    let dx = right[0] - left[0];
    let dy = right[1] - left[1];
    let width = dx.hypot(dy);
    if width == 0.0 {
        return Err(KeypointError::DegenerateShoulders { frame: index });
    }
    let x_axis = [dx / width, dy / width];
    let mut y_axis = [-x_axis[1], x_axis[0]];
    let nose_y = (nose[0] - origin[0]) * y_axis[0] + (nose[1] - origin[1]) * y_axis[1];
    if nose_y == 0.0 {
        return Err(KeypointError::NoseOnAxis { frame: index });
    }
    if nose_y < 0.0 {
        y_axis = [-y_axis[0], -y_axis[1]];
    }

    Ok(frame.map_landmarks(|lm| {
        let px = lm.x - origin[0];
        let py = lm.y - origin[1];
        Landmark { x: (px * x_axis[0] + py * x_axis[1]) / width, y: (px * y_axis[0] + py * y_axis[1]) / width, ..*lm }
    }))
}

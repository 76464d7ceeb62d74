//! The gesture corpus: glosses, sub-lexical profiles and iconicity ratings.
//!
//! On disk a corpus is a JSON array of records sorted by id, each embedding
//! its profile with explicit descriptor vectors. Saving is canonical, so two
//! saves of the same corpus are byte-identical.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keypoint::Hand;
use crate::sublexical::{Descriptor, SubLexicalProfile};

pub const RATING_MIN: f64 = 1.0;
pub const RATING_MAX: f64 = 7.0;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed corpus: {0}")]
    MalformedCorpus(String),
    #[error("duplicate gesture id `{0}`")]
    DuplicateId(String),
    #[error("record `{id}`: rating {rating} outside [1, 7]")]
    RatingOutOfRange { id: String, rating: f64 },
    #[error("record `{id}`: {slot} descriptor has dimension {found}, corpus uses {expected}")]
    DimensionMismatch { id: String, slot: Slot, expected: usize, found: usize },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// One descriptor position within a hand profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Initial,
    Final,
    Movement,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::Initial, Slot::Final, Slot::Movement];

    pub fn parse(s: &str) -> Option<Slot> {
        match s {
            "initial" => Some(Slot::Initial),
            "final" => Some(Slot::Final),
            "movement" => Some(Slot::Movement),
            _ => None,
        }
    }

    /// Initial and final handshapes share one dimension.
    fn dim_class(self) -> usize {
        match self {
            Slot::Initial | Slot::Final => 0,
            Slot::Movement => 1,
        }
    }
}

impl std::fmt::Display for Slot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Slot::Initial => "initial",
            Slot::Final => "final",
            Slot::Movement => "movement",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GestureRecord {
    pub id: String,
    pub word: String,
    pub profile: SubLexicalProfile,
    #[serde(default)]
    pub iconicity_rating: Option<f64>,
    #[serde(default)]
    pub source: String,
}

impl GestureRecord {
    pub fn descriptor(&self, hand: Hand, slot: Slot) -> Option<&Descriptor> {
        let hp = self.profile.hand(hand)?;
        Some(match slot {
            Slot::Initial => &hp.initial_handshape,
            Slot::Final => &hp.final_handshape,
            Slot::Movement => &hp.movement,
        })
    }

    fn descriptor_mut(&mut self, hand: Hand, slot: Slot) -> Option<&mut Descriptor> {
        let hp = self.profile.hand_mut(hand)?;
        Some(match slot {
            Slot::Initial => &mut hp.initial_handshape,
            Slot::Final => &mut hp.final_handshape,
            Slot::Movement => &mut hp.movement,
        })
    }

    /// Field-level checks that do not depend on the rest of the corpus.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |msg: String| CorpusError::MalformedCorpus(format!("record `{}`: {msg}", self.id));
        if self.id.is_empty() {
            return Err(CorpusError::MalformedCorpus("record with empty id".into()));
        }
        if !is_valid_gloss(&self.word) {
            return Err(bad(format!("gloss `{}` must be a single lowercase token", self.word)));
        }
        if let Some(r) = self.iconicity_rating {
            if !(RATING_MIN..=RATING_MAX).contains(&r) {
                return Err(CorpusError::RatingOutOfRange { id: self.id.clone(), rating: r });
            }
        }
        if self.profile.is_empty() {
            return Err(bad("profile has no hand".into()));
        }
        for (_, hp) in self.profile.hands() {
            for d in [&hp.initial_handshape, &hp.final_handshape, &hp.movement] {
                if d.vector.is_empty() || d.vector.iter().any(|v| !v.is_finite()) {
                    return Err(bad("descriptor vectors must be nonempty and finite".into()));
                }
            }
        }
        Ok(())
    }
}

/// Glosses are single lowercase tokens.
pub fn is_valid_gloss(word: &str) -> bool {
    !word.is_empty() && !word.chars().any(|c| c.is_whitespace() || c.is_uppercase())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    records: BTreeMap<String, GestureRecord>,
}

impl Corpus {
    pub fn new() -> Self {
        Corpus::default()
    }

    pub fn from_records(records: impl IntoIterator<Item = GestureRecord>) -> Result<Self, CorpusError> {
        let mut map = BTreeMap::new();
        for r in records {
            r.validate()?;
            if map.contains_key(&r.id) {
                return Err(CorpusError::DuplicateId(r.id));
            }
            map.insert(r.id.clone(), r);
        }
        let c = Corpus { records: map };
        c.check_dimensions()?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&GestureRecord> {
        self.records.get(id)
    }

    /// Records in id order.
    pub fn records(&self) -> impl Iterator<Item = &GestureRecord> {
        self.records.values()
    }

    pub fn records_vec(&self) -> Vec<&GestureRecord> {
        self.records.values().collect()
    }

    /// A new corpus with `record` added.
    pub fn add_record(&self, record: GestureRecord) -> Result<Corpus, CorpusError> {
        if self.records.contains_key(&record.id) {
            return Err(CorpusError::DuplicateId(record.id));
        }
        record.validate()?;
        let mut next = self.clone();
        next.records.insert(record.id.clone(), record);
        next.check_dimensions()?;
        Ok(next)
    }

    fn check_dimensions(&self) -> Result<(), CorpusError> {
        let mut dims: [Option<usize>; 2] = [None, None];
        for r in self.records() {
            for (hand, _) in r.profile.hands() {
                for slot in Slot::ALL {
                    let found = r.descriptor(hand, slot).map_or(0, Descriptor::dim);
                    let expected = *dims[slot.dim_class()].get_or_insert(found);
                    if found != expected {
                        return Err(CorpusError::DimensionMismatch { id: r.id.clone(), slot, expected, found });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let records: Vec<&GestureRecord> = self.records.values().collect();
        let mut s = serde_json::to_string_pretty(&records).expect("corpus serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CorpusError> {
        let records: Vec<GestureRecord> =
            serde_json::from_str(text).map_err(|e| CorpusError::MalformedCorpus(e.to_string()))?;
        Corpus::from_records(records)
    }

    /// Replace descriptors with imported vectors.
    pub fn with_embeddings(&self, embeddings: &[ImportedEmbedding]) -> Result<Corpus, CorpusError> {
        let mut next = self.clone();
        for e in embeddings {
            let rec = next.records.get_mut(&e.gesture_id).ok_or_else(|| {
                CorpusError::MalformedCorpus(format!("embedding for unknown gesture `{}`", e.gesture_id))
            })?;
            let d = rec.descriptor_mut(e.hand, e.slot).ok_or_else(|| {
                CorpusError::MalformedCorpus(format!("gesture `{}` has no {} hand", e.gesture_id, e.hand))
            })?;
            *d = Descriptor::imported(e.vector.clone());
        }
        next.check_dimensions()?;
        Ok(next)
    }
}

pub fn load_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    Corpus::from_json(&text)
}

pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let io = |source| CorpusError::Io { path: path.display().to_string(), source };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(corpus.to_json().as_bytes()).map_err(io)
}

/// One line of an embedding import file:
/// `gesture_id L|R initial|final|movement v1 v2 ... vD`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportedEmbedding {
    pub gesture_id: String,
    pub hand: Hand,
    pub slot: Slot,
    pub vector: Vec<f64>,
}

/// Parse an embedding import file. Every vector of one slot class must
/// share a dimension.
pub fn parse_embeddings(text: &str) -> Result<Vec<ImportedEmbedding>, CorpusError> {
    let mut out = Vec::new();
    let mut dims: [Option<usize>; 2] = [None, None];
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let bad = |msg: &str| CorpusError::MalformedCorpus(format!("embeddings line {line_no}: {msg}"));
        let mut fields = line.split_whitespace();
        let Some(gesture_id) = fields.next() else { continue };
        let hand = match fields.next() {
            Some("L") => Hand::Left,
            Some("R") => Hand::Right,
            _ => return Err(bad("hand must be L or R")),
        };
        let slot = fields.next().and_then(Slot::parse).ok_or_else(|| bad("slot must be initial, final or movement"))?;
        let vector = fields
            .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| bad("vector components must be finite numbers"))?;
        if vector.is_empty() {
            return Err(bad("missing vector"));
        }
        let expected = *dims[slot.dim_class()].get_or_insert(vector.len());
        if vector.len() != expected {
            return Err(bad(&format!("dimension {} differs from {expected}", vector.len())));
        }
        out.push(ImportedEmbedding { gesture_id: gesture_id.to_string(), hand, slot, vector });
    }
    Ok(out)
}

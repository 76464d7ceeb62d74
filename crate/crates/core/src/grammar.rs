//! Gesture expressions over handshape, location and movement symbols.
//!
//! The language, per gesture:
//!
//! ```text
//! GE   -> HAND HAND                      (left, right)
//! HAND -> ∅ | H | H L | H L M H L
//! ```
//!
//! Concrete syntax is two whitespace-separated token lists joined by `|`,
//! e.g. `h1 b0 m2 h3 b1 | empty`. The empty hand is written `empty` or `∅`.
//! A gesture with both hands empty is rejected.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sublexical::{BucketId, Descriptor, SubLexicalProfile};

const EMPTY_KEYWORDS: [&str; 2] = ["empty", "∅"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrammarError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("malformed production: {0}")]
    MalformedProduction(String),
    #[error("both hands are empty")]
    BothHandsEmpty,
    #[error("invalid alphabets: {0}")]
    InvalidAlphabets(String),
    #[error("labeler failed: {0}")]
    Labeler(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SymbolKind {
    Handshape,
    Location,
    Movement,
}

/// The three symbol inventories. Pairwise disjoint and nonempty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alphabets {
    pub handshapes: BTreeSet<String>,
    pub locations: BTreeSet<String>,
    pub movements: BTreeSet<String>,
}

impl Default for Alphabets {
    /// `h0..h15` handshapes, `b0..b3` bucket locations, `m0..m15` movements.
    fn default() -> Self {
        Alphabets {
            handshapes: (0..16).map(|i| format!("h{i}")).collect(),
            locations: (0..4).map(bucket_symbol_raw).collect(),
            movements: (0..16).map(|i| format!("m{i}")).collect(),
        }
    }
}

fn bucket_symbol_raw(i: u8) -> String {
    format!("b{i}")
}

/// Location symbol for a bucket: `b0` through `b3`.
pub fn bucket_symbol(b: BucketId) -> String {
    bucket_symbol_raw(b.value())
}

impl Alphabets {
    pub fn new(
        handshapes: impl IntoIterator<Item = impl Into<String>>,
        locations: impl IntoIterator<Item = impl Into<String>>,
        movements: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, GrammarError> {
        let a = Alphabets {
            handshapes: handshapes.into_iter().map(Into::into).collect(),
            locations: locations.into_iter().map(Into::into).collect(),
            movements: movements.into_iter().map(Into::into).collect(),
        };
        a.validate()?;
        Ok(a)
    }

    pub fn load(path: &Path) -> Result<Self, GrammarError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GrammarError::InvalidAlphabets(format!("{}: {e}", path.display())))?;
        let a: Alphabets = serde_json::from_str(&text).map_err(|e| GrammarError::InvalidAlphabets(e.to_string()))?;
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<(), GrammarError> {
        let sets = [("handshapes", &self.handshapes), ("locations", &self.locations), ("movements", &self.movements)];
        for (name, set) in sets {
            if set.is_empty() {
                return Err(GrammarError::InvalidAlphabets(format!("{name} is empty")));
            }
            for sym in set {
                if sym.is_empty()
                    || sym.contains(char::is_whitespace)
                    || sym.contains('|')
                    || EMPTY_KEYWORDS.contains(&sym.as_str())
                {
                    return Err(GrammarError::InvalidAlphabets(format!("`{sym}` is not a usable symbol")));
                }
            }
        }
        for (i, (na, a)) in sets.iter().enumerate() {
            for (nb, b) in &sets[i + 1..] {
                if let Some(sym) = a.intersection(b).next() {
                    return Err(GrammarError::InvalidAlphabets(format!("`{sym}` is in both {na} and {nb}")));
                }
            }
        }
        Ok(())
    }

    fn kind_of(&self, sym: &str) -> Option<SymbolKind> {
        if self.handshapes.contains(sym) {
            Some(SymbolKind::Handshape)
        } else if self.locations.contains(sym) {
            Some(SymbolKind::Location)
        } else if self.movements.contains(sym) {
            Some(SymbolKind::Movement)
        } else {
            None
        }
    }

    fn check(&self, sym: &str, kind: SymbolKind) -> Result<(), GrammarError> {
        if self.kind_of(sym) == Some(kind) {
            Ok(())
        } else {
            Err(GrammarError::UnknownSymbol(sym.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HandExpression {
    Empty,
    H(String),
    HL(String, String),
    HLMHL { h1: String, l1: String, m: String, h2: String, l2: String },
}

impl HandExpression {
    pub fn is_empty(&self) -> bool {
        matches!(self, HandExpression::Empty)
    }

    fn tokens(&self) -> Vec<&str> {
        match self {
            HandExpression::Empty => vec!["empty"],
            HandExpression::H(h) => vec![h],
            HandExpression::HL(h, l) => vec![h, l],
            HandExpression::HLMHL { h1, l1, m, h2, l2 } => vec![h1, l1, m, h2, l2],
        }
    }

    fn validate(&self, alphabets: &Alphabets) -> Result<(), GrammarError> {
        use SymbolKind::*;
        match self {
            HandExpression::Empty => Ok(()),
            HandExpression::H(h) => alphabets.check(h, Handshape),
            HandExpression::HL(h, l) => {
                alphabets.check(h, Handshape)?;
                alphabets.check(l, Location)
            }
            HandExpression::HLMHL { h1, l1, m, h2, l2 } => {
                alphabets.check(h1, Handshape)?;
                alphabets.check(l1, Location)?;
                alphabets.check(m, Movement)?;
                alphabets.check(h2, Handshape)?;
                alphabets.check(l2, Location)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GestureExpression {
    pub left: HandExpression,
    pub right: HandExpression,
}

impl GestureExpression {
    pub fn new(left: HandExpression, right: HandExpression, alphabets: &Alphabets) -> Result<Self, GrammarError> {
        if left.is_empty() && right.is_empty() {
            return Err(GrammarError::BothHandsEmpty);
        }
        left.validate(alphabets)?;
        right.validate(alphabets)?;
        Ok(GestureExpression { left, right })
    }
}

impl fmt::Display for GestureExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {}", self.left.tokens().join(" "), self.right.tokens().join(" "))
    }
}

fn parse_hand(side: &str, alphabets: &Alphabets) -> Result<HandExpression, GrammarError> {
    let tokens: Vec<&str> = side.split_whitespace().collect();
    if tokens.len() == 1 && EMPTY_KEYWORDS.contains(&tokens[0]) {
        return Ok(HandExpression::Empty);
    }
    let mut kinds = Vec::with_capacity(tokens.len());
    for tok in &tokens {
        if EMPTY_KEYWORDS.contains(tok) {
            return Err(GrammarError::MalformedProduction(format!("`{tok}` must stand alone for its hand")));
        }
        kinds.push(alphabets.kind_of(tok).ok_or_else(|| GrammarError::UnknownSymbol(tok.to_string()))?);
    }
    use SymbolKind::*;
    let owned = |i: usize| tokens[i].to_string();
    match kinds.as_slice() {
        [Handshape] => Ok(HandExpression::H(owned(0))),
        [Handshape, Location] => Ok(HandExpression::HL(owned(0), owned(1))),
        [Handshape, Location, Movement, Handshape, Location] => {
            Ok(HandExpression::HLMHL { h1: owned(0), l1: owned(1), m: owned(2), h2: owned(3), l2: owned(4) })
        }
        _ => Err(GrammarError::MalformedProduction(format!("`{}` matches no hand production", tokens.join(" ")))),
    }
}

pub fn parse_expression(text: &str, alphabets: &Alphabets) -> Result<GestureExpression, GrammarError> {
    let sides: Vec<&str> = text.split('|').collect();
    let [left, right] = sides.as_slice() else {
        return Err(GrammarError::MalformedProduction(format!(
            "expected exactly one `|` separating the hands, found {}",
            sides.len().saturating_sub(1)
        )));
    };
    let left = parse_hand(left, alphabets)?;
    let right = parse_hand(right, alphabets)?;
    if left.is_empty() && right.is_empty() {
        return Err(GrammarError::BothHandsEmpty);
    }
    Ok(GestureExpression { left, right })
}

pub fn render_expression(e: &GestureExpression) -> String {
    e.to_string()
}

/// Maps a descriptor onto a symbol of one alphabet.
pub trait Labeler {
    fn label(&self, descriptor: &Descriptor) -> Result<String, GrammarError>;
}

impl<F> Labeler for F
where
    F: Fn(&Descriptor) -> Result<String, GrammarError>,
{
    fn label(&self, descriptor: &Descriptor) -> Result<String, GrammarError> {
        self(descriptor)
    }
}

/// Labels a descriptor with the symbol of its most cosine-similar prototype.
/// Ties go to the lexicographically smallest symbol.
#[derive(Debug, Clone)]
pub struct PrototypeLabeler {
    prototypes: Vec<(String, Vec<f64>)>,
}

impl PrototypeLabeler {
    pub fn new(mut prototypes: Vec<(String, Vec<f64>)>) -> Self {
        prototypes.sort_by(|a, b| a.0.cmp(&b.0));
        PrototypeLabeler { prototypes }
    }
}

impl Labeler for PrototypeLabeler {
    fn label(&self, descriptor: &Descriptor) -> Result<String, GrammarError> {
        let mut best: Option<(&str, f64)> = None;
        for (sym, proto) in &self.prototypes {
            // Zero vectors follow the movement convention: zero matches zero.
            let sim = match (descriptor.is_zero(), proto.iter().all(|&v| v == 0.0)) {
                (true, true) => 1.0,
                (true, false) | (false, true) => 0.0,
                (false, false) => crate::similarity::cosine(proto, &descriptor.vector)
                    .map_err(|e| GrammarError::Labeler(format!("{sym}: {e}")))?,
            };
            if best.is_none_or(|(_, s)| sim > s) {
                best = Some((sym, sim));
            }
        }
        best.map(|(s, _)| s.to_string()).ok_or_else(|| GrammarError::Labeler("no prototypes".into()))
    }
}

/// Expression of an extracted profile: each present hand becomes
/// `H L M H L` (initial handshape, start bucket, movement, final handshape,
/// end bucket); an absent hand is empty.
pub fn expression_of(
    profile: &SubLexicalProfile,
    alphabets: &Alphabets,
    handshape_labeler: &dyn Labeler,
    movement_labeler: &dyn Labeler,
) -> Result<GestureExpression, GrammarError> {
    let hand_expr = |hp: Option<&crate::sublexical::HandProfile>| -> Result<HandExpression, GrammarError> {
        let Some(hp) = hp else { return Ok(HandExpression::Empty) };
        Ok(HandExpression::HLMHL {
            h1: handshape_labeler.label(&hp.initial_handshape)?,
            l1: bucket_symbol(hp.start_bucket),
            m: movement_labeler.label(&hp.movement)?,
            h2: handshape_labeler.label(&hp.final_handshape)?,
            l2: bucket_symbol(hp.end_bucket),
        })
    };
    GestureExpression::new(hand_expr(profile.left.as_ref())?, hand_expr(profile.right.as_ref())?, alphabets)
}

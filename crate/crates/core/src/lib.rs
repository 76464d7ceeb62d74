//! Automatic iconicity rating assignment for new sign-language gestures.
//!
//! A new gesture is described by three sub-lexical properties per hand
//! (location, handshape, movement) extracted from a keypoint sequence. Its
//! profile is compared against a rated gesture corpus to collect
//! congruency-ranked neighbors in descending score bands ("rounds"). The
//! first neighbor whose English gloss is semantically close enough to the
//! new gesture's gloss donates its iconicity rating, lowered by the round
//! index it was found in.
//!
//! Pipeline modules, bottom-up:
//!
//! - [`keypoint`]: gesture file parsing and shoulder-frame normalization
//! - [`sublexical`]: keyframes, location buckets, handshape and movement descriptors
//! - [`grammar`]: the gesture expression language over handshape/location/movement symbols
//! - [`corpus`]: the rated gesture store
//! - [`similarity`]: cosine similarity and congruency scoring
//! - [`neighbors`]: prefiltered, band-limited neighbor retrieval
//! - [`wordvec`]: GloVe-format word vectors
//! - [`assign`]: rating assignment walk over the rounds
//! - [`eval`]: tolerance-based accuracy against manual ratings

pub mod assign;
pub mod config;
pub mod corpus;
pub mod eval;
pub mod grammar;
pub mod keypoint;
pub mod neighbors;
pub mod par;
pub mod similarity;
pub mod sublexical;
pub mod wordvec;

pub use assign::{assign, assign_batch, AssignConfig, AssignError, AssignmentResult, Target};
pub use corpus::{Corpus, CorpusError, GestureRecord};
pub use eval::{score, EvalReport};
pub use keypoint::{normalize, parse_sequence, FrameSequence, NormalizedSequence};
pub use neighbors::{find_neighbors, rank_all, NeighborList, RoundConfig};
pub use par::Execution;
pub use similarity::{congruency, cosine, CongruencyScore};
pub use sublexical::{extract_profile, HandProfile, SubLexicalProfile};
pub use wordvec::WordVectorTable;

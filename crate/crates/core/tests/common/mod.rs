//! Shared generators and brute-force oracles for the integration suites.
//!
//! The oracles re-derive neighbor retrieval and rating assignment from the
//! written rules with their own arithmetic; they never call the library's
//! scoring, banding or assignment code.

#![allow(dead_code)]

use std::collections::HashMap;

use iconicity::corpus::{Corpus, GestureRecord};
use iconicity::keypoint::Hand;
use iconicity::neighbors::{Band, RoundConfig};
use iconicity::sublexical::{BucketId, Descriptor, HandProfile, SubLexicalProfile};
use rand::seq::SliceRandom;
use rand::Rng;

pub const HS_DIM: usize = 6;
pub const MOV_DIM: usize = 4;

// ---------------------------------------------------------------- generators

pub struct ProfileGen {
    pub handshapes: Vec<Vec<f64>>,
    pub movements: Vec<Vec<f64>>,
    pub allow_negative: bool,
}

impl ProfileGen {
    pub fn new<R: Rng>(rng: &mut R, n_protos: usize, allow_negative: bool) -> Self {
        let lo = if allow_negative { -1.0 } else { 0.0 };
        let handshapes = (0..n_protos).map(|_| (0..HS_DIM).map(|_| rng.gen_range(lo..1.0) + 0.05).collect()).collect();
        let movements = (0..n_protos).map(|_| (0..MOV_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        ProfileGen { handshapes, movements, allow_negative }
    }

    fn noisy<R: Rng>(&self, rng: &mut R, base: &[f64], scale: f64) -> Vec<f64> {
        if rng.gen_bool(0.5) {
            return base.to_vec();
        }
        base.iter()
            .map(|v| {
                let x = v + rng.gen_range(-scale..scale);
                if self.allow_negative {
                    x
                } else {
                    x.abs()
                }
            })
            .collect()
    }

    pub fn hand<R: Rng>(&self, rng: &mut R) -> HandProfile {
        let hs = |rng: &mut R| {
            let p = self.handshapes.choose(rng).unwrap();
            Descriptor::imported(self.noisy(rng, p, 0.15))
        };
        let movement = if rng.gen_bool(0.2) {
            Descriptor::imported(vec![0.0; MOV_DIM])
        } else {
            let p = self.movements.choose(rng).unwrap();
            Descriptor::imported(self.noisy(rng, p, 0.4))
        };
        HandProfile {
            start_bucket: BucketId::new(rng.gen_range(0..4)).unwrap(),
            end_bucket: BucketId::new(rng.gen_range(0..4)).unwrap(),
            initial_handshape: hs(rng),
            final_handshape: hs(rng),
            movement,
        }
    }

    pub fn profile<R: Rng>(&self, rng: &mut R) -> SubLexicalProfile {
        match rng.gen_range(0..10) {
            0..=5 => SubLexicalProfile { left: None, right: Some(self.hand(rng)) },
            6 => SubLexicalProfile { left: Some(self.hand(rng)), right: None },
            _ => SubLexicalProfile { left: Some(self.hand(rng)), right: Some(self.hand(rng)) },
        }
    }
}

pub fn random_rating<R: Rng>(rng: &mut R) -> f64 {
    if rng.gen_bool(0.5) {
        f64::from(rng.gen_range(2..=14u8)) / 2.0
    } else {
        rng.gen_range(1.0..=7.0)
    }
}

pub fn record(id: String, word: String, profile: SubLexicalProfile, rating: Option<f64>) -> GestureRecord {
    GestureRecord { id, word, profile, iconicity_rating: rating, source: "synthetic".into() }
}

/// Random corpus of up to `max` records; some unrated, some duplicated profiles.
pub fn random_corpus<R: Rng>(rng: &mut R, gen: &ProfileGen, max: usize, words: &[String]) -> Corpus {
    let n = rng.gen_range(0..=max);
    let mut records: Vec<GestureRecord> = Vec::with_capacity(n);
    for i in 0..n {
        let profile =
            if i > 0 && rng.gen_bool(0.1) { records[rng.gen_range(0..i)].profile.clone() } else { gen.profile(rng) };
        let rating = if rng.gen_bool(0.1) { None } else { Some(random_rating(rng)) };
        records.push(record(
            format!("g{:03}", rng.gen_range(0..1000) * 1000 + i),
            words.choose(rng).unwrap().clone(),
            profile,
            rating,
        ));
    }
    Corpus::from_records(records).expect("generated corpus is valid")
}

// ------------------------------------------------------------------- oracles

pub fn oracle_cosine(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len());
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let uu: f64 = u.iter().map(|a| a * a).sum();
    let vv: f64 = v.iter().map(|b| b * b).sum();
    assert!(uu > 0.0 && vv > 0.0);
    (dot / (uu * vv).sqrt()).clamp(-1.0, 1.0)
}

fn oracle_hand_scores(a: &HandProfile, b: &HandProfile) -> (f64, f64, f64) {
    let mut same = 0.0;
    if a.start_bucket == b.start_bucket {
        same += 1.0;
    }
    if a.end_bucket == b.end_bucket {
        same += 1.0;
    }
    let loc = same / 2.0;
    let hs = (oracle_cosine(&a.initial_handshape.vector, &b.initial_handshape.vector)
        + oracle_cosine(&a.final_handshape.vector, &b.final_handshape.vector))
        / 2.0;
    let za = a.movement.vector.iter().all(|x| *x == 0.0);
    let zb = b.movement.vector.iter().all(|x| *x == 0.0);
    let mov = if za && zb {
        1.0
    } else if za || zb {
        0.0
    } else {
        oracle_cosine(&a.movement.vector, &b.movement.vector)
    };
    (loc, hs, mov)
}

/// `(location, handshape, movement, total)` or `None` when no hand is shared.
pub fn oracle_congruency(a: &SubLexicalProfile, b: &SubLexicalProfile) -> Option<(f64, f64, f64, f64)> {
    let mut sums = (0.0, 0.0, 0.0);
    let mut n = 0.0;
    for hand in [Hand::Left, Hand::Right] {
        if let (Some(x), Some(y)) = (a.hand(hand), b.hand(hand)) {
            let (l, h, m) = oracle_hand_scores(x, y);
            sums.0 += l;
            sums.1 += h;
            sums.2 += m;
            n += 1.0;
        }
    }
    if n == 0.0 {
        return None;
    }
    let (l, h, m) = if n == 1.0 { sums } else { (sums.0 / n, sums.1 / n, sums.2 / n) };
    Some((l, h, m, l + h + m))
}

fn in_band(total: f64, band: &Band) -> bool {
    if total < band.lower {
        return false;
    }
    match band.upper {
        Some(u) => total < u,
        None => true,
    }
}

/// Exhaustive filter-and-sort: `(record_id, total)` for one round.
pub fn oracle_neighbors(
    target: &SubLexicalProfile,
    corpus: &Corpus,
    round: usize,
    cfg: &RoundConfig,
) -> Vec<(String, f64)> {
    let band = cfg.bands[round];
    let mut hits: Vec<(String, f64)> = Vec::new();
    for r in corpus.records() {
        if r.iconicity_rating.is_none() {
            continue;
        }
        let Some((_, hs, _, total)) = oracle_congruency(target, &r.profile) else { continue };
        if hs >= cfg.handshape_prefilter && in_band(total, &band) {
            hits.push((r.id.clone(), total));
        }
    }
    hits.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    hits
}

pub struct OracleTable(pub HashMap<String, Vec<f64>>);

impl OracleTable {
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        let u = self.0.get(&a.to_lowercase())?;
        let v = self.0.get(&b.to_lowercase())?;
        Some(oracle_cosine(u, v))
    }

    pub fn to_glove(&self) -> String {
        let mut words: Vec<_> = self.0.keys().collect();
        words.sort();
        let mut s = String::new();
        for w in words {
            s.push_str(w);
            for v in &self.0[w] {
                s.push(' ');
                s.push_str(&format!("{v}"));
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Assigned { rating: f64, neighbor_id: String, round: usize, s: f64, total: f64 },
    Unassigned,
}

/// Walk rounds in order, neighbors in rank order, first `S >= tau` wins.
pub fn oracle_assign(
    target: &SubLexicalProfile,
    word: &str,
    corpus: &Corpus,
    table: &OracleTable,
    tau: f64,
    cfg: &RoundConfig,
) -> OracleOutcome {
    for round in 0..cfg.bands.len() {
        for (id, total) in oracle_neighbors(target, corpus, round, cfg) {
            let rec = corpus.get(&id).unwrap();
            let Some(s) = table.similarity(word, &rec.word) else { continue };
            if s >= tau {
                let donated = rec.iconicity_rating.unwrap() - round as f64;
                let rating = if donated < 1.0 { 1.0 } else { donated };
                return OracleOutcome::Assigned { rating, neighbor_id: id, round, s, total };
            }
        }
    }
    OracleOutcome::Unassigned
}

/// Keyframes by literal construction: split the frame indices into halves,
/// take the lower median of the second half, then the lower median of the
/// second half of the first half.
pub fn brute_keyframes(n: usize) -> (usize, usize) {
    let frames: Vec<usize> = (0..n).collect();
    let (first, second) = frames.split_at(n / 2);
    let median = |r: &[usize]| r[(r.len() - 1) / 2];
    let last = median(second);
    if first.is_empty() {
        return (last, last);
    }
    let (_, first_second) = first.split_at(first.len() / 2);
    (median(first_second), last)
}

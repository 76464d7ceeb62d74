//! GloVe text-format word vectors.
//!
//! One entry per line: a token followed by `D` floats, space separated.
//! Tokens are lowercased on load and lookups are case-insensitive. A token
//! repeated later in the file replaces the earlier vector.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use thiserror::Error;

use crate::similarity::{cosine, SimilarityError};

#[derive(Debug, Error)]
pub enum WordVecError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: dimension {found}, expected {expected}")]
    InconsistentDimension { line: usize, expected: usize, found: usize },
    #[error("word vector table is empty")]
    EmptyTable,
    #[error("`{0}` is not in the vocabulary")]
    OutOfVocabulary(String),
    #[error("similarity of `{0}` and `{1}`: {2}")]
    Similarity(String, String, SimilarityError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordVectorTable {
    dimension: usize,
    entries: HashMap<String, Vec<f64>>,
}

impl WordVectorTable {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.entries.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    pub fn from_reader(reader: impl BufRead) -> Result<Self, WordVecError> {
        let mut entries = HashMap::new();
        let mut dimension = None;
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line.map_err(|e| WordVecError::MalformedLine { line: line_no, reason: e.to_string() })?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().unwrap_or_default().to_lowercase();
            let vector = fields
                .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| WordVecError::MalformedLine {
                    line: line_no,
                    reason: "vector components must be finite numbers".into(),
                })?;
            if vector.is_empty() {
                return Err(WordVecError::MalformedLine { line: line_no, reason: "token has no vector".into() });
            }
            let expected = *dimension.get_or_insert(vector.len());
            if vector.len() != expected {
                return Err(WordVecError::InconsistentDimension { line: line_no, expected, found: vector.len() });
            }
            entries.insert(token, vector);
        }
        let dimension = dimension.ok_or(WordVecError::EmptyTable)?;
        Ok(WordVectorTable { dimension, entries })
    }

    pub fn parse(text: &str) -> Result<Self, WordVecError> {
        Self::from_reader(text.as_bytes())
    }

    /// Cosine similarity of two words.
    pub fn word_similarity(&self, w1: &str, w2: &str) -> Result<f64, WordVecError> {
        let a = self.get(w1).ok_or_else(|| WordVecError::OutOfVocabulary(w1.to_string()))?;
        let b = self.get(w2).ok_or_else(|| WordVecError::OutOfVocabulary(w2.to_string()))?;
        cosine(a, b).map_err(|e| WordVecError::Similarity(w1.to_string(), w2.to_string(), e))
    }
}

pub fn load_table(path: &Path) -> Result<WordVectorTable, WordVecError> {
    let f =
        std::fs::File::open(path).map_err(|source| WordVecError::Io { path: path.display().to_string(), source })?;
    WordVectorTable::from_reader(std::io::BufReader::new(f))
}

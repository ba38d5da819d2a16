//! Chunking, embedding and exact cosine top-k retrieval over rendered
//! corpus documents.

mod chunk;
mod embed;
mod index;

pub use chunk::{chunk_text, Chunk, ChunkConfig, DEFAULT_MAX_UNITS, DEFAULT_OVERLAP};
pub use embed::{hash_embed, Embedder, EmbedderSpec, HashEmbedder, RemoteEmbedder, MIN_HASH_DIM};
pub use index::{build_corpus_index, build_index, RetrievalHit, VectorIndex, DEFAULT_K, INDEX_SCHEMA};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("text is empty")]
    EmptyText,
    #[error("invalid chunking: max_units={max_units}, overlap={overlap} (need max_units > 0 and overlap < max_units)")]
    InvalidChunking { max_units: usize, overlap: usize },
    #[error("embedding dimension {0} is too small")]
    InvalidDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cosine similarity is undefined for the zero vector")]
    ZeroVector,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("index is empty")]
    EmptyIndex,
    #[error("unsupported index schema {found:?}, expected {INDEX_SCHEMA:?}")]
    Schema { found: String },
    #[error("malformed index file: {0}")]
    Format(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("remote embedder: {0}")]
    Remote(String),
}

/// A fixed-length vector of finite reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(components: Vec<f64>) -> Self {
        EmbeddingVector(components)
    }

    /// L2-normalises; the zero vector is kept as is.
    pub fn normalized(mut components: Vec<f64>) -> Self {
        let n = l2(&components);
        if n > 0.0 {
            components.iter_mut().for_each(|x| *x /= n);
        }
        EmbeddingVector(components)
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        l2(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, RetrievalError> {
    if a.dim() != b.dim() {
        return Err(RetrievalError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(RetrievalError::ZeroVector);
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

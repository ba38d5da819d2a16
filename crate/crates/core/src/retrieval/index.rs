use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    chunk_text, cosine_similarity, Chunk, ChunkConfig, Embedder, EmbedderSpec, EmbeddingVector, RetrievalError,
};
use crate::corpus::{render_index_document, ProjectRecord};

pub const INDEX_SCHEMA: &str = "protopredict/index-v1";
pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalHit {
    pub chunk: Chunk,
    pub score: f64,
}

/// Exact (linear scan) cosine index.
///
/// Reads take `&self` and writes take `&mut self`; wrap in a `RwLock` to
/// share between threads.
#[derive(Clone)]
pub struct VectorIndex {
    embedder: Arc<dyn Embedder>,
    chunks: Vec<Chunk>,
    vectors: Vec<EmbeddingVector>,
}

impl std::fmt::Debug for VectorIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorIndex")
            .field("embedder", &self.embedder.spec())
            .field("chunks", &self.chunks.len())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    schema: String,
    dim: usize,
    embedder: EmbedderSpec,
    chunks: Vec<Chunk>,
    vectors: Vec<EmbeddingVector>,
}

pub fn build_index(chunks: Vec<Chunk>, embedder: Arc<dyn Embedder>) -> Result<VectorIndex, RetrievalError> {
    let mut index = VectorIndex::empty(embedder);
    index.add_chunks(chunks)?;
    Ok(index)
}

/// Renders, chunks and embeds every record.
pub fn build_corpus_index(
    records: &[ProjectRecord],
    embedder: Arc<dyn Embedder>,
    cfg: ChunkConfig,
) -> Result<VectorIndex, RetrievalError> {
    cfg.validate()?;
    let mut chunks = Vec::new();
    for rec in records {
        chunks.extend(chunk_text(&rec.id, &render_index_document(rec), cfg)?);
    }
    build_index(chunks, embedder)
}

impl VectorIndex {
    pub fn empty(embedder: Arc<dyn Embedder>) -> Self {
        VectorIndex {
            embedder,
            chunks: Vec::new(),
            vectors: Vec::new(),
        }
    }

    pub fn add_chunks(&mut self, chunks: Vec<Chunk>) -> Result<(), RetrievalError> {
        let dim = self.dim();
        let mut vectors = Vec::with_capacity(chunks.len());
        for c in &chunks {
            let v = self.embedder.embed(&c.text)?;
            if v.dim() != dim {
                return Err(RetrievalError::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            vectors.push(v);
        }
        self.chunks.extend(chunks);
        self.vectors.extend(vectors);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.embedder.dim()
    }

    pub fn embedder_spec(&self) -> EmbedderSpec {
        self.embedder.spec()
    }

    pub fn chunks(&self) -> &[Chunk] {
        &self.chunks
    }

    pub fn vectors(&self) -> &[EmbeddingVector] {
        &self.vectors
    }

    pub fn embed_query(&self, text: &str) -> Result<EmbeddingVector, RetrievalError> {
        self.embedder.embed(text)
    }

    /// The `k` best chunks by cosine, highest first; ties go to the smaller
    /// `(doc_id, seq)`. A zero query or stored vector scores 0.
    pub fn query_top_k(&self, query: &str, k: usize) -> Result<Vec<RetrievalHit>, RetrievalError> {
        if k == 0 {
            return Err(RetrievalError::InvalidK);
        }
        if self.is_empty() {
            return Err(RetrievalError::EmptyIndex);
        }
        let q = self.embed_query(query)?;
        let mut scored: Vec<(usize, f64)> = Vec::with_capacity(self.len());
        for (i, v) in self.vectors.iter().enumerate() {
            let s = match cosine_similarity(&q, v) {
                Ok(s) => s,
                Err(RetrievalError::ZeroVector) => 0.0,
                Err(e) => return Err(e),
            };
            scored.push((i, s));
        }
        scored.sort_by(|a, b| {
            b.1.total_cmp(&a.1).then_with(|| {
                let (ca, cb) = (&self.chunks[a.0], &self.chunks[b.0]);
                ca.doc_id.cmp(&cb.doc_id).then(ca.seq.cmp(&cb.seq))
            })
        });
        Ok(scored
            .into_iter()
            .take(k)
            .map(|(i, score)| RetrievalHit {
                chunk: self.chunks[i].clone(),
                score,
            })
            .collect())
    }

    pub fn to_json(&self) -> String {
        let file = IndexFile {
            schema: INDEX_SCHEMA.into(),
            dim: self.dim(),
            embedder: self.embedder.spec(),
            chunks: self.chunks.clone(),
            vectors: self.vectors.clone(),
        };
        serde_json::to_string(&file).expect("index serializes")
    }

    pub fn save(&self, path: &Path) -> Result<(), RetrievalError> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, RetrievalError> {
        let head: serde_json::Value = serde_json::from_str(text).map_err(|e| RetrievalError::Format(e.to_string()))?;
        match head.get("schema").and_then(|s| s.as_str()) {
            Some(INDEX_SCHEMA) => {}
            Some(other) => return Err(RetrievalError::Schema { found: other.into() }),
            None => return Err(RetrievalError::Format("missing schema tag".into())),
        }
        let file: IndexFile = serde_json::from_value(head).map_err(|e| RetrievalError::Format(e.to_string()))?;
        if file.embedder.dim() != file.dim {
            return Err(RetrievalError::Format(format!(
                "embedder dimension {} disagrees with index dimension {}",
                file.embedder.dim(),
                file.dim
            )));
        }
        if file.chunks.len() != file.vectors.len() {
            return Err(RetrievalError::Format(format!(
                "{} chunks but {} vectors",
                file.chunks.len(),
                file.vectors.len()
            )));
        }
        if let Some(bad) = file.vectors.iter().find(|v| v.dim() != file.dim) {
            return Err(RetrievalError::DimensionMismatch {
                expected: file.dim,
                found: bad.dim(),
            });
        }
        let embedder: Arc<dyn Embedder> = Arc::from(file.embedder.build()?);
        Ok(VectorIndex {
            embedder,
            chunks: file.chunks,
            vectors: file.vectors,
        })
    }

    pub fn load(path: &Path) -> Result<Self, RetrievalError> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// Equal when built by the same embedder over identical chunks.
impl PartialEq for VectorIndex {
    fn eq(&self, other: &Self) -> bool {
        self.embedder.spec() == other.embedder.spec() && self.chunks == other.chunks && self.vectors == other.vectors
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::HashEmbedder;

    fn chunk(doc: &str, seq: u32, text: &str) -> Chunk {
        Chunk {
            doc_id: doc.into(),
            seq,
            text: text.into(),
            unit_count: text.split_whitespace().count(),
        }
    }

    fn embedder() -> Arc<dyn Embedder> {
        Arc::new(HashEmbedder::new(64, 11).unwrap())
    }

    #[test]
    fn self_retrieval() {
        let idx = build_index(vec![chunk("a", 0, "solar tracker gears")], embedder()).unwrap();
        let hits = idx.query_top_k("solar tracker gears", 1).unwrap();
        assert_eq!(hits.len(), 1);
        assert!(hits[0].score >= 0.999);
    }

    #[test]
    fn disjoint_vocabularies_rank_exact_match_first() {
        let idx = build_index(
            vec![
                chunk("a", 0, "capacitor diode resistor"),
                chunk("b", 0, "plywood chisel clamp"),
                chunk("c", 0, "yarn needle felt"),
            ],
            embedder(),
        )
        .unwrap();
        let hits = idx.query_top_k("plywood chisel clamp", 3).unwrap();
        assert_eq!(hits[0].chunk.doc_id, "b");
        assert!(hits.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn k_larger_than_index_truncates() {
        let idx = build_index(
            vec![chunk("a", 0, "x y"), chunk("a", 1, "y z"), chunk("b", 0, "z w")],
            embedder(),
        )
        .unwrap();
        assert_eq!(idx.query_top_k("x", 5).unwrap().len(), 3);
    }

    #[test]
    fn ties_break_by_doc_then_seq() {
        let idx = build_index(
            vec![
                chunk("b", 0, "same words"),
                chunk("a", 1, "same words"),
                chunk("a", 0, "same words"),
            ],
            embedder(),
        )
        .unwrap();
        let hits = idx.query_top_k("same words", 3).unwrap();
        let order: Vec<_> = hits.iter().map(|h| (h.chunk.doc_id.as_str(), h.chunk.seq)).collect();
        assert_eq!(order, [("a", 0), ("a", 1), ("b", 0)]);
    }

    #[test]
    fn query_errors() {
        let empty = VectorIndex::empty(embedder());
        assert!(matches!(empty.query_top_k("x", 1), Err(RetrievalError::EmptyIndex)));
        let idx = build_index(vec![chunk("a", 0, "x")], embedder()).unwrap();
        assert!(matches!(idx.query_top_k("x", 0), Err(RetrievalError::InvalidK)));
    }

    #[test]
    fn load_rejects_other_schema() {
        let idx = build_index(vec![chunk("a", 0, "x")], embedder()).unwrap();
        let text = idx.to_json().replace(INDEX_SCHEMA, "protopredict/index-v0");
        assert!(matches!(
            VectorIndex::from_json(&text),
            Err(RetrievalError::Schema { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let idx = build_index(
            vec![chunk("a", 0, "one two three"), chunk("b", 0, "three four")],
            embedder(),
        )
        .unwrap();
        let back = VectorIndex::from_json(&idx.to_json()).unwrap();
        assert_eq!(idx, back);
    }
}

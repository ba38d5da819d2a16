use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EmbeddingVector, RetrievalError};
use crate::seed::splitmix64;

/// Persisted description of how an index's vectors were produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EmbedderSpec {
    Hash {
        dim: usize,
        seed: u64,
    },
    Remote {
        base_url: String,
        model: String,
        dim: usize,
    },
}

impl EmbedderSpec {
    pub fn dim(&self) -> usize {
        match self {
            EmbedderSpec::Hash { dim, .. } | EmbedderSpec::Remote { dim, .. } => *dim,
        }
    }

    /// Instantiates the embedder. Remote embedders read their key from
    /// `PROTOPREDICT_LLM_API_KEY`.
    pub fn build(&self) -> Result<Box<dyn Embedder>, RetrievalError> {
        match self {
            EmbedderSpec::Hash { dim, seed } => Ok(Box::new(HashEmbedder::new(*dim, *seed)?)),
            EmbedderSpec::Remote { base_url, model, dim } => Ok(Box::new(RemoteEmbedder::new(
                base_url.clone(),
                model.clone(),
                *dim,
                std::env::var("PROTOPREDICT_LLM_API_KEY").ok(),
            )?)),
        }
    }
}

pub trait Embedder: Send + Sync {
    fn spec(&self) -> EmbedderSpec;
    fn embed(&self, text: &str) -> Result<EmbeddingVector, RetrievalError>;

    fn dim(&self) -> usize {
        self.spec().dim()
    }
}

pub const MIN_HASH_DIM: usize = 8;

/// Deterministic bag-of-tokens embedding.
///
/// Each token is case-folded, stripped of leading/trailing punctuation, and
/// hashed with FNV-1a over `seed.to_le_bytes() ++ token`; SplitMix64 of that
/// hash picks the bucket and a second SplitMix64 picks the sign. The summed
/// vector is L2-normalised.
pub fn hash_embed(text: &str, dim: usize, seed: u64) -> Result<EmbeddingVector, RetrievalError> {
    if dim < MIN_HASH_DIM {
        return Err(RetrievalError::InvalidDimension(dim));
    }
    let mut v = vec![0.0f64; dim];
    let mut any = false;
    for raw in text.split_whitespace() {
        let token = raw.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
        if token.is_empty() {
            continue;
        }
        any = true;
        let h = fnv1a_seeded(seed, token.as_bytes());
        let bucket = (splitmix64(h) % dim as u64) as usize;
        let sign = if splitmix64(h ^ 0xA5A5_A5A5_A5A5_A5A5) >> 63 == 1 {
            -1.0
        } else {
            1.0
        };
        v[bucket] += sign;
    }
    if !any {
        return Err(RetrievalError::EmptyText);
    }
    Ok(EmbeddingVector::normalized(v))
}

fn fnv1a_seeded(seed: u64, bytes: &[u8]) -> u64 {
    seed.to_le_bytes()
        .iter()
        .chain(bytes)
        .fold(0xcbf2_9ce4_8422_2325_u64, |h, &b| {
            (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
        })
}

#[derive(Debug, Clone)]
pub struct HashEmbedder {
    dim: usize,
    seed: u64,
}

impl HashEmbedder {
    pub fn new(dim: usize, seed: u64) -> Result<Self, RetrievalError> {
        if dim < MIN_HASH_DIM {
            return Err(RetrievalError::InvalidDimension(dim));
        }
        Ok(HashEmbedder { dim, seed })
    }
}

impl Embedder for HashEmbedder {
    fn spec(&self) -> EmbedderSpec {
        EmbedderSpec::Hash {
            dim: self.dim,
            seed: self.seed,
        }
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector, RetrievalError> {
        hash_embed(text, self.dim, self.seed)
    }
}

/// Embeddings from an OpenAI-compatible `/v1/embeddings` endpoint.
pub struct RemoteEmbedder {
    base_url: String,
    model: String,
    dim: usize,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl RemoteEmbedder {
    pub fn new(base_url: String, model: String, dim: usize, api_key: Option<String>) -> Result<Self, RetrievalError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| RetrievalError::Remote(e.to_string()))?;
        Ok(RemoteEmbedder {
            base_url,
            model,
            dim,
            api_key,
            client,
        })
    }
}

impl Embedder for RemoteEmbedder {
    fn spec(&self) -> EmbedderSpec {
        EmbedderSpec::Remote {
            base_url: self.base_url.clone(),
            model: self.model.clone(),
            dim: self.dim,
        }
    }

    fn embed(&self, text: &str) -> Result<EmbeddingVector, RetrievalError> {
        if text.trim().is_empty() {
            return Err(RetrievalError::EmptyText);
        }
        let base = self.base_url.trim_end_matches('/');
        let base = base.strip_suffix("/v1").unwrap_or(base);
        let mut req = self
            .client
            .post(format!("{base}/v1/embeddings"))
            .json(&serde_json::json!({ "model": self.model, "input": [text] }));
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| RetrievalError::Remote(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(RetrievalError::Remote(format!("HTTP {status}")));
        }
        let body: serde_json::Value = resp.json().map_err(|e| RetrievalError::Remote(e.to_string()))?;
        let raw = body
            .pointer("/data/0/embedding")
            .and_then(|v| v.as_array())
            .ok_or_else(|| RetrievalError::Remote("response missing data[0].embedding".into()))?;
        let comps: Option<Vec<f64>> = raw.iter().map(|x| x.as_f64()).collect();
        let comps = comps.ok_or_else(|| RetrievalError::Remote("non-numeric embedding".into()))?;
        if comps.len() != self.dim {
            return Err(RetrievalError::DimensionMismatch {
                expected: self.dim,
                found: comps.len(),
            });
        }
        if comps.iter().any(|x| !x.is_finite()) {
            return Err(RetrievalError::Remote("non-finite embedding component".into()));
        }
        Ok(EmbeddingVector::normalized(comps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_http::{serve_once, Reply};

    #[test]
    fn deterministic_and_order_free() {
        let a = hash_embed("led battery gear", 32, 1).unwrap();
        assert_eq!(a, hash_embed("led battery gear", 32, 1).unwrap());
        assert_eq!(hash_embed("a b", 16, 3).unwrap(), hash_embed("b a", 16, 3).unwrap());
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn case_and_punctuation_folded() {
        assert_eq!(
            hash_embed("Solar, TRACKER.", 16, 0).unwrap(),
            hash_embed("solar tracker", 16, 0).unwrap()
        );
    }

    #[test]
    fn rejects_small_dim_and_empty_text() {
        assert!(matches!(
            hash_embed("x", 4, 0),
            Err(RetrievalError::InvalidDimension(4))
        ));
        assert!(matches!(hash_embed(" ... ", 16, 0), Err(RetrievalError::EmptyText)));
    }

    #[test]
    fn remote_embedder_reads_first_embedding() {
        let url = serve_once(Reply::json(200, r#"{"data":[{"embedding":[3.0,4.0]}]}"#));
        let e = RemoteEmbedder::new(url, "m".into(), 2, Some("k".into())).unwrap();
        let v = e.embed("hello").unwrap();
        assert!((v.components()[0] - 0.6).abs() < 1e-12);
        assert!((v.components()[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn remote_embedder_checks_dimension() {
        let url = serve_once(Reply::json(200, r#"{"data":[{"embedding":[1.0,0.0,0.0]}]}"#));
        let e = RemoteEmbedder::new(url, "m".into(), 2, None).unwrap();
        assert!(matches!(e.embed("x"), Err(RetrievalError::DimensionMismatch { .. })));
    }
}

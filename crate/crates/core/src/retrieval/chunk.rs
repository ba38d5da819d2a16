use serde::{Deserialize, Serialize};

use super::RetrievalError;

pub const DEFAULT_MAX_UNITS: usize = 256;
pub const DEFAULT_OVERLAP: usize = 32;

/// A bounded span of whitespace tokens from one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub doc_id: String,
    pub seq: u32,
    pub text: String,
    pub unit_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkConfig {
    pub max_units: usize,
    pub overlap: usize,
}

impl Default for ChunkConfig {
    fn default() -> Self {
        ChunkConfig {
            max_units: DEFAULT_MAX_UNITS,
            overlap: DEFAULT_OVERLAP,
        }
    }
}

impl ChunkConfig {
    pub fn validate(&self) -> Result<(), RetrievalError> {
        if self.max_units == 0 || self.overlap >= self.max_units {
            return Err(RetrievalError::InvalidChunking {
                max_units: self.max_units,
                overlap: self.overlap,
            });
        }
        Ok(())
    }
}

/// Splits `text` into windows of at most `max_units` whitespace tokens.
///
/// Window `i` starts at token `i * (max_units - overlap)`; windows are emitted
/// while the start lies inside the text, so neighbouring chunks share exactly
/// `overlap` tokens and the final chunk may consist of overlap alone.
pub fn chunk_text(doc_id: &str, text: &str, cfg: ChunkConfig) -> Result<Vec<Chunk>, RetrievalError> {
    cfg.validate()?;
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(RetrievalError::EmptyText);
    }
    let stride = cfg.max_units - cfg.overlap;
    let chunks = (0..)
        .map(|i| i * stride)
        .take_while(|&start| start < tokens.len())
        .enumerate()
        .map(|(seq, start)| {
            let end = (start + cfg.max_units).min(tokens.len());
            Chunk {
                doc_id: doc_id.to_owned(),
                seq: seq as u32,
                text: tokens[start..end].join(" "),
                unit_count: end - start,
            }
        })
        .collect();
    Ok(chunks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(max_units: usize, overlap: usize) -> ChunkConfig {
        ChunkConfig { max_units, overlap }
    }

    fn words(n: usize) -> String {
        (0..n).map(|i| format!("t{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn short_text_is_one_chunk() {
        let c = chunk_text("d", &words(5), cfg(10, 0)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].unit_count, 5);
    }

    #[test]
    fn ten_tokens_four_wide_overlap_one() {
        let c = chunk_text("d", &words(10), cfg(4, 1)).unwrap();
        let spans: Vec<_> = c.iter().map(|c| c.text.as_str()).collect();
        assert_eq!(spans, ["t0 t1 t2 t3", "t3 t4 t5 t6", "t6 t7 t8 t9", "t9"],);
        assert_eq!(c.iter().map(|c| c.seq).collect::<Vec<_>>(), [0, 1, 2, 3]);
    }

    #[test]
    fn overlap_equal_to_max_is_rejected() {
        assert!(matches!(
            chunk_text("d", "a b c", cfg(3, 3)),
            Err(RetrievalError::InvalidChunking { .. })
        ));
        assert!(chunk_text("d", "a", cfg(0, 0)).is_err());
    }

    #[test]
    fn blank_text_is_rejected() {
        assert!(matches!(
            chunk_text("d", "  \n\t", cfg(4, 0)),
            Err(RetrievalError::EmptyText)
        ));
    }

    proptest! {
        #[test]
        fn chunks_reconstruct_token_sequence(n in 1usize..200, max in 1usize..40, ov in 0usize..40) {
            prop_assume!(ov < max);
            let text = words(n);
            let chunks = chunk_text("d", &text, cfg(max, ov)).unwrap();
            let mut rebuilt: Vec<String> = Vec::new();
            for (i, c) in chunks.iter().enumerate() {
                prop_assert!(c.unit_count <= max);
                let toks: Vec<&str> = c.text.split(' ').collect();
                prop_assert_eq!(toks.len(), c.unit_count);
                if i > 0 {
                    let prev: Vec<&str> = chunks[i - 1].text.split(' ').collect();
                    let shared = ov.min(toks.len());
                    prop_assert_eq!(&prev[prev.len() - shared..], &toks[..shared]);
                    rebuilt.extend(toks[shared..].iter().map(|s| s.to_string()));
                } else {
                    rebuilt.extend(toks.iter().map(|s| s.to_string()));
                }
            }
            let expected: Vec<String> = text.split(' ').map(str::to_owned).collect();
            prop_assert_eq!(rebuilt, expected);
        }
    }
}

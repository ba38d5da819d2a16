//! Keyword extraction and lexical similarity scoring of usability answers.
//!
//! Answers are tokenized, stripped of stopwords and lemmatized; each lemma is
//! scored against a case's ground-truth keywords with word-vector cosine, and
//! the three best matches per case represent the group.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, BufReader, Read};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::retrieval::EmbeddingVector;

pub const DEFAULT_BIN_WIDTH: u32 = 10;
pub const TOP_N: usize = 3;

#[derive(Debug, Error)]
pub enum UsabilityError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("ground-truth keyword list is empty")]
    EmptyTruth,
    #[error("bin width {0} does not divide 100")]
    BinWidth(u32),
    #[error("no flagged matches to score")]
    NoFlaggedMatches,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// One token per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaLexicon(HashMap<String, String>);

impl LemmaLexicon {
    /// `inflected<TAB>lemma` per line. A lemma may not itself be mapped to
    /// something else, so lookup is idempotent.
    pub fn parse(text: &str) -> Result<Self, UsabilityError> {
        let mut map = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (form, lemma) = line.split_once('\t').ok_or_else(|| UsabilityError::Parse {
                line: i + 1,
                reason: "expected inflected<TAB>lemma".into(),
            })?;
            let (form, lemma) = (form.trim().to_lowercase(), lemma.trim().to_lowercase());
            if form.is_empty() || lemma.is_empty() || lemma.contains('\t') {
                return Err(UsabilityError::Parse {
                    line: i + 1,
                    reason: "expected two non-empty columns".into(),
                });
            }
            map.insert(form, lemma);
        }
        for (form, lemma) in &map {
            if let Some(next) = map.get(lemma).filter(|n| *n != lemma) {
                return Err(UsabilityError::Parse {
                    line: 0,
                    reason: format!("lemma {lemma:?} of {form:?} is itself mapped to {next:?}"),
                });
            }
        }
        Ok(LemmaLexicon(map))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Lexicon lemma for `token`, or the token itself.
pub fn lemmatize(token: &str, lexicon: &LemmaLexicon) -> String {
    let t = token.to_lowercase();
    lexicon.0.get(&t).cloned().unwrap_or(t)
}

/// Case-folded alphabetic runs of two or more letters, minus stopwords.
pub fn tokenize_and_filter(text: &str, stopwords: &Stopwords) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
        .filter(|t| !stopwords.contains(t))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WordVectorLexicon {
    dim: usize,
    map: HashMap<String, EmbeddingVector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateToken {
    pub token: String,
    pub line: usize,
}

impl WordVectorLexicon {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&EmbeddingVector> {
        self.map.get(&token.to_lowercase())
    }

    pub fn insert(&mut self, token: &str, components: Vec<f64>) -> Result<(), UsabilityError> {
        if self.map.is_empty() && self.dim == 0 {
            self.dim = components.len();
        }
        if components.len() != self.dim {
            return Err(UsabilityError::Parse {
                line: 0,
                reason: format!("{token:?} has {} components, expected {}", components.len(), self.dim),
            });
        }
        self.map
            .insert(token.to_lowercase(), EmbeddingVector::normalized(components));
        Ok(())
    }
}

/// Reads "token c1 … cd" lines. The first line fixes `d`. Duplicates keep the
/// last vector and are reported.
pub fn load_word_vectors<R: Read>(source: R) -> Result<(WordVectorLexicon, Vec<DuplicateToken>), UsabilityError> {
    let mut lex = WordVectorLexicon::default();
    let mut dups = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let mut parts = line.split_whitespace();
        let Some(token) = parts.next() else { continue };
        let comps: Result<Vec<f64>, _> = parts.map(str::parse::<f64>).collect();
        let comps = comps.map_err(|e| UsabilityError::Parse {
            line: lineno,
            reason: e.to_string(),
        })?;
        if comps.is_empty() {
            return Err(UsabilityError::Parse {
                line: lineno,
                reason: "no components".into(),
            });
        }
        if comps.iter().any(|c| !c.is_finite()) {
            return Err(UsabilityError::Parse {
                line: lineno,
                reason: "non-finite component".into(),
            });
        }
        if lex.dim != 0 && comps.len() != lex.dim {
            return Err(UsabilityError::Parse {
                line: lineno,
                reason: format!("{} components, expected {}", comps.len(), lex.dim),
            });
        }
        if lex.get(token).is_some() {
            tracing::warn!(token, line = lineno, "duplicate word vector; keeping the last one");
            dups.push(DuplicateToken {
                token: token.to_lowercase(),
                line: lineno,
            });
        }
        lex.insert(token, comps)?;
    }
    Ok((lex, dups))
}

/// 100 for identical lemmas, else `max(0, cosine) * 100`; 0 when either is
/// out of the lexicon.
pub fn keyword_similarity(a: &str, b: &str, vectors: &WordVectorLexicon) -> f64 {
    let (a, b) = (a.to_lowercase(), b.to_lowercase());
    if a == b {
        return 100.0;
    }
    match (vectors.get(&a), vectors.get(&b)) {
        (Some(va), Some(vb)) => crate::retrieval::cosine_similarity(va, vb)
            .map(|c| (c.max(0.0) * 100.0).min(100.0))
            .unwrap_or(0.0),
        _ => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordMatch {
    pub predicted_lemma: String,
    pub best_truth_lemma: String,
    pub similarity: f64,
    pub frequency: u32,
    /// One of the top three for its case.
    pub flagged: bool,
}

fn rank(a: &KeywordMatch, b: &KeywordMatch) -> std::cmp::Ordering {
    b.similarity
        .total_cmp(&a.similarity)
        .then_with(|| a.predicted_lemma.cmp(&b.predicted_lemma))
}

/// Scores each predicted lemma against its best truth lemma (ties go to the
/// alphabetically first) and flags the top three. Output is ranked by
/// similarity, then lemma.
pub fn match_keywords(
    predicted: &BTreeMap<String, u32>,
    truth: &[String],
    vectors: &WordVectorLexicon,
) -> Result<Vec<KeywordMatch>, UsabilityError> {
    let mut truth: Vec<String> = truth
        .iter()
        .map(|t| t.trim().to_lowercase())
        .filter(|t| !t.is_empty())
        .collect();
    if truth.is_empty() {
        return Err(UsabilityError::EmptyTruth);
    }
    truth.sort();
    truth.dedup();
    let mut out: Vec<KeywordMatch> = predicted
        .iter()
        .filter(|(_, f)| **f > 0)
        .map(|(lemma, &frequency)| {
            let mut best = (truth[0].as_str(), keyword_similarity(lemma, &truth[0], vectors));
            for t in &truth[1..] {
                let s = keyword_similarity(lemma, t, vectors);
                if s > best.1 {
                    best = (t, s);
                }
            }
            KeywordMatch {
                predicted_lemma: lemma.clone(),
                best_truth_lemma: best.0.to_owned(),
                similarity: best.1,
                frequency,
                flagged: false,
            }
        })
        .collect();
    out.sort_by(rank);
    for m in out.iter_mut().take(TOP_N) {
        m.flagged = true;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: u32,
    pub upper: u32,
    pub frequency: u64,
}

/// Frequencies summed into `[0,w), [w,2w), …, [100-w, 100]`.
pub fn similarity_distribution(matches: &[KeywordMatch], bin_width: u32) -> Result<Vec<HistogramBin>, UsabilityError> {
    if bin_width == 0 || 100 % bin_width != 0 {
        return Err(UsabilityError::BinWidth(bin_width));
    }
    let bins = (100 / bin_width) as usize;
    let mut counts = vec![0u64; bins];
    for m in matches {
        let i = ((m.similarity / bin_width as f64).floor().max(0.0) as usize).min(bins - 1);
        counts[i] += m.frequency as u64;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, frequency)| HistogramBin {
            lower: i as u32 * bin_width,
            upper: (i as u32 + 1) * bin_width,
            frequency,
        })
        .collect())
}

/// Frequency-weighted mean similarity of the flagged matches.
pub fn overall_similarity<'a>(matches: impl IntoIterator<Item = &'a KeywordMatch>) -> Result<f64, UsabilityError> {
    let (mut num, mut den) = (0.0, 0u64);
    for m in matches.into_iter().filter(|m| m.flagged) {
        num += m.similarity * m.frequency as f64;
        den += m.frequency as u64;
    }
    if den == 0 {
        return Err(UsabilityError::NoFlaggedMatches);
    }
    Ok(num / den as f64)
}

/// Flagged similarities repeated by frequency, for significance testing.
pub fn flagged_observations<'a>(matches: impl IntoIterator<Item = &'a KeywordMatch>) -> Vec<f64> {
    matches
        .into_iter()
        .filter(|m| m.flagged)
        .flat_map(|m| std::iter::repeat_n(m.similarity, m.frequency as usize))
        .collect()
}

/// Stopwords, lemmas and vectors bundled together.
#[derive(Debug, Clone, Default)]
pub struct UsabilityScorer {
    pub stopwords: Stopwords,
    pub lemmas: LemmaLexicon,
    pub vectors: WordVectorLexicon,
}

impl UsabilityScorer {
    /// Lemma occurrence counts over all answer items.
    pub fn lemma_frequencies<'a>(&self, items: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, u32> {
        let mut freq = BTreeMap::new();
        for item in items {
            for tok in tokenize_and_filter(item, &self.stopwords) {
                *freq.entry(lemmatize(&tok, &self.lemmas)).or_insert(0) += 1;
            }
        }
        freq
    }

    pub fn truth_lemmas(&self, keywords: &[String]) -> Vec<String> {
        keywords.iter().map(|k| lemmatize(k.trim(), &self.lemmas)).collect()
    }

    pub fn score<'a>(
        &self,
        items: impl IntoIterator<Item = &'a str>,
        truth_keywords: &[String],
    ) -> Result<Vec<KeywordMatch>, UsabilityError> {
        match_keywords(
            &self.lemma_frequencies(items),
            &self.truth_lemmas(truth_keywords),
            &self.vectors,
        )
    }
}

//! Data files compiled into the library: the benchmark cases, a sample
//! corpus, the usability lexicons, and fixtures for demos and tests.

use std::sync::Arc;

use crate::corpus::{load_benchmark_cases, parse_project_records, DesignCase, ProjectRecord};
use crate::gateway::MockProfile;
use crate::report::{read_records, Group, GroupSource, MockNoise, Summary, SyntheticCrowd};
use crate::retrieval::{build_corpus_index, ChunkConfig, HashEmbedder, VectorIndex};
use crate::usability::{load_word_vectors, LemmaLexicon, Stopwords, UsabilityScorer};

pub const BENCH_CASES_JSON: &str = include_str!("../data/bench-v1.json");
pub const SAMPLE_CORPUS_JSON: &str = include_str!("../data/corpus-sample.json");
pub const WORD_VECTORS_TXT: &str = include_str!("../data/design-vectors-16d.txt");
pub const LEMMAS_TSV: &str = include_str!("../data/lemmas.tsv");
pub const STOPWORDS_TXT: &str = include_str!("../data/stopwords.txt");
pub const DEMO_PROFILE_JSON: &str = include_str!("../data/demo-profile.json");
pub const PUBLISHED_SUMMARY_JSON: &str = include_str!("../data/published-summary.json");
pub const HUMAN_SYNTHETIC_CSV: &str = include_str!("../data/human-synthetic.csv");

/// Embedding settings of the default index.
pub const DEFAULT_INDEX_DIM: usize = 256;
pub const DEFAULT_INDEX_SEED: u64 = 0;

/// Generic usability words with little relation to any case keyword.
pub const DEFAULT_DISTRACTORS: [&str; 8] = ["design", "device", "user", "feature", "product", "time", "work", "part"];

pub fn bench_cases() -> Vec<DesignCase> {
    load_benchmark_cases(BENCH_CASES_JSON.as_bytes()).expect("bundled cases are valid")
}

pub fn sample_corpus() -> Vec<ProjectRecord> {
    parse_project_records(SAMPLE_CORPUS_JSON.as_bytes(), true)
        .expect("bundled corpus is valid")
        .records
}

/// Hash-embedded index over the sample corpus.
pub fn default_index() -> Arc<VectorIndex> {
    let embedder = Arc::new(HashEmbedder::new(DEFAULT_INDEX_DIM, DEFAULT_INDEX_SEED).expect("valid dimension"));
    Arc::new(build_corpus_index(&sample_corpus(), embedder, ChunkConfig::default()).expect("bundled corpus indexes"))
}

pub fn default_scorer() -> UsabilityScorer {
    let (vectors, _) = load_word_vectors(WORD_VECTORS_TXT.as_bytes()).expect("bundled vectors are valid");
    UsabilityScorer {
        stopwords: Stopwords::parse(STOPWORDS_TXT),
        lemmas: LemmaLexicon::parse(LEMMAS_TSV).expect("bundled lemmas are valid"),
        vectors,
    }
}

pub fn default_distractors() -> Vec<String> {
    DEFAULT_DISTRACTORS.iter().map(|s| s.to_string()).collect()
}

pub fn demo_profile() -> MockProfile {
    MockProfile::from_json(DEMO_PROFILE_JSON).expect("bundled profile is valid")
}

/// Headline AI and human numbers as published, for rendering checks.
pub fn published_summary() -> Summary {
    Summary::from_json(PUBLISHED_SUMMARY_JSON).expect("bundled summary is valid")
}

/// Mock noise of the demo benchmark groups.
pub const DEMO_GPT_NOISE: f64 = 0.45;
pub const DEMO_GPT_RAG_NOISE: f64 = 0.10;

/// GPT and GPT-RAG mocks against the bundled synthetic human answers.
pub fn demo_sources() -> Vec<GroupSource> {
    let human = read_records(HUMAN_SYNTHETIC_CSV.as_bytes()).expect("bundled records are valid");
    vec![
        GroupSource::mock(Group::Gpt, MockNoise::new(DEMO_GPT_NOISE)),
        GroupSource::mock(Group::GptRag, MockNoise::new(DEMO_GPT_RAG_NOISE)),
        GroupSource::recorded(Group::Human, "bundled:human-synthetic.csv", human),
    ]
}

/// Settings that generate the bundled synthetic human file.
pub fn synthetic_crowd() -> SyntheticCrowd {
    SyntheticCrowd {
        respondents: 30,
        noise_sd: 1.0,
        keyword_fidelity: 0.9,
        distractors: default_distractors(),
        seed: 20240607,
    }
}

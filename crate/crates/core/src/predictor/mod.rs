//! Single and repeated prediction runs and their aggregation.

mod parse;

pub use parse::{
    parse_cost, parse_improvement_range, parse_performance, parse_usability, ImprovementRange, Quantity,
    UsabilityAnswer,
};

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Money;
use crate::gateway::{
    assemble_costar_prompt, CallMeta, CompletionParams, DesignBrief, EvidenceItem, Gateway, GatewayError,
    ImageAttachment, Task, DEFAULT_MAX_OUTPUT_UNITS,
};
use crate::retrieval::{RetrievalError, VectorIndex, DEFAULT_K};
use crate::seed::derive_call_seed;
use crate::statlab;

pub const DEFAULT_PARALLELISM: usize = 8;

#[derive(Debug, Error)]
pub enum PredictError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("retrieval: {0}")]
    Retrieval(#[from] RetrievalError),
    #[error("retrieval is enabled but no index was supplied")]
    NoIndex,
    #[error("n must be at least 1")]
    InvalidN,
    #[error("parallelism must be at least 1")]
    InvalidParallelism,
    #[error("no parseable samples among {n}")]
    NoParseableSamples { n: usize },
}

impl PredictError {
    pub fn is_backend(&self) -> bool {
        match self {
            PredictError::Gateway(e) => e.is_backend(),
            PredictError::Retrieval(RetrievalError::Remote(_)) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSample {
    /// Call index within its run.
    pub index: u32,
    pub task: Task,
    pub raw_text: String,
    pub cost: Option<Money>,
    pub performance: Option<Quantity>,
    pub positives: Vec<String>,
    pub issues: Vec<String>,
    pub improvement: Option<ImprovementRange>,
    pub parseable: bool,
    pub meta: CallMeta,
}

impl PredictionSample {
    /// Parses `raw_text` for `task`; the text is kept verbatim.
    pub fn from_text(index: u32, task: Task, raw_text: String, unit: Option<&str>, meta: CallMeta) -> Self {
        let mut s = PredictionSample {
            index,
            task,
            raw_text,
            cost: None,
            performance: None,
            positives: Vec::new(),
            issues: Vec::new(),
            improvement: None,
            parseable: false,
            meta,
        };
        match task {
            Task::Cost => {
                s.cost = parse_cost(&s.raw_text);
                s.parseable = s.cost.is_some();
            }
            Task::Performance => {
                s.performance = unit.and_then(|u| parse_performance(&s.raw_text, u));
                s.parseable = s.performance.is_some();
            }
            Task::Usability => {
                let u = parse_usability(&s.raw_text);
                s.positives = u.positives;
                s.issues = u.issues;
                s.parseable = u.parseable;
            }
            Task::Refine => {
                s.improvement = parse_improvement_range(&s.raw_text);
                s.parseable = !s.raw_text.trim().is_empty();
            }
        }
        s
    }

    /// The parsed numeric value for cost or performance samples.
    pub fn value(&self) -> Option<f64> {
        match self.task {
            Task::Cost => self.cost.map(Money::dollars),
            Task::Performance => self.performance.as_ref().map(|q| q.value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregatedPrediction {
    pub task: Task,
    pub n: usize,
    pub samples: Vec<PredictionSample>,
    pub mean_cost: Option<f64>,
    pub sd_cost: Option<f64>,
    pub mean_performance: Option<f64>,
    pub sd_performance: Option<f64>,
    pub unit: Option<String>,
    pub unparseable_count: usize,
    pub evidence: Vec<EvidenceItem>,
}

impl AggregatedPrediction {
    pub fn parseable_count(&self) -> usize {
        self.n - self.unparseable_count
    }

    pub fn mean(&self) -> Option<f64> {
        self.mean_cost.or(self.mean_performance)
    }

    pub fn sd(&self) -> Option<f64> {
        self.sd_cost.or(self.sd_performance)
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().filter_map(PredictionSample::value).collect()
    }
}

/// Orders samples by call index and summarises the parseable ones.
pub fn aggregate(
    task: Task,
    mut samples: Vec<PredictionSample>,
    unit: Option<String>,
    evidence: Vec<EvidenceItem>,
) -> Result<AggregatedPrediction, PredictError> {
    if samples.is_empty() {
        return Err(PredictError::InvalidN);
    }
    samples.sort_by_key(|s| s.index);
    let n = samples.len();
    let unparseable_count = samples.iter().filter(|s| !s.parseable).count();
    if unparseable_count == n {
        return Err(PredictError::NoParseableSamples { n });
    }
    let values: Vec<f64> = samples.iter().filter_map(PredictionSample::value).collect();
    let (mean, sd) = if values.is_empty() {
        (None, None)
    } else {
        (statlab::mean(&values).ok(), statlab::sample_sd(&values).ok())
    };
    let (mean_cost, sd_cost, mean_performance, sd_performance) = match task {
        Task::Cost => (mean, sd, None, None),
        Task::Performance => (None, None, mean, sd),
        _ => (None, None, None, None),
    };
    Ok(AggregatedPrediction {
        task,
        n,
        samples,
        mean_cost,
        sd_cost,
        mean_performance,
        sd_performance,
        unit: if task == Task::Performance { unit } else { None },
        unparseable_count,
        evidence,
    })
}

/// Inputs shared by every call of one batch.
struct Job<'a> {
    brief: &'a DesignBrief,
    task: Task,
    unit: Option<&'a str>,
    evidence: Vec<EvidenceItem>,
    image: Option<ImageAttachment>,
}

/// Retrieval, prompting and completion for one backend.
#[derive(Debug, Clone)]
pub struct Predictor {
    gateway: Gateway,
    index: Option<Arc<VectorIndex>>,
    pub k: usize,
    pub retrieval: bool,
    /// `None` picks 0 for single runs and 1.0 for repeated runs.
    pub temperature: Option<f64>,
    pub max_output_units: u32,
}

impl Predictor {
    pub fn new(gateway: Gateway) -> Self {
        Predictor {
            gateway,
            index: None,
            k: DEFAULT_K,
            retrieval: true,
            temperature: None,
            max_output_units: DEFAULT_MAX_OUTPUT_UNITS,
        }
    }

    pub fn with_index(mut self, index: Arc<VectorIndex>) -> Self {
        self.index = Some(index);
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_retrieval(mut self, on: bool) -> Self {
        self.retrieval = on;
        self
    }

    pub fn gateway(&self) -> &Gateway {
        &self.gateway
    }

    pub fn evidence(&self, brief: &DesignBrief) -> Result<Vec<EvidenceItem>, PredictError> {
        if !self.retrieval {
            return Ok(Vec::new());
        }
        let index = self.index.as_ref().ok_or(PredictError::NoIndex)?;
        let hits = index.query_top_k(&brief.query_text(), self.k)?;
        Ok(hits.iter().map(EvidenceItem::from).collect())
    }

    fn params(&self, n: usize, seed: u64) -> CompletionParams {
        CompletionParams {
            temperature: self.temperature.unwrap_or(if n > 1 { 1.0 } else { 0.0 }),
            seed: Some(seed),
            max_output_units: self.max_output_units,
        }
    }

    fn call(&self, job: &Job<'_>, index: u32, params: &CompletionParams) -> Result<PredictionSample, PredictError> {
        let bundle = assemble_costar_prompt(job.brief, &job.evidence, job.task, job.unit, job.image.clone())?;
        let c = self.gateway.complete(&bundle, params)?;
        Ok(PredictionSample::from_text(index, job.task, c.text, job.unit, c.meta))
    }

    fn prepare<'a>(&self, brief: &'a DesignBrief, task: Task, unit: Option<&'a str>) -> Result<Job<'a>, PredictError> {
        brief.validate()?;
        if task == Task::Performance && unit.is_none_or(|u| u.trim().is_empty()) {
            return Err(GatewayError::MissingUnit.into());
        }
        let image = brief.image_ref.as_deref().map(ImageAttachment::from_ref).transpose()?;
        Ok(Job {
            brief,
            task,
            unit,
            evidence: self.evidence(brief)?,
            image,
        })
    }

    /// One completion with `seed` passed through to the backend.
    pub fn predict_once(
        &self,
        brief: &DesignBrief,
        task: Task,
        unit: Option<&str>,
        seed: u64,
    ) -> Result<PredictionSample, PredictError> {
        let job = self.prepare(brief, task, unit)?;
        self.call(&job, 0, &self.params(1, seed))
    }

    /// `n` completions with per-call seeds `derive_call_seed(seed, i)`, run on
    /// at most `parallelism` threads.
    pub fn predict_many(
        &self,
        brief: &DesignBrief,
        task: Task,
        unit: Option<&str>,
        n: usize,
        parallelism: usize,
        seed: u64,
    ) -> Result<AggregatedPrediction, PredictError> {
        let (samples, evidence) = self.sample_many(brief, task, unit, n, parallelism, seed)?;
        aggregate(task, samples, unit.map(str::to_owned), evidence)
    }

    /// The raw samples behind `predict_many`, in index order, parseable or not.
    pub fn sample_many(
        &self,
        brief: &DesignBrief,
        task: Task,
        unit: Option<&str>,
        n: usize,
        parallelism: usize,
        seed: u64,
    ) -> Result<(Vec<PredictionSample>, Vec<EvidenceItem>), PredictError> {
        if n == 0 {
            return Err(PredictError::InvalidN);
        }
        if parallelism == 0 {
            return Err(PredictError::InvalidParallelism);
        }
        let job = self.prepare(brief, task, unit)?;
        let next = AtomicUsize::new(0);
        let results: Mutex<Vec<Option<Result<PredictionSample, PredictError>>>> =
            Mutex::new((0..n).map(|_| None).collect());
        std::thread::scope(|scope| {
            for _ in 0..parallelism.min(n) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= n {
                        break;
                    }
                    let params = self.params(n, derive_call_seed(seed, i as u64));
                    let r = self.call(&job, i as u32, &params);
                    let failed = r.is_err();
                    results.lock().unwrap_or_else(|p| p.into_inner())[i] = Some(r);
                    if failed {
                        next.store(n, Ordering::Relaxed);
                    }
                });
            }
        });
        let mut samples = Vec::with_capacity(n);
        for r in results.into_inner().unwrap_or_else(|p| p.into_inner()) {
            match r {
                Some(Ok(s)) => samples.push(s),
                Some(Err(e)) => return Err(e),
                None => {}
            }
        }
        Ok((samples, job.evidence))
    }
}

//! Benchmark sources and the benchmark run itself.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    AccuracyPair, AnovaEntry, BenchmarkReport, CaseReport, CaseStats, CaseUsability, Group, GroupMetricStats,
    GroupReport, GroupUsability, Manifest, Metric, MetricCell, PredictionRecord, QueryMode, ReportError, SampleRecord,
    ScorePair, SourceInfo, Summary, TTestEntry, TestOutcome, UsabilitySection, REPORT_SCHEMA,
};
use crate::assets;
use crate::corpus::DesignCase;
use crate::gateway::{
    DesignBrief, Gateway, MockProfile, NumericTarget, RemoteBackend, RemoteConfig, Task, UsabilityProfile,
};
use crate::predictor::{PredictionSample, Predictor, DEFAULT_PARALLELISM};
use crate::retrieval::{VectorIndex, DEFAULT_K};
use crate::seed;
use crate::statlab::{self, StatError};
use crate::usability::{flagged_observations, overall_similarity, similarity_distribution, UsabilityScorer};

pub const SOURCES_SCHEMA: &str = "protopredict/sources-v1";

fn default_k() -> usize {
    DEFAULT_K
}

fn yes() -> bool {
    true
}

fn default_usability_fidelity() -> f64 {
    0.7
}

/// Relative noise of a mock backend around each case's ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockNoise {
    pub noise_sd: f64,
    /// Defaults to `noise_sd`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub performance_noise_sd: Option<f64>,
    #[serde(default = "default_usability_fidelity")]
    pub usability_fidelity: f64,
    /// Defaults to the bundled generic words.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distractors: Option<Vec<String>>,
}

impl MockNoise {
    pub fn new(noise_sd: f64) -> Self {
        MockNoise {
            noise_sd,
            performance_noise_sd: None,
            usability_fidelity: default_usability_fidelity(),
            distractors: None,
        }
    }

    /// Mock profile centred on `case`'s ground truth.
    pub fn profile_for(&self, case: &DesignCase) -> MockProfile {
        let usability = (!case.ground_truth_keywords.is_empty()).then(|| UsabilityProfile {
            pool: case.ground_truth_keywords.clone(),
            distractors: self.distractors.clone().unwrap_or_else(assets::default_distractors),
            fidelity: self.usability_fidelity,
        });
        MockProfile {
            cost: Some(NumericTarget {
                target: case.ground_truth_cost.dollars(),
                noise_sd: self.noise_sd,
            }),
            performance: Some(NumericTarget {
                target: case.ground_truth_performance.value,
                noise_sd: self.performance_noise_sd.unwrap_or(self.noise_sd),
            }),
            usability,
            ..MockProfile::default()
        }
    }

    fn validate(&self) -> Result<(), String> {
        let sds = [Some(self.noise_sd), self.performance_noise_sd];
        if sds.iter().flatten().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err("noise_sd must be finite and >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.usability_fidelity) {
            return Err("usability_fidelity must lie in [0, 1]".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackendSpec {
    Mock(MockNoise),
    /// OpenAI-compatible endpoint configured from the environment.
    Remote,
}

/// One entry of a sources file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SourceSpec {
    Live {
        group: Group,
        backend: BackendSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        index: Option<String>,
        #[serde(default = "default_k")]
        k: usize,
        #[serde(default = "yes")]
        usability: bool,
    },
    Recorded {
        group: Group,
        path: String,
    },
}

impl SourceSpec {
    pub fn group(&self) -> Group {
        match self {
            SourceSpec::Live { group, .. } | SourceSpec::Recorded { group, .. } => *group,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourcesFile {
    pub schema: String,
    pub sources: Vec<SourceSpec>,
}

#[derive(Debug, Clone)]
pub enum LiveBackend {
    Mock(MockNoise),
    Gateway(Gateway),
}

#[derive(Debug, Clone)]
pub struct LiveSource {
    pub group: Group,
    pub backend: LiveBackend,
    pub index: Option<Arc<VectorIndex>>,
    /// How the index was named in the sources file, if at all.
    pub index_path: Option<String>,
    pub k: usize,
    pub usability: bool,
}

#[derive(Debug, Clone)]
pub enum GroupSource {
    Live(LiveSource),
    Recorded {
        group: Group,
        path: String,
        records: Vec<PredictionRecord>,
    },
}

impl GroupSource {
    /// Live mock source; `gpt_rag` retrieves from the bundled sample corpus.
    pub fn mock(group: Group, noise: MockNoise) -> Self {
        GroupSource::Live(LiveSource {
            group,
            backend: LiveBackend::Mock(noise),
            index: group.uses_retrieval().then(assets::default_index),
            index_path: None,
            k: DEFAULT_K,
            usability: true,
        })
    }

    pub fn recorded(group: Group, path: impl Into<String>, records: Vec<PredictionRecord>) -> Self {
        GroupSource::Recorded {
            group,
            path: path.into(),
            records,
        }
    }

    pub fn group(&self) -> Group {
        match self {
            GroupSource::Live(l) => l.group,
            GroupSource::Recorded { group, .. } => *group,
        }
    }

    fn info(&self) -> SourceInfo {
        match self {
            GroupSource::Live(l) => {
                let (backend, backend_id) = match &l.backend {
                    LiveBackend::Mock(m) => (BackendSpec::Mock(m.clone()), "mock".to_string()),
                    LiveBackend::Gateway(g) => (BackendSpec::Remote, g.backend_id()),
                };
                SourceInfo {
                    group: l.group,
                    spec: SourceSpec::Live {
                        group: l.group,
                        backend,
                        index: l.index_path.clone(),
                        k: l.k,
                        usability: l.usability,
                    },
                    backend_id: Some(backend_id),
                }
            }
            GroupSource::Recorded { group, path, .. } => SourceInfo {
                group: *group,
                spec: SourceSpec::Recorded {
                    group: *group,
                    path: path.clone(),
                },
                backend_id: None,
            },
        }
    }
}

/// Parses a sources document; relative paths resolve against `base_dir`.
pub fn parse_sources(text: &str, base_dir: &Path) -> Result<Vec<GroupSource>, ReportError> {
    let file: SourcesFile = serde_json::from_str(text).map_err(|e| ReportError::Sources(e.to_string()))?;
    if file.schema != SOURCES_SCHEMA {
        return Err(ReportError::Sources(format!(
            "unsupported schema {:?}, expected {SOURCES_SCHEMA:?}",
            file.schema
        )));
    }
    let mut seen = BTreeSet::new();
    let mut default_index: Option<Arc<VectorIndex>> = None;
    let mut out = Vec::new();
    for spec in file.sources {
        let group = spec.group();
        if !seen.insert(group) {
            return Err(ReportError::Sources(format!("group {group} is listed twice")));
        }
        match spec {
            SourceSpec::Live {
                backend,
                index,
                k,
                usability,
                ..
            } => {
                if group == Group::Human {
                    return Err(ReportError::Sources("the human group must be a recorded source".into()));
                }
                if k == 0 {
                    return Err(ReportError::Sources(format!("group {group}: k must be at least 1")));
                }
                let backend = match backend {
                    BackendSpec::Mock(m) => {
                        m.validate()
                            .map_err(|e| ReportError::Sources(format!("group {group}: {e}")))?;
                        LiveBackend::Mock(m)
                    }
                    BackendSpec::Remote => {
                        let cfg = RemoteConfig::from_env().map_err(|e| ReportError::Sources(e.to_string()))?;
                        let backend = RemoteBackend::new(cfg).map_err(|e| ReportError::Sources(e.to_string()))?;
                        LiveBackend::Gateway(Gateway::new(Arc::new(backend)))
                    }
                };
                let loaded = match (&index, group.uses_retrieval()) {
                    (Some(p), true) => {
                        Some(Arc::new(VectorIndex::load(&base_dir.join(p)).map_err(|e| {
                            ReportError::Sources(format!("group {group}: index {p}: {e}"))
                        })?))
                    }
                    (None, true) => Some(default_index.get_or_insert_with(assets::default_index).clone()),
                    (_, false) => None,
                };
                out.push(GroupSource::Live(LiveSource {
                    group,
                    backend,
                    index: loaded,
                    index_path: index,
                    k,
                    usability,
                }));
            }
            SourceSpec::Recorded { path, .. } => {
                let full = base_dir.join(&path);
                let f = std::fs::File::open(&full)
                    .map_err(|e| ReportError::Sources(format!("group {group}: {}: {e}", full.display())))?;
                let records: Vec<_> = super::read_records(f)?
                    .into_iter()
                    .filter(|r| r.group == group)
                    .collect();
                out.push(GroupSource::Recorded { group, path, records });
            }
        }
    }
    if out.is_empty() {
        return Err(ReportError::Sources("no sources listed".into()));
    }
    Ok(out)
}

pub fn load_sources(path: &Path) -> Result<Vec<GroupSource>, ReportError> {
    let text = std::fs::read_to_string(path).map_err(|e| ReportError::Sources(format!("{}: {e}", path.display())))?;
    parse_sources(&text, path.parent().unwrap_or(Path::new(".")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Samples per (group, case, task) for live sources.
    pub n: usize,
    pub seed: u64,
    pub band_pct: f64,
    pub bin_width: u32,
    pub parallelism: usize,
    /// Group compared with humans for cost and performance in the summary.
    pub summary_ai_group: Group,
    /// Group compared with humans for usability.
    pub usability_ai_group: Group,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            n: 30,
            seed: 0,
            band_pct: 50.0,
            bin_width: crate::usability::DEFAULT_BIN_WIDTH,
            parallelism: DEFAULT_PARALLELISM,
            summary_ai_group: Group::Gpt,
            usability_ai_group: Group::GptRag,
        }
    }
}

/// Seed for one (group, case, task) batch of live samples.
pub fn batch_seed(run_seed: u64, group: Group, case_id: u32, task: Task) -> u64 {
    seed::derive_seed(
        run_seed,
        &[seed::label(group.as_str()), case_id as u64, seed::label(task.as_str())],
    )
}

struct GroupRun {
    cases: Vec<CaseReport>,
    usability: Option<Vec<CaseUsability>>,
}

pub fn run_benchmark(
    cases: &[DesignCase],
    sources: &[GroupSource],
    cfg: &BenchConfig,
    scorer: &UsabilityScorer,
) -> Result<BenchmarkReport, ReportError> {
    if cases.is_empty() {
        return Err(ReportError::NoCases);
    }
    if cfg.n == 0 {
        return Err(ReportError::InvalidN);
    }
    let started_at = chrono::Utc::now().to_rfc3339();
    let mut sources: Vec<&GroupSource> = sources.iter().collect();
    sources.sort_by_key(|s| s.group());
    if sources.windows(2).any(|w| w[0].group() == w[1].group()) {
        return Err(ReportError::Sources("a group is listed twice".into()));
    }
    if sources
        .iter()
        .any(|s| matches!(s, GroupSource::Live(l) if l.group == Group::Human))
    {
        return Err(ReportError::Sources("the human group must be a recorded source".into()));
    }

    let mut groups = Vec::new();
    let mut usability_groups = Vec::new();
    for src in &sources {
        let run = match src {
            GroupSource::Live(l) => run_live(cases, l, cfg, scorer)?,
            GroupSource::Recorded { group, records, .. } => run_recorded(cases, *group, records, cfg, scorer)?,
        };
        let group = src.group();
        let table = Metric::ALL
            .iter()
            .map(|m| GroupMetricStats::compute(*m, &run.cases))
            .collect();
        groups.push(GroupReport {
            group,
            cases: run.cases,
            table,
        });
        if let Some(u) = run.usability {
            usability_groups.push(group_usability(group, u, cfg.bin_width)?);
        }
    }

    let anova = anova_entries(&groups);
    let usability = (!usability_groups.is_empty()).then(|| {
        let t_test = t_test_entry(&usability_groups, cfg.usability_ai_group);
        UsabilitySection {
            bin_width: cfg.bin_width,
            groups: usability_groups,
            t_test,
        }
    });
    let summary = summarize(&groups, usability.as_ref(), cfg);
    let infos: Vec<SourceInfo> = sources.iter().map(|s| s.info()).collect();
    let case_ids: Vec<u32> = cases.iter().map(|c| c.case_id).collect();
    let manifest = Manifest {
        run_id: run_id(cfg, &case_ids, &infos),
        seed: cfg.seed,
        n: cfg.n,
        band_pct: cfg.band_pct,
        case_ids,
        sources: infos,
        generator: concat!("protopredict ", env!("CARGO_PKG_VERSION")).into(),
        started_at: Some(started_at),
        finished_at: Some(chrono::Utc::now().to_rfc3339()),
    };
    Ok(BenchmarkReport {
        schema: REPORT_SCHEMA.into(),
        manifest,
        groups,
        anova,
        usability,
        summary,
    })
}

fn run_id(cfg: &BenchConfig, case_ids: &[u32], infos: &[SourceInfo]) -> String {
    let key = serde_json::to_string(&(cfg.n, cfg.band_pct, cfg.bin_width, case_ids, infos)).expect("serializes");
    format!("{:016x}", seed::derive_seed(cfg.seed, &[seed::label(&key)]))
}

fn sample_records(samples: &[PredictionSample]) -> Vec<SampleRecord> {
    samples
        .iter()
        .map(|s| SampleRecord {
            id: s.meta.seed.map_or_else(|| s.index.to_string(), |x| x.to_string()),
            raw_text: s.raw_text.clone(),
            value: s.value(),
        })
        .collect()
}

fn metric_cell(case: &DesignCase, metric: Metric, samples: Vec<SampleRecord>, band_pct: f64) -> MetricCell {
    let (truth, unit) = match metric {
        Metric::Cost => (case.ground_truth_cost.dollars(), "USD".to_string()),
        Metric::Performance => (
            case.ground_truth_performance.value,
            case.ground_truth_performance.unit.clone(),
        ),
    };
    let values: Vec<f64> = samples.iter().filter_map(|s| s.value).collect();
    let unparseable = samples.len() - values.len();
    let (stats, skipped) = if values.is_empty() {
        (
            None,
            Some(format!(
                "no parseable {} answers among {}",
                metric.task(),
                samples.len()
            )),
        )
    } else {
        match CaseStats::compute(&values, unparseable, truth, band_pct) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    MetricCell {
        truth,
        unit,
        samples,
        stats,
        skipped,
    }
}

fn run_live(
    cases: &[DesignCase],
    src: &LiveSource,
    cfg: &BenchConfig,
    scorer: &UsabilityScorer,
) -> Result<GroupRun, ReportError> {
    let mut out_cases = Vec::with_capacity(cases.len());
    let mut usability = src.usability.then(Vec::new);
    for case in cases {
        let gateway = match &src.backend {
            LiveBackend::Mock(noise) => Gateway::mock(noise.profile_for(case)),
            LiveBackend::Gateway(g) => g.clone(),
        };
        let mut predictor = Predictor::new(gateway)
            .with_retrieval(src.group.uses_retrieval())
            .with_k(src.k);
        if let Some(idx) = &src.index {
            predictor = predictor.with_index(idx.clone());
        }
        let brief = DesignBrief::from_case(case);
        let unit = case.ground_truth_performance.unit.as_str();
        let sample = |task: Task, unit: Option<&str>| -> Result<Vec<SampleRecord>, ReportError> {
            let seed = batch_seed(cfg.seed, src.group, case.case_id, task);
            let (samples, _) = predictor.sample_many(&brief, task, unit, cfg.n, cfg.parallelism, seed)?;
            Ok(sample_records(&samples))
        };
        let cost = sample(Task::Cost, None)?;
        let perf = sample(Task::Performance, Some(unit))?;
        if let Some(u) = usability.as_mut() {
            let answers = sample(Task::Usability, None)?;
            let items: Vec<Vec<String>> = answers
                .iter()
                .map(|a| super::records::answer_items(&a.raw_text))
                .collect();
            u.push(case_usability(case, answers, &items, scorer)?);
        }
        out_cases.push(CaseReport {
            case_id: case.case_id,
            cost: metric_cell(case, Metric::Cost, cost, cfg.band_pct),
            performance: metric_cell(case, Metric::Performance, perf, cfg.band_pct),
        });
    }
    Ok(GroupRun {
        cases: out_cases,
        usability,
    })
}

fn run_recorded(
    cases: &[DesignCase],
    group: Group,
    records: &[PredictionRecord],
    cfg: &BenchConfig,
    scorer: &UsabilityScorer,
) -> Result<GroupRun, ReportError> {
    let mut by_key: BTreeMap<(u32, Task), Vec<&PredictionRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.group == group) {
        by_key.entry((r.case_id, r.task)).or_default().push(r);
    }
    let has_usability = by_key.keys().any(|(_, t)| *t == Task::Usability);
    let mut out_cases = Vec::with_capacity(cases.len());
    let mut usability = has_usability.then(Vec::new);
    for case in cases {
        let take = |task: Task| -> Result<&Vec<&PredictionRecord>, ReportError> {
            by_key.get(&(case.case_id, task)).ok_or(ReportError::MissingCase {
                group,
                case_id: case.case_id,
                task,
            })
        };
        let to_samples = |rs: &Vec<&PredictionRecord>, numeric: bool| -> Vec<SampleRecord> {
            rs.iter()
                .map(|r| SampleRecord {
                    id: r.respondent_or_seed.clone(),
                    raw_text: r.raw_text.clone(),
                    value: if numeric { r.value() } else { None },
                })
                .collect()
        };
        let cost = to_samples(take(Task::Cost)?, true);
        let perf = to_samples(take(Task::Performance)?, true);
        if let Some(u) = usability.as_mut() {
            let rs = take(Task::Usability)?;
            let items: Vec<Vec<String>> = rs.iter().map(|r| r.usability_items()).collect();
            u.push(case_usability(case, to_samples(rs, false), &items, scorer)?);
        }
        out_cases.push(CaseReport {
            case_id: case.case_id,
            cost: metric_cell(case, Metric::Cost, cost, cfg.band_pct),
            performance: metric_cell(case, Metric::Performance, perf, cfg.band_pct),
        });
    }
    Ok(GroupRun {
        cases: out_cases,
        usability,
    })
}

fn case_usability(
    case: &DesignCase,
    answers: Vec<SampleRecord>,
    items: &[Vec<String>],
    scorer: &UsabilityScorer,
) -> Result<CaseUsability, ReportError> {
    let mut cu = CaseUsability {
        case_id: case.case_id,
        answers,
        matches: Vec::new(),
        skipped: None,
    };
    if case.ground_truth_keywords.is_empty() {
        cu.skipped = Some("case has no ground-truth keywords".into());
        return Ok(cu);
    }
    let matches = scorer.score(items.iter().flatten().map(String::as_str), &case.ground_truth_keywords)?;
    if matches.is_empty() {
        cu.skipped = Some("answers contain no scorable words".into());
    }
    cu.matches = matches;
    Ok(cu)
}

fn group_usability(group: Group, cases: Vec<CaseUsability>, bin_width: u32) -> Result<GroupUsability, ReportError> {
    let all: Vec<_> = cases.iter().flat_map(|c| c.matches.iter().cloned()).collect();
    let histogram = similarity_distribution(&all, bin_width)?;
    Ok(GroupUsability {
        group,
        cases,
        histogram,
        overall_similarity: overall_similarity(all.iter()).ok(),
    })
}

/// Scores recorded usability answers of every group present in `records`.
/// Cases a group has no answers for are kept with a skip reason.
pub fn score_usability_records(
    cases: &[DesignCase],
    records: &[PredictionRecord],
    scorer: &UsabilityScorer,
    bin_width: u32,
    ai_group: Group,
) -> Result<UsabilitySection, ReportError> {
    let mut by_key: BTreeMap<(Group, u32), Vec<&PredictionRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.task == Task::Usability) {
        by_key.entry((r.group, r.case_id)).or_default().push(r);
    }
    let known: BTreeSet<u32> = cases.iter().map(|c| c.case_id).collect();
    if let Some(((group, case_id), _)) = by_key.iter().find(|((_, id), _)| !known.contains(id)) {
        return Err(ReportError::Sources(format!(
            "{group} answers reference unknown case {case_id}"
        )));
    }
    let present: BTreeSet<Group> = by_key.keys().map(|(g, _)| *g).collect();
    if present.is_empty() {
        return Err(ReportError::Incomplete("no usability answers in the records".into()));
    }
    let mut groups = Vec::new();
    for group in present {
        let mut out = Vec::with_capacity(cases.len());
        for case in cases {
            let Some(rs) = by_key.get(&(group, case.case_id)) else {
                out.push(CaseUsability {
                    case_id: case.case_id,
                    answers: Vec::new(),
                    matches: Vec::new(),
                    skipped: Some("no answers recorded".into()),
                });
                continue;
            };
            let answers = rs
                .iter()
                .map(|r| SampleRecord {
                    id: r.respondent_or_seed.clone(),
                    raw_text: r.raw_text.clone(),
                    value: None,
                })
                .collect();
            let items: Vec<Vec<String>> = rs.iter().map(|r| r.usability_items()).collect();
            out.push(case_usability(case, answers, &items, scorer)?);
        }
        groups.push(group_usability(group, out, bin_width)?);
    }
    let t_test = t_test_entry(&groups, ai_group);
    Ok(UsabilitySection {
        bin_width,
        groups,
        t_test,
    })
}

fn degenerate<T>(e: StatError) -> TestOutcome<T> {
    TestOutcome::Degenerate { reason: e.to_string() }
}

/// Observations entering the ANOVA for one group: absolute errors of every
/// sample (single) or each case's group point error (multiple).
pub(crate) fn anova_observations(g: &GroupReport, metric: Metric, mode: QueryMode) -> Vec<f64> {
    let stats = g.cases.iter().filter_map(|c| c.cell(metric).stats.as_ref());
    match mode {
        QueryMode::Single => stats.flat_map(|s| s.errors.iter().map(|e| e.abs())).collect(),
        QueryMode::Multiple => stats.map(|s| s.mae_multi_pct).collect(),
    }
}

pub(crate) fn anova_entries(groups: &[GroupReport]) -> Vec<AnovaEntry> {
    let mut out = Vec::new();
    for metric in Metric::ALL {
        for mode in QueryMode::ALL {
            let obs: Vec<Vec<f64>> = groups.iter().map(|g| anova_observations(g, metric, mode)).collect();
            let outcome = statlab::one_way_anova(&obs).map_or_else(degenerate, |result| TestOutcome::Ok { result });
            out.push(AnovaEntry {
                metric,
                mode,
                groups: groups.iter().map(|g| g.group).collect(),
                outcome,
            });
        }
    }
    out
}

pub(crate) fn t_test_entry(groups: &[GroupUsability], ai: Group) -> Option<TTestEntry> {
    let human = groups.iter().find(|g| g.group == Group::Human)?;
    let other = groups.iter().find(|g| g.group == ai)?;
    let obs = |g: &GroupUsability| flagged_observations(g.cases.iter().flat_map(|c| c.matches.iter()));
    let outcome =
        statlab::welch_t_test(&obs(human), &obs(other)).map_or_else(degenerate, |result| TestOutcome::Ok { result });
    Some(TTestEntry {
        a: Group::Human,
        b: ai,
        outcome,
    })
}

pub(crate) fn summarize(groups: &[GroupReport], usability: Option<&UsabilitySection>, cfg: &BenchConfig) -> Summary {
    let acc = |g: Group, m: Metric| {
        groups
            .iter()
            .find(|r| r.group == g)
            .and_then(|r| r.table_stats(m))
            .map(|t| t.multiple.accuracy)
    };
    let score = |g: Group| {
        usability
            .and_then(|u| u.groups.iter().find(|x| x.group == g))
            .and_then(|x| x.overall_similarity)
    };
    Summary {
        ai_group: cfg.summary_ai_group,
        usability_ai_group: cfg.usability_ai_group,
        cost: AccuracyPair {
            ai: acc(cfg.summary_ai_group, Metric::Cost),
            human: acc(Group::Human, Metric::Cost),
        },
        performance: AccuracyPair {
            ai: acc(cfg.summary_ai_group, Metric::Performance),
            human: acc(Group::Human, Metric::Performance),
        },
        usability: ScorePair {
            ai: score(cfg.usability_ai_group),
            human: score(Group::Human),
        },
    }
}

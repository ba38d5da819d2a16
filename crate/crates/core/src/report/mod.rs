//! Benchmark orchestration, the report document, and its tables and figure data.

mod audit;
mod bench;
mod emit;
mod records;

pub use audit::audit;
pub use bench::{
    batch_seed, load_sources, parse_sources, run_benchmark, score_usability_records, BackendSpec, BenchConfig,
    GroupSource, LiveBackend, LiveSource, MockNoise, SourceSpec, SourcesFile, SOURCES_SCHEMA,
};
pub use emit::{
    accuracy_table, anova_table, figure_data, format_p_value, write_bench_outputs, Figure, Table, BENCH_FILES,
};
pub use records::{
    answer_items, read_records, records_to_csv, synthetic_human_records, write_records, PredictionRecord,
    SyntheticCrowd, RECORD_HEADER,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::Task;
use crate::predictor::PredictError;
use crate::statlab::{self, AccuracyCount, AnovaResult, TTestResult};
use crate::usability::{HistogramBin, KeywordMatch, UsabilityError};

pub const REPORT_SCHEMA: &str = "protopredict/report-v1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("prediction records line {line}: {reason}")]
    Records { line: usize, reason: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("sources: {0}")]
    Sources(String),
    #[error("recorded source for group {group} has no {task} answers for case {case_id}")]
    MissingCase { group: Group, case_id: u32, task: Task },
    #[error("benchmark needs at least one case")]
    NoCases,
    #[error("n must be at least 1")]
    InvalidN,
    #[error(transparent)]
    Predict(#[from] PredictError),
    #[error(transparent)]
    Usability(#[from] UsabilityError),
    #[error("report: {0}")]
    Format(String),
    #[error("report is missing {0}")]
    Incomplete(String),
    #[error("unknown figure {0:?}")]
    UnknownFigure(String),
    #[error("unknown table {0:?}")]
    UnknownTable(String),
}

impl ReportError {
    pub fn is_backend(&self) -> bool {
        matches!(self, ReportError::Predict(e) if e.is_backend())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Gpt,
    GptRag,
    Human,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Gpt, Group::GptRag, Group::Human];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Gpt => "gpt",
            Group::GptRag => "gpt_rag",
            Group::Human => "human",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Group::Gpt => "GPT",
            Group::GptRag => "GPT-RAG",
            Group::Human => "Human",
        }
    }

    /// Whether live runs of this group use retrieved evidence.
    pub fn uses_retrieval(self) -> bool {
        self == Group::GptRag
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Group::ALL
            .into_iter()
            .find(|g| g.as_str() == s.trim())
            .ok_or_else(|| format!("unknown group {s:?} (expected gpt, gpt_rag or human)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Cost,
    Performance,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Cost, Metric::Performance];

    pub fn task(self) -> Task {
        match self {
            Metric::Cost => Task::Cost,
            Metric::Performance => Task::Performance,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Metric::Cost => "Cost",
            Metric::Performance => "Performance",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    Single,
    Multiple,
}

impl QueryMode {
    pub const ALL: [QueryMode; 2] = [QueryMode::Single, QueryMode::Multiple];

    pub fn label(self) -> &'static str {
        match self {
            QueryMode::Single => "Single",
            QueryMode::Multiple => "Multiple",
        }
    }
}

/// One answer as it entered the benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub raw_text: String,
    pub value: Option<f64>,
}

/// Per (group, case, metric) statistics, all in percent of the truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStats {
    pub n: usize,
    pub unparseable: usize,
    pub mean_prediction: f64,
    /// Signed error of every parseable sample, in sample order.
    pub errors: Vec<f64>,
    pub rmse_single_pct: f64,
    /// Signed error of the mean prediction.
    pub mean_error_pct: f64,
    /// |mean_error_pct|, the group point error.
    pub mae_multi_pct: f64,
    pub sd_pct: Option<f64>,
    pub within_band_single: bool,
    pub within_band_multi: bool,
}

impl CaseStats {
    pub fn compute(values: &[f64], unparseable: usize, truth: f64, band_pct: f64) -> Result<Self, statlab::StatError> {
        let errors = values
            .iter()
            .map(|v| statlab::approximation_error(*v, truth))
            .collect::<Result<Vec<_>, _>>()?;
        let mean_prediction = statlab::mean(values)?;
        let rmse_single_pct = statlab::rmse_percent(&errors)?;
        let mean_error_pct = statlab::approximation_error(mean_prediction, truth)?;
        let mae_multi_pct = mean_error_pct.abs();
        Ok(CaseStats {
            n: values.len(),
            unparseable,
            mean_prediction,
            sd_pct: statlab::sample_sd(&errors).ok(),
            errors,
            rmse_single_pct,
            mean_error_pct,
            mae_multi_pct,
            within_band_single: statlab::within_band(rmse_single_pct, band_pct),
            within_band_multi: statlab::within_band(mae_multi_pct, band_pct),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCell {
    pub truth: f64,
    pub unit: String,
    pub samples: Vec<SampleRecord>,
    pub stats: Option<CaseStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl MetricCell {
    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().filter_map(|s| s.value).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case_id: u32,
    pub cost: MetricCell,
    pub performance: MetricCell,
}

impl CaseReport {
    pub fn cell(&self, m: Metric) -> &MetricCell {
        match m {
            Metric::Cost => &self.cost,
            Metric::Performance => &self.performance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeStats {
    pub rmse_pct: Option<f64>,
    pub accuracy: AccuracyCount,
    pub sd_pct: Option<f64>,
}

/// The single and multiple query columns for one group and metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMetricStats {
    pub metric: Metric,
    pub single: ModeStats,
    pub multiple: ModeStats,
}

impl GroupMetricStats {
    /// Single: RMSE over cases of per-case RMSE, SD of all pooled errors,
    /// accuracy by per-case RMSE. Multiple: RMSE over cases of the group point
    /// error, SD of per-case mean errors, accuracy by group point error.
    /// Skipped cases count against accuracy.
    pub fn compute(metric: Metric, cases: &[CaseReport]) -> Self {
        let stats: Vec<&CaseStats> = cases.iter().filter_map(|c| c.cell(metric).stats.as_ref()).collect();
        let n = cases.len();
        let rms = |xs: Vec<f64>| statlab::rmse_percent(&xs).ok();
        let pooled: Vec<f64> = stats.iter().flat_map(|s| s.errors.iter().copied()).collect();
        let means: Vec<f64> = stats.iter().map(|s| s.mean_error_pct).collect();
        GroupMetricStats {
            metric,
            single: ModeStats {
                rmse_pct: rms(stats.iter().map(|s| s.rmse_single_pct).collect()),
                accuracy: AccuracyCount {
                    k: stats.iter().filter(|s| s.within_band_single).count(),
                    n,
                },
                sd_pct: statlab::sample_sd(&pooled).ok(),
            },
            multiple: ModeStats {
                rmse_pct: rms(stats.iter().map(|s| s.mae_multi_pct).collect()),
                accuracy: AccuracyCount {
                    k: stats.iter().filter(|s| s.within_band_multi).count(),
                    n,
                },
                sd_pct: statlab::sample_sd(&means).ok(),
            },
        }
    }

    pub fn mode(&self, m: QueryMode) -> &ModeStats {
        match m {
            QueryMode::Single => &self.single,
            QueryMode::Multiple => &self.multiple,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub group: Group,
    pub cases: Vec<CaseReport>,
    pub table: Vec<GroupMetricStats>,
}

impl GroupReport {
    pub fn table_stats(&self, m: Metric) -> Option<&GroupMetricStats> {
        self.table.iter().find(|t| t.metric == m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum TestOutcome<T> {
    Ok { result: T },
    Degenerate { reason: String },
}

impl<T> TestOutcome<T> {
    pub fn result(&self) -> Option<&T> {
        match self {
            TestOutcome::Ok { result } => Some(result),
            TestOutcome::Degenerate { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaEntry {
    pub metric: Metric,
    pub mode: QueryMode,
    pub groups: Vec<Group>,
    pub outcome: TestOutcome<AnovaResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseUsability {
    pub case_id: u32,
    pub answers: Vec<SampleRecord>,
    pub matches: Vec<KeywordMatch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupUsability {
    pub group: Group,
    pub cases: Vec<CaseUsability>,
    /// Over every match, flagged or not.
    pub histogram: Vec<HistogramBin>,
    /// Frequency-weighted over flagged matches.
    pub overall_similarity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestEntry {
    pub a: Group,
    pub b: Group,
    pub outcome: TestOutcome<TTestResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsabilitySection {
    pub bin_width: u32,
    pub groups: Vec<GroupUsability>,
    pub t_test: Option<TTestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyPair {
    pub ai: Option<AccuracyCount>,
    pub human: Option<AccuracyCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorePair {
    pub ai: Option<f64>,
    pub human: Option<f64>,
}

/// AI versus human headline numbers: multiple-query accuracy for cost and
/// performance, overall keyword similarity for usability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub ai_group: Group,
    pub usability_ai_group: Group,
    pub cost: AccuracyPair,
    pub performance: AccuracyPair,
    pub usability: ScorePair,
}

pub const SUMMARY_SCHEMA: &str = "protopredict/summary-v1";

impl Summary {
    /// Reads a standalone summary document tagged `protopredict/summary-v1`.
    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        #[derive(Deserialize)]
        struct Doc {
            schema: String,
            #[serde(flatten)]
            summary: Summary,
        }
        let d: Doc = serde_json::from_str(text).map_err(|e| ReportError::Format(e.to_string()))?;
        if d.schema != SUMMARY_SCHEMA {
            return Err(ReportError::Format(format!(
                "unsupported summary schema {:?}",
                d.schema
            )));
        }
        Ok(d.summary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceInfo {
    pub group: Group,
    pub spec: SourceSpec,
    pub backend_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub run_id: String,
    pub seed: u64,
    pub n: usize,
    pub band_pct: f64,
    pub case_ids: Vec<u32>,
    pub sources: Vec<SourceInfo>,
    pub generator: String,
    pub started_at: Option<String>,
    pub finished_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub schema: String,
    pub manifest: Manifest,
    pub groups: Vec<GroupReport>,
    pub anova: Vec<AnovaEntry>,
    pub usability: Option<UsabilitySection>,
    pub summary: Summary,
}

impl BenchmarkReport {
    pub fn group(&self, g: Group) -> Option<&GroupReport> {
        self.groups.iter().find(|r| r.group == g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Serialization without the run timestamps, for comparing runs.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.manifest.started_at = None;
        r.manifest.finished_at = None;
        r.to_json()
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| ReportError::Format(e.to_string()))?;
        match v.get("schema").and_then(|s| s.as_str()) {
            Some(REPORT_SCHEMA) => {}
            other => {
                return Err(ReportError::Format(format!(
                    "unsupported report schema {other:?}, expected {REPORT_SCHEMA:?}"
                )))
            }
        }
        serde_json::from_value(v).map_err(|e| ReportError::Format(e.to_string()))
    }

    /// Every answer in the report as prediction records.
    pub fn records(&self) -> Vec<PredictionRecord> {
        let mut out = Vec::new();
        for g in &self.groups {
            for c in &g.cases {
                for m in Metric::ALL {
                    let cell = c.cell(m);
                    for s in &cell.samples {
                        out.push(PredictionRecord {
                            group: g.group,
                            case_id: c.case_id,
                            respondent_or_seed: s.id.clone(),
                            task: m.task(),
                            raw_text: s.raw_text.clone(),
                            parsed_value: s.value,
                            unit: Some(match m {
                                Metric::Cost => "USD".to_string(),
                                Metric::Performance => cell.unit.clone(),
                            }),
                        });
                    }
                }
            }
        }
        if let Some(u) = &self.usability {
            for g in &u.groups {
                for c in &g.cases {
                    for s in &c.answers {
                        out.push(PredictionRecord {
                            group: g.group,
                            case_id: c.case_id,
                            respondent_or_seed: s.id.clone(),
                            task: Task::Usability,
                            raw_text: s.raw_text.clone(),
                            parsed_value: None,
                            unit: None,
                        });
                    }
                }
            }
        }
        out
    }
}

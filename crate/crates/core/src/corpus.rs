//! Design-repository records and the ground-truth benchmark cases.
//!
//! Corpus files are JSON documents tagged `protopredict/corpus-v1` holding a
//! `records` array; benchmark files are tagged `protopredict/bench-v1` and hold
//! a `cases` array. Records are validated one at a time so lenient parsing can
//! skip bad entries and still report where they were.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use rust_decimal::prelude::ToPrimitive;
use rust_decimal::{Decimal, RoundingStrategy};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

pub const CORPUS_SCHEMA: &str = "protopredict/corpus-v1";
pub const BENCH_SCHEMA: &str = "protopredict/bench-v1";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unexpected schema tag {found:?}, expected {expected:?}")]
    Schema { found: String, expected: &'static str },
    #[error("record {index} ({id}): {reason}")]
    Record { index: usize, id: String, reason: String },
    #[error("duplicate record id {id:?} at records {first} and {second}")]
    DuplicateId { id: String, first: usize, second: usize },
    #[error("case {locus}: {reason}")]
    Case { locus: String, reason: String },
}

impl CorpusError {
    fn syntax(err: serde_json::Error) -> Self {
        CorpusError::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

/// US dollars held as integer cents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub fn from_cents(cents: i64) -> Self {
        Money(cents)
    }

    pub fn cents(self) -> i64 {
        self.0
    }

    /// Converts a dollar amount, rounding half away from zero to the cent.
    pub fn from_dollars(dollars: f64) -> Option<Self> {
        let d = decimal_from_f64(dollars)?;
        let cents =
            (d.round_dp_with_strategy(2, RoundingStrategy::MidpointAwayFromZero) * Decimal::ONE_HUNDRED).to_i64()?;
        Some(Money(cents))
    }

    pub fn dollars(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.dollars())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Money::from_dollars(v).ok_or_else(|| serde::de::Error::custom(format!("invalid money amount {v}")))
    }
}

/// Exact decimal view of an `f64` through its shortest round-trip rendering,
/// so `0.333` in a file is multiplied as `0.333` and not its binary neighbour.
fn decimal_from_f64(x: f64) -> Option<Decimal> {
    if !x.is_finite() {
        return None;
    }
    Decimal::from_str(&format!("{x}"))
        .ok()
        .or_else(|| Decimal::from_f64_retain(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Circuits,
    Workshop,
    Craft,
    Other,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Circuits => "circuits",
            Category::Workshop => "workshop",
            Category::Craft => "craft",
            Category::Other => "other",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BomLine {
    pub item: String,
    pub quantity: f64,
    pub unit_cost: f64,
}

impl BomLine {
    fn validate(&self) -> Result<(), String> {
        if !(self.quantity.is_finite() && self.quantity > 0.0) {
            return Err(format!(
                "bom line {:?}: quantity must be positive, got {}",
                self.item, self.quantity
            ));
        }
        if !(self.unit_cost.is_finite() && self.unit_cost >= 0.0) {
            return Err(format!(
                "bom line {:?}: unit_cost must be non-negative, got {}",
                self.item, self.unit_cost
            ));
        }
        if !(self.quantity * self.unit_cost).is_finite() {
            return Err(format!("bom line {:?}: line cost overflows", self.item));
        }
        Ok(())
    }

    fn line_cost(&self) -> Decimal {
        let q = decimal_from_f64(self.quantity).unwrap_or_default();
        let c = decimal_from_f64(self.unit_cost).unwrap_or_default();
        q.checked_mul(c).unwrap_or(Decimal::MAX)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerformanceNote {
    pub metric_name: String,
    pub value: f64,
    pub unit: String,
}

impl PerformanceNote {
    fn validate(&self) -> Result<(), String> {
        if !self.value.is_finite() {
            return Err(format!("performance note {:?}: value is not finite", self.metric_name));
        }
        if self.unit.trim().is_empty() {
            return Err(format!("performance note {:?}: unit is empty", self.metric_name));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectRecord {
    pub id: String,
    pub title: String,
    pub category: Category,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub bom: Vec<BomLine>,
    #[serde(default)]
    pub performance_notes: Vec<PerformanceNote>,
    #[serde(default)]
    pub feedback: Vec<String>,
    #[serde(default)]
    pub steps: Vec<String>,
}

impl ProjectRecord {
    pub fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("id is empty".into());
        }
        for line in &self.bom {
            line.validate()?;
        }
        for note in &self.performance_notes {
            note.validate()?;
        }
        Ok(())
    }
}

/// A record that lenient parsing dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordRejection {
    pub index: usize,
    pub id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedCorpus {
    pub records: Vec<ProjectRecord>,
    pub rejected: Vec<RecordRejection>,
}

#[derive(Deserialize)]
struct Envelope<T> {
    schema: String,
    #[serde(alias = "cases")]
    records: Vec<T>,
}

pub fn parse_project_records<R: Read>(source: R, strict: bool) -> Result<ParsedCorpus, CorpusError> {
    let env: Envelope<Value> = serde_json::from_reader(source).map_err(CorpusError::syntax)?;
    if env.schema != CORPUS_SCHEMA {
        return Err(CorpusError::Schema {
            found: env.schema,
            expected: CORPUS_SCHEMA,
        });
    }

    let mut out = ParsedCorpus::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (index, raw) in env.records.into_iter().enumerate() {
        let id_hint = raw.get("id").and_then(Value::as_str).map(str::to_owned);
        let checked = serde_json::from_value::<ProjectRecord>(raw)
            .map_err(|e| e.to_string())
            .and_then(|rec| rec.validate().map(|_| rec));
        let rec = match checked {
            Ok(rec) => rec,
            Err(reason) if strict => {
                return Err(CorpusError::Record {
                    index,
                    id: id_hint.unwrap_or_else(|| "<no id>".into()),
                    reason,
                })
            }
            Err(reason) => {
                tracing::warn!(index, ?id_hint, %reason, "skipping invalid record");
                out.rejected.push(RecordRejection {
                    index,
                    id: id_hint,
                    reason,
                });
                continue;
            }
        };
        if let Some(&first) = seen.get(&rec.id) {
            if strict {
                return Err(CorpusError::DuplicateId {
                    id: rec.id,
                    first,
                    second: index,
                });
            }
            out.rejected.push(RecordRejection {
                index,
                id: Some(rec.id.clone()),
                reason: format!("duplicate id (first seen at record {first})"),
            });
            continue;
        }
        seen.insert(rec.id.clone(), index);
        out.records.push(rec);
    }
    Ok(out)
}

/// Serializes records into a corpus file that [`parse_project_records`] reads back.
pub fn render_corpus_file(records: &[ProjectRecord]) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        schema: &'static str,
        records: &'a [ProjectRecord],
    }
    serde_json::to_string_pretty(&Out {
        schema: CORPUS_SCHEMA,
        records,
    })
    .expect("records serialize")
}

/// Sum of quantity × unit cost over the BOM, rounded half-up to the cent.
pub fn total_cost(record: &ProjectRecord) -> Money {
    let sum = record
        .bom
        .iter()
        .fold(Decimal::ZERO, |acc, l| acc.saturating_add(l.line_cost()));
    decimal_to_money(sum)
}

fn decimal_to_money(d: Decimal) -> Money {
    let cents = (d.round_dp_with_strategy(2, RoundingStrategy::MidpointAwayFromZero) * Decimal::ONE_HUNDRED)
        .to_i64()
        .unwrap_or(i64::MAX);
    Money(cents)
}

/// Canonical text the retrieval index ingests. Sections appear in a fixed
/// order and empty sections are omitted.
pub fn render_index_document(record: &ProjectRecord) -> String {
    let mut out = String::new();
    out.push_str(&format!("TITLE: {}\n", record.title));
    out.push_str(&format!("CATEGORY: {}\n", record.category));
    if !record.description.trim().is_empty() {
        out.push_str(&format!("DESCRIPTION: {}\n", record.description.trim()));
    }
    if !record.bom.is_empty() {
        out.push_str("BILL OF MATERIALS:\n");
        for line in &record.bom {
            out.push_str(&format!(
                "- {} x {} @ USD {} = USD {}\n",
                line.item,
                line.quantity,
                line.unit_cost,
                decimal_to_money(line.line_cost())
            ));
        }
        out.push_str(&format!("TOTAL COST (USD): {}\n", total_cost(record)));
    }
    if !record.performance_notes.is_empty() {
        out.push_str("PERFORMANCE:\n");
        for note in &record.performance_notes {
            out.push_str(&format!("- {}: {} {}\n", note.metric_name, note.value, note.unit));
        }
    }
    if !record.feedback.is_empty() {
        out.push_str("FEEDBACK:\n");
        for fb in &record.feedback {
            out.push_str(&format!("- {fb}\n"));
        }
    }
    if !record.steps.is_empty() {
        out.push_str("STEPS:\n");
        for (i, step) in record.steps.iter().enumerate() {
            out.push_str(&format!("{}. {}\n", i + 1, step));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefinedContext {
    pub problem: String,
    pub design_solution: String,
    pub key_functions: Vec<String>,
    #[serde(default)]
    pub dimensions_and_weight: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignCase {
    pub case_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub refined_context: RefinedContext,
    #[serde(default)]
    pub image_ref: Option<String>,
    pub ground_truth_cost: Money,
    pub ground_truth_performance: PerformanceNote,
    #[serde(default)]
    pub ground_truth_keywords: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCase {
    case_id: Option<u32>,
    #[serde(default)]
    title: Option<String>,
    refined_context: Option<RefinedContext>,
    #[serde(default)]
    image_ref: Option<String>,
    ground_truth_cost: Option<f64>,
    ground_truth_performance: Option<PerformanceNote>,
    #[serde(default)]
    ground_truth_keywords: Vec<String>,
}

impl RawCase {
    fn into_case(self) -> Result<DesignCase, String> {
        let case_id = self.case_id.ok_or("missing case_id")?;
        if case_id == 0 {
            return Err("case_id must be positive".into());
        }
        let ctx = self.refined_context.ok_or("missing refined_context")?;
        if ctx.key_functions.len() != 3 {
            return Err(format!(
                "refined_context.key_functions must hold exactly 3 entries, found {}",
                ctx.key_functions.len()
            ));
        }
        if ctx.problem.trim().is_empty() || ctx.design_solution.trim().is_empty() {
            return Err("refined_context.problem and design_solution must be non-empty".into());
        }
        let cost = self.ground_truth_cost.ok_or("missing ground_truth_cost")?;
        let cost = Money::from_dollars(cost).ok_or("ground_truth_cost is not a finite amount")?;
        if cost <= Money::ZERO {
            return Err(format!("ground_truth_cost must be > 0, got {cost}"));
        }
        let perf = self
            .ground_truth_performance
            .ok_or("missing ground_truth_performance")?;
        perf.validate()?;
        Ok(DesignCase {
            case_id,
            title: self.title,
            refined_context: ctx,
            image_ref: self.image_ref,
            ground_truth_cost: cost,
            ground_truth_performance: perf,
            ground_truth_keywords: self.ground_truth_keywords,
        })
    }
}

pub fn load_benchmark_cases<R: Read>(source: R) -> Result<Vec<DesignCase>, CorpusError> {
    let env: Envelope<Value> = serde_json::from_reader(source).map_err(CorpusError::syntax)?;
    if env.schema != BENCH_SCHEMA {
        return Err(CorpusError::Schema {
            found: env.schema,
            expected: BENCH_SCHEMA,
        });
    }
    let mut cases = Vec::with_capacity(env.records.len());
    let mut seen = HashMap::new();
    for (index, raw) in env.records.into_iter().enumerate() {
        let locus = match raw.get("case_id").and_then(Value::as_u64) {
            Some(id) => format!("{id} (entry {index})"),
            None => format!("entry {index}"),
        };
        let case = serde_json::from_value::<RawCase>(raw)
            .map_err(|e| e.to_string())
            .and_then(RawCase::into_case)
            .map_err(|reason| CorpusError::Case {
                locus: locus.clone(),
                reason,
            })?;
        if let Some(prev) = seen.insert(case.case_id, index) {
            return Err(CorpusError::Case {
                locus,
                reason: format!("duplicate case_id (also entry {prev})"),
            });
        }
        cases.push(case);
    }
    Ok(cases)
}

pub fn render_bench_file(cases: &[DesignCase]) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        schema: &'static str,
        cases: &'a [DesignCase],
    }
    serde_json::to_string_pretty(&Out {
        schema: BENCH_SCHEMA,
        cases,
    })
    .expect("cases serialize")
}

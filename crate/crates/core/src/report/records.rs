//! Prediction-record files: one CSV row per answer, shared by recorded human
//! data and replays of live runs.
//!
//! ```text
//! group,case_id,respondent_or_seed,task,raw_text,parsed_value,unit
//! human,1,r01,cost,"About $25, mostly the motor",25,USD
//! gpt_rag,1,1234567,performance,Expected performance: 48.10 lumens.,48.1,lumens
//! human,1,r01,usability,"Positives:\n1. portable ...",,
//! ```
//!
//! `parsed_value` may be left empty, in which case the value is parsed from
//! `raw_text` (cost as a USD amount, performance next to `unit`).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Group, ReportError};
use crate::corpus::{DesignCase, Money};
use crate::gateway::{draw_items, NumericTarget, Task, UsabilityProfile};
use crate::predictor::{parse_cost, parse_performance, parse_usability};
use crate::seed;

pub const RECORD_HEADER: [&str; 7] = [
    "group",
    "case_id",
    "respondent_or_seed",
    "task",
    "raw_text",
    "parsed_value",
    "unit",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub group: Group,
    pub case_id: u32,
    pub respondent_or_seed: String,
    pub task: Task,
    pub raw_text: String,
    pub parsed_value: Option<f64>,
    pub unit: Option<String>,
}

impl PredictionRecord {
    /// The numeric answer: `parsed_value` if present, else parsed from the text.
    pub fn value(&self) -> Option<f64> {
        if let Some(v) = self.parsed_value {
            return (v.is_finite() && v >= 0.0).then_some(v);
        }
        match self.task {
            Task::Cost => parse_cost(&self.raw_text).map(Money::dollars),
            Task::Performance => self
                .unit
                .as_deref()
                .and_then(|u| parse_performance(&self.raw_text, u))
                .map(|q| q.value),
            _ => None,
        }
    }

    pub fn usability_items(&self) -> Vec<String> {
        answer_items(&self.raw_text)
    }
}

/// Usability answer items. Text without positive/issue lists counts as a
/// single free-form item.
pub fn answer_items(text: &str) -> Vec<String> {
    let a = parse_usability(text);
    if a.parseable {
        a.positives.into_iter().chain(a.issues).collect()
    } else if text.trim().is_empty() {
        Vec::new()
    } else {
        vec![text.trim().to_owned()]
    }
}

pub fn read_records<R: Read>(source: R) -> Result<Vec<PredictionRecord>, ReportError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = rdr.headers().map_err(|e| ReportError::Records {
        line: 1,
        reason: e.to_string(),
    })?;
    if header.iter().collect::<Vec<_>>() != RECORD_HEADER {
        return Err(ReportError::Records {
            line: 1,
            reason: format!("header must be exactly {}", RECORD_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| ReportError::Records {
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let bad = |reason: String| ReportError::Records { line, reason };
        let group: Group = row[0].parse().map_err(bad)?;
        let case_id: u32 = row[1]
            .trim()
            .parse()
            .map_err(|_| bad(format!("case_id {:?} is not a positive integer", &row[1])))?;
        let task: Task = row[3].trim().parse().map_err(bad)?;
        if task == Task::Refine {
            return Err(bad("task refine is not a benchmark task".into()));
        }
        let parsed_value = match row[5].trim() {
            "" => None,
            v => Some(
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| bad(format!("parsed_value {v:?} is not a number")))?,
            ),
        };
        let unit = Some(row[6].trim().to_owned()).filter(|u| !u.is_empty());
        out.push(PredictionRecord {
            group,
            case_id,
            respondent_or_seed: row[2].trim().to_owned(),
            task,
            raw_text: row[4].to_owned(),
            parsed_value,
            unit,
        });
    }
    Ok(out)
}

pub fn write_records<W: Write>(sink: W, records: &[PredictionRecord]) -> Result<(), ReportError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.group.as_str(),
            &r.case_id.to_string(),
            &r.respondent_or_seed,
            r.task.as_str(),
            &r.raw_text,
            &r.parsed_value.map(|v| v.to_string()).unwrap_or_default(),
            r.unit.as_deref().unwrap_or(""),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn records_to_csv(records: &[PredictionRecord]) -> String {
    let mut buf = Vec::new();
    write_records(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// Settings for generating synthetic respondents.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCrowd {
    pub respondents: usize,
    pub noise_sd: f64,
    /// Probability that a usability item names a ground-truth keyword.
    pub keyword_fidelity: f64,
    pub distractors: Vec<String>,
    pub seed: u64,
}

/// Synthetic human answers: cost and performance drawn around the truth with
/// relative noise `noise_sd`, usability items drawn from the case keywords
/// and `distractors`. Purely illustrative; not survey data.
pub fn synthetic_human_records(cases: &[DesignCase], crowd: &SyntheticCrowd) -> Vec<PredictionRecord> {
    let mut out = Vec::new();
    for case in cases {
        let unit = &case.ground_truth_performance.unit;
        for r in 1..=crowd.respondents {
            let rid = format!("r{r:02}");
            let mut rng = seed::rng(seed::derive_seed(crowd.seed, &[case.case_id as u64, r as u64]));
            let cost = NumericTarget {
                target: case.ground_truth_cost.dollars(),
                noise_sd: crowd.noise_sd,
            }
            .draw(&mut rng);
            let cost = Money::from_dollars(cost).unwrap_or(Money::ZERO);
            let perf = NumericTarget {
                target: case.ground_truth_performance.value,
                noise_sd: crowd.noise_sd,
            }
            .draw(&mut rng);
            let perf = (perf * 100.0).round() / 100.0;
            let rec = |task, raw_text: String, parsed_value, unit: Option<&str>| PredictionRecord {
                group: Group::Human,
                case_id: case.case_id,
                respondent_or_seed: rid.clone(),
                task,
                raw_text,
                parsed_value,
                unit: unit.map(str::to_owned),
            };
            out.push(rec(
                Task::Cost,
                format!("My estimate is ${cost}"),
                Some(cost.dollars()),
                Some("USD"),
            ));
            out.push(rec(
                Task::Performance,
                format!("Roughly {perf} {unit}"),
                Some(perf),
                Some(unit),
            ));
            if !case.ground_truth_keywords.is_empty() {
                let profile = UsabilityProfile {
                    pool: case.ground_truth_keywords.clone(),
                    distractors: crowd.distractors.clone(),
                    fidelity: crowd.keyword_fidelity,
                };
                let items = draw_items(&profile, 6, &mut rng);
                let text = format!(
                    "Positives:\n1. {}\n2. {}\n3. {}\nIssues:\n1. {}\n2. {}\n3. {}",
                    items[0], items[1], items[2], items[3], items[4], items[5]
                );
                out.push(rec(Task::Usability, text, None, None));
            }
        }
    }
    out
}

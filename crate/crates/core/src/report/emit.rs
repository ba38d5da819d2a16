//! Delimited tables and figure data derived from a report.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{records_to_csv, BenchmarkReport, Group, Metric, QueryMode, ReportError, TestOutcome};
use crate::statlab::AccuracyCount;

pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    ErrCost,
    ErrPerf,
    RmseCost,
    RmsePerf,
    UsabilityHist,
    SummaryBars,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::ErrCost,
        Figure::ErrPerf,
        Figure::RmseCost,
        Figure::RmsePerf,
        Figure::UsabilityHist,
        Figure::SummaryBars,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::ErrCost => "err_cost",
            Figure::ErrPerf => "err_perf",
            Figure::RmseCost => "rmse_cost",
            Figure::RmsePerf => "rmse_perf",
            Figure::UsabilityHist => "usability_hist",
            Figure::SummaryBars => "summary_bars",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Figure::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| ReportError::UnknownFigure(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Accuracy,
    Anova,
}

impl Table {
    pub const ALL: [Table; 2] = [Table::Accuracy, Table::Anova];

    pub fn as_str(self) -> &'static str {
        match self {
            Table::Accuracy => "accuracy",
            Table::Anova => "anova",
        }
    }

    pub fn render(self, report: &BenchmarkReport) -> Result<String, ReportError> {
        match self {
            Table::Accuracy => accuracy_table(report),
            Table::Anova => anova_table(report),
        }
    }
}

impl FromStr for Table {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Table::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| ReportError::UnknownTable(s.into()))
    }
}

/// Files written by a benchmark run, in write order.
pub const BENCH_FILES: [&str; 11] = [
    "report.json",
    "accuracy_table.csv",
    "anova_table.csv",
    "err_cost.csv",
    "err_perf.csv",
    "rmse_cost.csv",
    "rmse_perf.csv",
    "usability_hist.csv",
    "summary_bars.csv",
    "predictions.csv",
    "summary.txt",
];

const NA: &str = "n/a";

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for r in rows {
        w.write_record(&r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

/// Whole percent, halves rounded up.
fn whole_pct(v: f64) -> String {
    format!("{}%", (v + 0.5).floor())
}

fn opt_pct(v: Option<f64>) -> String {
    v.map_or_else(|| NA.into(), whole_pct)
}

/// `<0.001` below one in a thousand, else three decimals.
pub fn format_p_value(p: f64) -> String {
    if p < 0.001 {
        "<0.001".into()
    } else {
        format!("{p:.3}")
    }
}

pub fn accuracy_table(report: &BenchmarkReport) -> Result<String, ReportError> {
    if report.groups.is_empty() {
        return Err(ReportError::Incomplete("cost and performance results".into()));
    }
    let mut header = vec!["Accuracy Metrics".to_string()];
    for g in Group::ALL {
        let (a, b) = if g == Group::Human {
            ("Individual", "Group")
        } else {
            ("Single Query", "Multiple Query")
        };
        header.push(format!("{} {a}", g.label()));
        header.push(format!("{} {b}", g.label()));
    }
    let mut rows = Vec::new();
    for m in Metric::ALL {
        for row in ["RMSE", "Average Accuracy", "S.D."] {
            let label = if row == "S.D." {
                format!("{} S.D.", m.label())
            } else {
                format!("{} \u{2013} {row}", m.label())
            };
            let mut cells = vec![label];
            for g in Group::ALL {
                let stats = report.group(g).and_then(|r| r.table_stats(m));
                for mode in QueryMode::ALL {
                    cells.push(match stats.map(|s| s.mode(mode)) {
                        None => NA.into(),
                        Some(ms) => match row {
                            "RMSE" => opt_pct(ms.rmse_pct),
                            "Average Accuracy" => ms.accuracy.to_string(),
                            _ => opt_pct(ms.sd_pct),
                        },
                    });
                }
            }
            rows.push(cells);
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(csv_text(&header, rows))
}

pub fn anova_table(report: &BenchmarkReport) -> Result<String, ReportError> {
    let mut rows = Vec::new();
    for m in Metric::ALL {
        for mode in QueryMode::ALL {
            let e = report
                .anova
                .iter()
                .find(|e| e.metric == m && e.mode == mode)
                .ok_or_else(|| ReportError::Incomplete(format!("ANOVA result for {} {}", m.label(), mode.label())))?;
            let (p, verdict) = match &e.outcome {
                TestOutcome::Ok { result } => (
                    format_p_value(result.p_value),
                    if result.p_value < SIGNIFICANCE { "Yes" } else { "No" }.to_string(),
                ),
                TestOutcome::Degenerate { .. } => ("degenerate".into(), NA.into()),
            };
            rows.push(vec![m.label().into(), mode.label().into(), p, verdict]);
        }
    }
    Ok(csv_text(
        &["Metric", "Query type", "p-value", "Significant (p < 0.05)"],
        rows,
    ))
}

fn num(v: f64) -> String {
    format!("{v}")
}

pub fn figure_data(report: &BenchmarkReport, figure: Figure) -> Result<String, ReportError> {
    match figure {
        Figure::ErrCost | Figure::ErrPerf => {
            let m = if figure == Figure::ErrCost {
                Metric::Cost
            } else {
                Metric::Performance
            };
            let mut rows = Vec::new();
            for g in &report.groups {
                for c in &g.cases {
                    let cell = c.cell(m);
                    let Some(stats) = &cell.stats else { continue };
                    let ids = cell.samples.iter().filter(|s| s.value.is_some()).map(|s| &s.id);
                    for (id, e) in ids.zip(&stats.errors) {
                        rows.push(vec![g.group.to_string(), c.case_id.to_string(), id.clone(), num(*e)]);
                    }
                }
            }
            Ok(csv_text(&["group", "case_id", "sample_id", "signed_error_pct"], rows))
        }
        Figure::RmseCost | Figure::RmsePerf => {
            let m = if figure == Figure::RmseCost {
                Metric::Cost
            } else {
                Metric::Performance
            };
            let mut rows = Vec::new();
            for g in &report.groups {
                for c in &g.cases {
                    let (a, b) = c.cell(m).stats.as_ref().map_or((String::new(), String::new()), |s| {
                        (num(s.rmse_single_pct), num(s.mae_multi_pct))
                    });
                    rows.push(vec![g.group.to_string(), c.case_id.to_string(), a, b]);
                }
            }
            Ok(csv_text(
                &["group", "case_id", "rmse_single_pct", "group_point_error_pct"],
                rows,
            ))
        }
        Figure::UsabilityHist => {
            let u = report
                .usability
                .as_ref()
                .filter(|u| !u.groups.is_empty())
                .ok_or_else(|| ReportError::Incomplete("usability results".into()))?;
            Ok(u.histogram_csv())
        }
        Figure::SummaryBars => Ok(summary_bars(&report.summary)),
    }
}

/// Cost and performance as the multiple-query accuracy percentage,
/// usability as the overall similarity score, all rounded to whole numbers.
fn summary_bars(s: &super::Summary) -> String {
    let acc = |a: Option<AccuracyCount>| a.map_or_else(|| NA.into(), |a| a.percent().to_string());
    let score = |v: Option<f64>| v.map_or_else(|| NA.into(), |v| format!("{}", (v + 0.5).floor()));
    let rows = vec![
        vec!["cost".into(), acc(s.cost.ai), acc(s.cost.human)],
        vec!["performance".into(), acc(s.performance.ai), acc(s.performance.human)],
        vec!["usability".into(), score(s.usability.ai), score(s.usability.human)],
    ];
    csv_text(&["metric", "ai", "human"], rows)
}

impl super::UsabilitySection {
    /// Every group's similarity histogram as one delimited table.
    pub fn histogram_csv(&self) -> String {
        let mut rows = Vec::new();
        for g in &self.groups {
            for b in &g.histogram {
                rows.push(vec![
                    g.group.to_string(),
                    b.lower.to_string(),
                    b.upper.to_string(),
                    b.frequency.to_string(),
                ]);
            }
        }
        csv_text(&["group", "bin_lower", "bin_upper", "frequency"], rows)
    }

    /// Per-case top-ranked matches of every group.
    pub fn matches_csv(&self) -> String {
        let mut rows = Vec::new();
        for g in &self.groups {
            for c in &g.cases {
                for m in &c.matches {
                    rows.push(vec![
                        g.group.to_string(),
                        c.case_id.to_string(),
                        m.predicted_lemma.clone(),
                        m.best_truth_lemma.clone(),
                        num(m.similarity),
                        m.frequency.to_string(),
                        m.flagged.to_string(),
                    ]);
                }
            }
        }
        csv_text(
            &[
                "group",
                "case_id",
                "predicted_lemma",
                "best_truth_lemma",
                "similarity",
                "frequency",
                "flagged",
            ],
            rows,
        )
    }
}

impl super::Summary {
    /// The summary bars as a delimited table.
    pub fn to_csv(&self) -> String {
        summary_bars(self)
    }

    /// Human-readable AI versus human lines.
    pub fn to_text(&self) -> String {
        let acc = |a: Option<AccuracyCount>| a.map_or_else(|| NA.into(), |a| format!("{}%", a.percent()));
        let score = |v: Option<f64>| v.map_or_else(|| NA.into(), |v| format!("{}%", (v + 0.5).floor()));
        format!(
            "metric       {:>8} {:>8}\ncost         {:>8} {:>8}\nperformance  {:>8} {:>8}\nusability    {:>8} {:>8}\n",
            self.ai_group.label(),
            "Human",
            acc(self.cost.ai),
            acc(self.cost.human),
            acc(self.performance.ai),
            acc(self.performance.human),
            score(self.usability.ai),
            score(self.usability.human),
        )
    }
}

/// Writes the report, both tables, every available figure, the summary and
/// the prediction records into `dir`. Returns the paths written.
pub fn write_bench_outputs(report: &BenchmarkReport, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    std::fs::create_dir_all(dir)?;
    let mut files: Vec<(String, String)> = vec![
        ("report.json".into(), report.to_json()),
        ("accuracy_table.csv".into(), accuracy_table(report)?),
        ("anova_table.csv".into(), anova_table(report)?),
    ];
    for f in Figure::ALL {
        match figure_data(report, f) {
            Ok(text) => files.push((format!("{f}.csv"), text)),
            Err(ReportError::Incomplete(_)) if f == Figure::UsabilityHist => {}
            Err(e) => return Err(e),
        }
    }
    files.push(("predictions.csv".into(), records_to_csv(&report.records())));
    files.push(("summary.txt".into(), report.summary.to_text()));
    let mut written = Vec::new();
    for (name, text) in files {
        let p = dir.join(name);
        std::fs::write(&p, text)?;
        written.push(p);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets;

    #[test]
    fn p_value_formatting() {
        assert_eq!(format_p_value(0.0004), "<0.001");
        assert_eq!(format_p_value(0.2), "0.200");
        assert_eq!(format_p_value(0.001), "0.001");
        assert_eq!(format_p_value(0.0025), "0.003");
    }

    #[test]
    fn published_summary_bars() {
        let s = assets::published_summary();
        assert_eq!(
            s.to_csv(),
            "metric,ai,human\ncost,67,33\nperformance,58,33\nusability,72,81\n"
        );
    }

    #[test]
    fn whole_percent_rounds_halves_up() {
        assert_eq!(whole_pct(0.0), "0%");
        assert_eq!(whole_pct(12.5), "13%");
        assert_eq!(whole_pct(193.49), "193%");
    }

    #[test]
    fn figure_ids_round_trip() {
        for f in Figure::ALL {
            assert_eq!(f.as_str().parse::<Figure>().unwrap(), f);
        }
        assert!(matches!("fig6".parse::<Figure>(), Err(ReportError::UnknownFigure(_))));
        assert!(matches!("t2".parse::<Table>(), Err(ReportError::UnknownTable(_))));
    }
}

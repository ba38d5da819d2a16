//! Recomputes every derived number in a report from its raw samples.

use super::bench::{anova_entries, summarize, t_test_entry, BenchConfig};
use super::{answer_items, BenchmarkReport, GroupMetricStats, Metric, QueryMode, TestOutcome};
use crate::usability::{overall_similarity, similarity_distribution, UsabilityScorer};

const REL_TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

fn close_opt(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => close(a, b),
        (None, None) => true,
        _ => false,
    }
}

/// Lists every stored value that disagrees with a recomputation; empty when
/// the report is consistent.
pub fn audit(report: &BenchmarkReport, scorer: &UsabilityScorer) -> Vec<String> {
    let mut bad = Vec::new();
    let band = report.manifest.band_pct;
    for g in &report.groups {
        for c in &g.cases {
            for m in Metric::ALL {
                let cell = c.cell(m);
                let at = format!("{} case {} {}", g.group, c.case_id, m.label());
                let values = cell.values();
                let Some(s) = &cell.stats else {
                    if !values.is_empty() && cell.truth > 0.0 {
                        bad.push(format!("{at}: parseable samples but no statistics"));
                    }
                    continue;
                };
                let t = cell.truth;
                let errors: Vec<f64> = values.iter().map(|v| 100.0 * (v - t) / t).collect();
                let n = errors.len() as f64;
                let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
                let mean_pred = values.iter().sum::<f64>() / n;
                let mean_err = 100.0 * (mean_pred - t) / t;
                let sd = (errors.len() > 1).then(|| {
                    let me = errors.iter().sum::<f64>() / n;
                    (errors.iter().map(|e| (e - me).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                });
                if s.n != errors.len() || s.unparseable != cell.samples.len() - errors.len() {
                    bad.push(format!("{at}: sample counts"));
                }
                if s.errors.len() != errors.len() || !s.errors.iter().zip(&errors).all(|(a, b)| close(*a, *b)) {
                    bad.push(format!("{at}: signed errors"));
                }
                for (name, stored, fresh) in [
                    ("rmse_single_pct", s.rmse_single_pct, rmse),
                    ("mean_prediction", s.mean_prediction, mean_pred),
                    ("mean_error_pct", s.mean_error_pct, mean_err),
                    ("mae_multi_pct", s.mae_multi_pct, mean_err.abs()),
                ] {
                    if !close(stored, fresh) {
                        bad.push(format!("{at}: {name} {stored} != {fresh}"));
                    }
                }
                if !close_opt(s.sd_pct, sd) {
                    bad.push(format!("{at}: sd_pct"));
                }
                if s.within_band_single != (rmse <= band) || s.within_band_multi != (mean_err.abs() <= band) {
                    bad.push(format!("{at}: band flags"));
                }
            }
        }
        for m in Metric::ALL {
            let fresh = GroupMetricStats::compute(m, &g.cases);
            match g.table_stats(m) {
                None => bad.push(format!("{} {}: table statistics missing", g.group, m.label())),
                Some(t) => {
                    for mode in QueryMode::ALL {
                        let (a, b) = (t.mode(mode), fresh.mode(mode));
                        if a.accuracy != b.accuracy
                            || !close_opt(a.rmse_pct, b.rmse_pct)
                            || !close_opt(a.sd_pct, b.sd_pct)
                        {
                            bad.push(format!("{} {} {}: table statistics", g.group, m.label(), mode.label()));
                        }
                    }
                }
            }
        }
    }

    let fresh = anova_entries(&report.groups);
    if fresh.len() != report.anova.len() {
        bad.push("ANOVA entry count".into());
    }
    for (a, b) in report.anova.iter().zip(&fresh) {
        let ok = match (&a.outcome, &b.outcome) {
            (TestOutcome::Ok { result: x }, TestOutcome::Ok { result: y }) => {
                close(x.f_stat, y.f_stat) && close(x.p_value, y.p_value) && x.df_between == y.df_between
            }
            (TestOutcome::Degenerate { .. }, TestOutcome::Degenerate { .. }) => true,
            _ => false,
        };
        if !ok || a.metric != b.metric || a.mode != b.mode {
            bad.push(format!("ANOVA {} {}", a.metric.label(), a.mode.label()));
        }
    }

    let cfg = BenchConfig {
        band_pct: band,
        summary_ai_group: report.summary.ai_group,
        usability_ai_group: report.summary.usability_ai_group,
        ..BenchConfig::default()
    };
    if let Some(u) = &report.usability {
        for g in &u.groups {
            for c in &g.cases {
                if c.skipped.is_some() && c.matches.is_empty() {
                    continue;
                }
                let items: Vec<String> = c.answers.iter().flat_map(|a| answer_items(&a.raw_text)).collect();
                let freq = scorer.lemma_frequencies(items.iter().map(String::as_str));
                let stored: std::collections::BTreeMap<String, u32> = c
                    .matches
                    .iter()
                    .map(|m| (m.predicted_lemma.clone(), m.frequency))
                    .collect();
                if freq != stored {
                    bad.push(format!("usability {} case {}: lemma frequencies", g.group, c.case_id));
                }
            }
            let all: Vec<_> = g.cases.iter().flat_map(|c| c.matches.iter().cloned()).collect();
            match similarity_distribution(&all, u.bin_width) {
                Ok(h) if h == g.histogram => {}
                _ => bad.push(format!("usability {}: histogram", g.group)),
            }
            if !close_opt(g.overall_similarity, overall_similarity(all.iter()).ok()) {
                bad.push(format!("usability {}: overall similarity", g.group));
            }
        }
        let fresh = t_test_entry(&u.groups, cfg.usability_ai_group);
        let same = match (&u.t_test, &fresh) {
            (None, None) => true,
            (Some(a), Some(b)) => match (&a.outcome, &b.outcome) {
                (TestOutcome::Ok { result: x }, TestOutcome::Ok { result: y }) => {
                    close(x.t_stat, y.t_stat) && close(x.p_value_two_sided, y.p_value_two_sided)
                }
                (TestOutcome::Degenerate { .. }, TestOutcome::Degenerate { .. }) => true,
                _ => false,
            },
            _ => false,
        };
        if !same {
            bad.push("usability t-test".into());
        }
    }
    let summary = summarize(&report.groups, report.usability.as_ref(), &cfg);
    let s = &report.summary;
    if summary.cost != s.cost
        || summary.performance != s.performance
        || !close_opt(summary.usability.ai, s.usability.ai)
        || !close_opt(summary.usability.human, s.usability.human)
    {
        bad.push("summary".into());
    }
    bad
}

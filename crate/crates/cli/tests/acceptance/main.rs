//! Acceptance criteria P1 to P11. Prints one PASS or FAIL line per criterion
//! and exits non-zero if any fails.

mod fixtures;
mod service;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, FisherSnedecor, StudentsT};

use protopredict::assets;
use protopredict::gateway::{DesignBrief, Gateway, MockProfile, NumericTarget, Task};
use protopredict::predictor::Predictor;
use protopredict::report::{
    accuracy_table, run_benchmark, BenchConfig, Group, GroupSource, Metric, PredictionRecord, QueryMode,
};
use protopredict::retrieval::{build_index, Chunk, HashEmbedder, VectorIndex};
use protopredict::seed::derive_seed;
use protopredict::statlab::{
    self, approximation_error, f_survival, group_point_error, one_way_anova, regularized_incomplete_beta, rmse_percent,
    sample_sd, welch_t_test, within_band, AccuracyCount,
};
use protopredict::usability::{
    lemmatize, match_keywords, overall_similarity, similarity_distribution, KeywordMatch, TOP_N,
};

const BIN: &str = env!("CARGO_BIN_EXE_protopredict");

type Check = fn() -> Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn main() {
    let criteria: [(&str, &str, u64, Check); 11] = [
        ("P1", "ground-truth fidelity", 1, p1),
        ("P2", "metric oracle suite", 1, p2),
        ("P3", "ANOVA and t-test oracle equivalence", 5, p3),
        ("P4", "incomplete beta accuracy", 5, p4),
        ("P5", "crowd-emulation convergence", 60, p5),
        ("P6", "ablation ordering", 120, p6),
        ("P7", "50% band accuracy", 1, p7),
        ("P8", "retrieval exactness", 30, p8),
        ("P9", "usability pipeline", 10, p9),
        ("P10", "end-to-end determinism", 120, p10),
        ("P11", "CLI and service contract", 60, p11),
    ];

    let last_panic = Arc::new(Mutex::new(String::new()));
    let sink = last_panic.clone();
    std::panic::set_hook(Box::new(move |info| {
        let msg = info
            .payload()
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| info.payload().downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        let at = info
            .location()
            .map(|l| format!(" at {}:{}", l.file(), l.line()))
            .unwrap_or_default();
        *sink.lock().unwrap() = format!("panic: {msg}{at}");
    }));

    let mut failed = 0;
    for (id, name, budget_s, check) in criteria {
        let start = Instant::now();
        let outcome = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(_) => Err(last_panic.lock().unwrap().clone()),
        };
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if elapsed > Duration::from_secs(budget_s) {
                Err(format!("took {:.2}s, budget {budget_s}s", elapsed.as_secs_f64()))
            } else {
                Ok(())
            }
        });
        match outcome {
            Ok(()) => println!("{id} PASS {name} ({:.2}s)", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL {name} ({:.2}s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

/// Costs and performance values of the twelve benchmark designs.
const GROUND_TRUTH: [(u32, i64, f64, &str); 12] = [
    (1, 1980, 50.0, "lumens"),
    (2, 31000, 750.0, "ml/kg"),
    (3, 13000, 162.0, "N/mm"),
    (4, 1405, 2.0, "mm tolerance"),
    (5, 200000, 82.7, "N"),
    (6, 12000, 10.0, "CFM"),
    (7, 60125, 1.5, "h"),
    (8, 448925, 3600.0, "g"),
    (9, 150000, 60.0, "km/h"),
    (10, 30000, 11.0, "mins"),
    (11, 4288, 21.97, "N"),
    (12, 12000, 40.0, "%"),
];

fn p1() -> Result<(), String> {
    let cases = assets::bench_cases();
    ensure!(cases.len() == 12, "expected 12 cases, got {}", cases.len());
    for (case, (id, cents, perf, unit)) in cases.iter().zip(GROUND_TRUTH) {
        ensure!(case.case_id == id, "case order: expected {id}, got {}", case.case_id);
        ensure!(
            case.ground_truth_cost.cents() == cents,
            "case {id} cost {} cents",
            case.ground_truth_cost.cents()
        );
        let p = &case.ground_truth_performance;
        ensure!(
            p.value == perf && p.unit == unit,
            "case {id} performance {} {}",
            p.value,
            p.unit
        );
    }
    Ok(())
}

fn p2() -> Result<(), String> {
    const TOL: f64 = 1e-9;
    ensure!(fixtures::METRIC_FIXTURES.len() >= 20, "too few fixtures");
    for (i, f) in fixtures::METRIC_FIXTURES.iter().enumerate() {
        let errors: Vec<f64> = f
            .predictions
            .iter()
            .map(|p| approximation_error(*p, f.truth).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        for (got, want) in errors.iter().zip(f.errors) {
            ensure!(rel_close(*got, *want, TOL), "fixture {i}: error {got} vs {want}");
        }
        let rmse = rmse_percent(&errors).map_err(|e| e.to_string())?;
        ensure!(rel_close(rmse, f.rmse, TOL), "fixture {i}: rmse {rmse} vs {}", f.rmse);
        let gpe = group_point_error(f.predictions, f.truth).map_err(|e| e.to_string())?;
        ensure!(
            rel_close(gpe, f.group_point_error, TOL),
            "fixture {i}: group error {gpe} vs {}",
            f.group_point_error
        );
        let sd = sample_sd(f.predictions).map_err(|e| e.to_string())?;
        ensure!(rel_close(sd, f.sd, TOL), "fixture {i}: sd {sd} vs {}", f.sd);
    }

    let thirty = fixtures::METRIC_FIXTURES
        .iter()
        .find(|f| f.predictions.len() == 30)
        .ok_or("no N=30 fixture")?;
    let sum_sq: f64 = thirty.errors.iter().map(|e| e * e).sum();
    let by_formula = (sum_sq / 30.0).sqrt();
    let got = rmse_percent(thirty.errors).map_err(|e| e.to_string())?;
    ensure!(
        rel_close(got, by_formula, TOL),
        "N=30 rmse {got} vs sqrt(sum/30) {by_formula}"
    );
    Ok(())
}

fn ref_anova(groups: &[Vec<f64>]) -> (f64, f64, f64, f64) {
    let k = groups.len() as f64;
    let n: f64 = groups.iter().map(|g| g.len() as f64).sum();
    let grand: f64 = groups.iter().flatten().sum::<f64>() / n;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let m = g.iter().sum::<f64>() / g.len() as f64;
        ssb += g.len() as f64 * (m - grand).powi(2);
        ssw += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    let (d1, d2) = (k - 1.0, n - k);
    let f = (ssb / d1) / (ssw / d2);
    let p = FisherSnedecor::new(d1, d2).unwrap().sf(f);
    (f, d1, d2, p)
}

fn ref_welch(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let stats = |x: &[f64]| {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        (n, m, v / n)
    };
    let ((na, ma, sa), (nb, mb, sb)) = (stats(a), stats(b));
    let t = (ma - mb) / (sa + sb).sqrt();
    let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let p = 2.0 * StudentsT::new(0.0, 1.0, df).unwrap().sf(t.abs());
    (t, df, p)
}

fn p3() -> Result<(), String> {
    const TOL: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..50 {
        let k = rng.random_range(2..=4);
        let groups: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let n = rng.random_range(2..=8);
                let shift = rng.random_range(-5.0..5.0);
                (0..n).map(|_| shift + rng.random_range(-10.0..10.0)).collect()
            })
            .collect();
        let got = one_way_anova(&groups).map_err(|e| format!("dataset {i}: {e}"))?;
        let (f, d1, d2, p) = ref_anova(&groups);
        ensure!(rel_close(got.f_stat, f, TOL), "dataset {i}: F {} vs {f}", got.f_stat);
        ensure!(
            got.df_between as f64 == d1 && got.df_within as f64 == d2,
            "dataset {i}: df"
        );
        ensure!(
            (got.p_value - p).abs() <= TOL,
            "dataset {i}: anova p {} vs {p}",
            got.p_value
        );

        let (a, b) = (&groups[0], &groups[1]);
        let got = welch_t_test(a, b).map_err(|e| format!("dataset {i}: {e}"))?;
        let (t, df, p) = ref_welch(a, b);
        ensure!(rel_close(got.t_stat, t, TOL), "dataset {i}: t {} vs {t}", got.t_stat);
        ensure!(rel_close(got.df, df, TOL), "dataset {i}: welch df {} vs {df}", got.df);
        ensure!(
            (got.p_value_two_sided - p).abs() <= TOL,
            "dataset {i}: t p {} vs {p}",
            got.p_value_two_sided
        );
    }

    let closed = (6.0f64 / 13.0).powi(3);
    let p = f_survival(3.5, 2.0, 6.0).map_err(|e| e.to_string())?;
    ensure!(
        (p - closed).abs() <= 1e-10,
        "f_survival(3.5, 2, 6) = {p}, want {closed}"
    );
    // Means 0, 1, 3 and within-group sums of squares 2, 2, 8 give F = 3.5 on (2, 6).
    let groups = vec![vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 2.0], vec![1.0, 3.0, 5.0]];
    let r = one_way_anova(&groups).map_err(|e| e.to_string())?;
    ensure!((r.f_stat - 3.5).abs() <= 1e-10, "F = {}", r.f_stat);
    ensure!(
        (r.df_between, r.df_within) == (2, 6),
        "df = ({}, {})",
        r.df_between,
        r.df_within
    );
    ensure!((r.p_value - closed).abs() <= 1e-10, "p = {}, want {closed}", r.p_value);
    Ok(())
}

/// I_x(a, b) for integer b: x^a * sum_{j<b} (a)_j (1-x)^j / j!.
fn ibeta_integer_b(x: f64, a: f64, b: u32) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..b {
        let j = j as f64;
        term *= (a + j - 1.0) * (1.0 - x) / j;
        sum += term;
    }
    x.powf(a) * sum
}

fn p4() -> Result<(), String> {
    const TOL: f64 = 1e-10;
    let others = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 7.25, 12.0, 30.0];
    let grid: Vec<f64> = (1..=1000).map(|i| i as f64 / 1001.0).collect();
    for small in [1u32, 2, 3] {
        for &other in &others {
            for &x in &grid {
                let want = ibeta_integer_b(x, other, small);
                let got = regularized_incomplete_beta(x, other, small as f64).map_err(|e| e.to_string())?;
                ensure!(
                    (got - want).abs() <= TOL,
                    "I_{x}({other}, {small}) = {got}, want {want}"
                );
                let want = 1.0 - ibeta_integer_b(1.0 - x, other, small);
                let got = regularized_incomplete_beta(x, small as f64, other).map_err(|e| e.to_string())?;
                ensure!(
                    (got - want).abs() <= TOL,
                    "I_{x}({small}, {other}) = {got}, want {want}"
                );
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let (x, a, b) = (
            rng.random_range(0.0..1.0),
            rng.random_range(0.1..40.0),
            rng.random_range(0.1..40.0),
        );
        let lhs = regularized_incomplete_beta(x, a, b).map_err(|e| e.to_string())?;
        let rhs = 1.0 - regularized_incomplete_beta(1.0 - x, b, a).map_err(|e| e.to_string())?;
        ensure!(
            (lhs - rhs).abs() <= TOL,
            "symmetry fails at x={x}, a={a}, b={b}: {lhs} vs {rhs}"
        );
    }
    Ok(())
}

fn brief() -> DesignBrief {
    DesignBrief::from_case(&assets::bench_cases()[0])
}

fn p5() -> Result<(), String> {
    const NOISE: f64 = 0.30;
    const N: usize = 30;
    const RUNS: u64 = 200;
    let truth = 19.80;
    let profile = MockProfile {
        cost: Some(NumericTarget {
            target: truth,
            noise_sd: NOISE,
        }),
        ..MockProfile::default()
    };
    let predictor = Predictor::new(Gateway::mock(profile)).with_retrieval(false);
    let brief = brief();
    let mut rel_means = Vec::new();
    let mut multi_wins = 0;
    for run in 0..RUNS {
        let agg = predictor
            .predict_many(&brief, Task::Cost, None, N, 8, derive_seed(5, &[run]))
            .map_err(|e| e.to_string())?;
        let values = agg.values();
        ensure!(values.len() == N, "run {run}: {} parseable samples", values.len());
        let errors: Vec<f64> = values.iter().map(|v| approximation_error(*v, truth).unwrap()).collect();
        let single = rmse_percent(&errors).unwrap();
        let multi = group_point_error(&values, truth).unwrap();
        if multi < single {
            multi_wins += 1;
        }
        rel_means.push(statlab::mean(&values).unwrap() / truth);
    }
    let expected = NOISE / (N as f64).sqrt();
    let sd = sample_sd(&rel_means).unwrap();
    ensure!(
        (sd - expected).abs() <= 0.25 * expected,
        "SD of the mean {sd:.5}, expected {expected:.5} within 25%"
    );
    let share = multi_wins as f64 / RUNS as f64;
    ensure!(
        share >= 0.95,
        "multi-query error beat single-query RMSE in only {:.1}% of runs",
        100.0 * share
    );
    Ok(())
}

fn p6() -> Result<(), String> {
    let cases = assets::bench_cases();
    let cfg = BenchConfig {
        n: 30,
        seed: 42,
        ..BenchConfig::default()
    };
    let scorer = assets::default_scorer();
    let run = || run_benchmark(&cases, &assets::demo_sources(), &cfg, &scorer).map_err(|e| e.to_string());
    let (a, b) = (run()?, run()?);
    ensure!(
        a.canonical_json() == b.canonical_json(),
        "benchmark is not deterministic under a fixed seed"
    );
    for metric in Metric::ALL {
        for mode in QueryMode::ALL {
            let rmse = |g: Group| -> Result<f64, String> {
                a.group(g)
                    .and_then(|r| r.table_stats(metric))
                    .and_then(|s| s.mode(mode).rmse_pct)
                    .ok_or_else(|| format!("no {mode:?} {metric:?} RMSE for {g}"))
            };
            let (rag, gpt, human) = (rmse(Group::GptRag)?, rmse(Group::Gpt)?, rmse(Group::Human)?);
            ensure!(
                rag < gpt && gpt < human,
                "{metric:?} {mode:?}: gpt_rag {rag:.2} gpt {gpt:.2} human {human:.2}"
            );
        }
    }
    Ok(())
}

fn perfect_records() -> Vec<PredictionRecord> {
    let mut out = Vec::new();
    for c in assets::bench_cases() {
        for r in 0..3 {
            let perf = &c.ground_truth_performance;
            for (task, value, unit) in [
                (Task::Cost, c.ground_truth_cost.dollars(), "USD".to_string()),
                (Task::Performance, perf.value, perf.unit.clone()),
            ] {
                out.push(PredictionRecord {
                    group: Group::Human,
                    case_id: c.case_id,
                    respondent_or_seed: format!("r{r}"),
                    task,
                    raw_text: format!("{value}"),
                    parsed_value: Some(value),
                    unit: Some(unit),
                });
            }
        }
    }
    out
}

fn p7() -> Result<(), String> {
    ensure!(within_band(50.0, 50.0), "+50.0 must lie inside the band");
    ensure!(!within_band(-50.01, 50.0), "-50.01 must lie outside the band");
    ensure!(within_band(-50.0, 50.0), "-50.0 must lie inside the band");
    ensure!(
        AccuracyCount { k: 12, n: 12 }.to_string() == "12/12 (100%)",
        "count formatting"
    );
    ensure!(
        AccuracyCount { k: 8, n: 12 }.to_string() == "8/12 (67%)",
        "count formatting"
    );

    let src = GroupSource::recorded(Group::Human, "perfect.csv", perfect_records());
    let cfg = BenchConfig {
        n: 3,
        ..BenchConfig::default()
    };
    let report =
        run_benchmark(&assets::bench_cases(), &[src], &cfg, &assets::default_scorer()).map_err(|e| e.to_string())?;
    let table = accuracy_table(&report).map_err(|e| e.to_string())?;
    let rows: BTreeMap<&str, Vec<&str>> = table
        .lines()
        .skip(1)
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            (cells[0], cells[1..].to_vec())
        })
        .collect();
    for metric in ["Cost", "Performance"] {
        let row = rows
            .get(format!("{metric} – Average Accuracy").as_str())
            .ok_or("accuracy row missing")?;
        ensure!(
            row[4] == "12/12 (100%)" && row[5] == "12/12 (100%)",
            "{metric} human cells {:?}",
            &row[4..]
        );
        let rmse = rows
            .get(format!("{metric} – RMSE").as_str())
            .ok_or("rmse row missing")?;
        ensure!(
            rmse[4] == "0%" && rmse[5] == "0%",
            "{metric} perfect RMSE cells {:?}",
            &rmse[4..]
        );
    }
    Ok(())
}

fn brute_force(index: &VectorIndex, query: &str, k: usize) -> Vec<(String, u32, f64)> {
    let q = index.embed_query(query).unwrap();
    let qn = q.components().iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut scored: Vec<(String, u32, f64)> = index
        .chunks()
        .iter()
        .zip(index.vectors())
        .map(|(c, v)| {
            let vn = v.components().iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = q.components().iter().zip(v.components()).map(|(a, b)| a * b).sum();
            let s = if qn == 0.0 || vn == 0.0 { 0.0 } else { dot / (qn * vn) };
            (c.doc_id.clone(), c.seq, s)
        })
        .collect();
    scored.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| (&a.0, a.1).cmp(&(&b.0, b.1))));
    scored.truncate(k);
    scored
}

const WORDS: [&str; 40] = [
    "motor",
    "gear",
    "battery",
    "frame",
    "sensor",
    "light",
    "pump",
    "valve",
    "spring",
    "panel",
    "solar",
    "fan",
    "nozzle",
    "hinge",
    "cable",
    "switch",
    "wheel",
    "axle",
    "bracket",
    "clamp",
    "filter",
    "hood",
    "blade",
    "rotor",
    "crank",
    "lever",
    "pulley",
    "belt",
    "shaft",
    "bearing",
    "magnet",
    "coil",
    "lens",
    "mirror",
    "foam",
    "strap",
    "buckle",
    "handle",
    "trigger",
    "capacitor",
];

fn p8() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for corpus in 0..100 {
        let dim = rng.random_range(16..=128);
        let embedder = Arc::new(HashEmbedder::new(dim, rng.random()).map_err(|e| e.to_string())?);
        let n_chunks = rng.random_range(1..=1000);
        let chunks: Vec<Chunk> = (0..n_chunks)
            .map(|i| {
                let len = rng.random_range(1..=12);
                let text: Vec<&str> = (0..len).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
                Chunk {
                    doc_id: format!("doc-{:03}", i / 4),
                    seq: (i % 4) as u32,
                    text: text.join(" "),
                    unit_count: len,
                }
            })
            .collect();
        let index = build_index(chunks, embedder).map_err(|e| e.to_string())?;
        let reloaded = VectorIndex::from_json(&index.to_json()).map_err(|e| e.to_string())?;
        for q in 0..5 {
            let k = rng.random_range(1..=10);
            let query: Vec<&str> = (0..3).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect();
            let query = query.join(" ");
            let hits = index.query_top_k(&query, k).map_err(|e| e.to_string())?;
            let want = brute_force(&index, &query, k);
            ensure!(
                hits.len() == want.len(),
                "corpus {corpus} query {q}: {} hits, want {}",
                hits.len(),
                want.len()
            );
            for (h, w) in hits.iter().zip(&want) {
                ensure!(
                    h.chunk.doc_id == w.0 && h.chunk.seq == w.1 && (h.score - w.2).abs() <= 1e-12,
                    "corpus {corpus} query {q}: hit {}#{} {} vs {}#{} {}",
                    h.chunk.doc_id,
                    h.chunk.seq,
                    h.score,
                    w.0,
                    w.1,
                    w.2
                );
            }
            let again = reloaded.query_top_k(&query, k).map_err(|e| e.to_string())?;
            ensure!(
                again == hits,
                "corpus {corpus} query {q}: hits changed after save and load"
            );
        }
        let pick = &index.chunks()[rng.random_range(0..index.len())];
        let top = index.query_top_k(&pick.text, 1).map_err(|e| e.to_string())?;
        ensure!(
            top[0].score >= 0.999,
            "corpus {corpus}: self-retrieval score {}",
            top[0].score
        );
    }
    Ok(())
}

fn random_matches(rng: &mut ChaCha8Rng) -> Vec<KeywordMatch> {
    let n = rng.random_range(1..=15);
    (0..n)
        .map(|i| KeywordMatch {
            predicted_lemma: format!("w{i:02}"),
            best_truth_lemma: "t".into(),
            similarity: if rng.random_bool(0.2) {
                100.0
            } else {
                (rng.random_range(0.0..100.0f64) * 4.0).round() / 4.0
            },
            frequency: rng.random_range(1..=9),
            flagged: rng.random_bool(0.5),
        })
        .collect()
}

fn p9() -> Result<(), String> {
    let scorer = assets::default_scorer();
    for case in assets::bench_cases()
        .iter()
        .filter(|c| !c.ground_truth_keywords.is_empty())
    {
        let items: Vec<&str> = case.ground_truth_keywords.iter().map(String::as_str).collect();
        let matches = scorer
            .score(items, &case.ground_truth_keywords)
            .map_err(|e| e.to_string())?;
        let score = overall_similarity(&matches).map_err(|e| e.to_string())?;
        ensure!(score == 100.0, "case {}: identity keywords score {score}", case.case_id);
    }

    let mut vocab: Vec<String> = assets::bench_cases()
        .iter()
        .flat_map(|c| scorer.truth_lemmas(&c.ground_truth_keywords))
        .chain(WORDS.iter().map(|w| w.to_string()))
        .collect();
    vocab.sort();
    vocab.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for fixture in 0..50 {
        let matches = random_matches(&mut rng);
        let hist = similarity_distribution(&matches, 10).map_err(|e| e.to_string())?;
        let mass: u64 = hist.iter().map(|b| b.frequency).sum();
        let want: u64 = matches.iter().map(|m| m.frequency as u64).sum();
        ensure!(mass == want, "fixture {fixture}: histogram mass {mass}, want {want}");

        let freq: BTreeMap<String, u32> = (0..rng.random_range(1..=12))
            .map(|_| (vocab[rng.random_range(0..vocab.len())].clone(), rng.random_range(1..=5)))
            .collect();
        let truth: Vec<String> = (0..rng.random_range(1..=5))
            .map(|_| vocab[rng.random_range(0..vocab.len())].clone())
            .collect();
        let ranked = match_keywords(&freq, &truth, &scorer.vectors).map_err(|e| e.to_string())?;
        let mut brute = ranked.clone();
        brute.sort_by(|a, b| {
            b.similarity
                .partial_cmp(&a.similarity)
                .unwrap()
                .then(a.predicted_lemma.cmp(&b.predicted_lemma))
        });
        let top: Vec<&str> = brute.iter().take(TOP_N).map(|m| m.predicted_lemma.as_str()).collect();
        let flagged: Vec<&str> = ranked
            .iter()
            .filter(|m| m.flagged)
            .map(|m| m.predicted_lemma.as_str())
            .collect();
        ensure!(
            top == flagged,
            "fixture {fixture}: flagged {flagged:?}, brute-force top {top:?}"
        );

        let flagged: Vec<&KeywordMatch> = matches.iter().filter(|m| m.flagged).collect();
        if !flagged.is_empty() {
            let num: f64 = flagged.iter().map(|m| m.similarity * m.frequency as f64).sum();
            let den: f64 = flagged.iter().map(|m| m.frequency as f64).sum();
            let got = overall_similarity(&matches).map_err(|e| e.to_string())?;
            ensure!(
                rel_close(got, num / den, 1e-9),
                "fixture {fixture}: overall {got}, oracle {}",
                num / den
            );
        }
    }

    let hand = [
        (vec![(90.0, 2, true), (60.0, 1, true), (30.0, 5, false)], 80.0),
        (vec![(100.0, 1, true), (50.0, 3, true), (0.0, 1, true)], 250.0 / 5.0),
        (vec![(72.5, 4, true)], 72.5),
    ];
    for (i, (ms, want)) in hand.iter().enumerate() {
        let ms: Vec<KeywordMatch> = ms
            .iter()
            .enumerate()
            .map(|(j, (s, f, fl))| KeywordMatch {
                predicted_lemma: format!("h{j}"),
                best_truth_lemma: "t".into(),
                similarity: *s,
                frequency: *f,
                flagged: *fl,
            })
            .collect();
        let got = overall_similarity(&ms).map_err(|e| e.to_string())?;
        ensure!(rel_close(got, *want, 1e-9), "hand fixture {i}: {got} vs {want}");
    }

    let lex = &scorer.lemmas;
    ensure!(!lex.is_empty(), "bundled lexicon is empty");
    for (form, lemma) in lex.entries() {
        ensure!(lemmatize(lemma, lex) == lemma, "lemma {lemma:?} is not a fixed point");
        let once = lemmatize(form, lex);
        ensure!(lemmatize(&once, lex) == once, "lemmatize is not idempotent on {form:?}");
    }
    Ok(())
}

fn bench_cli(out: &Path) -> Result<(), String> {
    let o = Command::new(BIN)
        .args(["bench", "--n", "30", "--seed", "42", "--out"])
        .arg(out)
        .env_remove("PROTOPREDICT_DATA_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        o.status.success(),
        "bench failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    Ok(())
}

fn p10() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    bench_cli(&a)?;
    bench_cli(&b)?;
    let files = [
        "accuracy_table.csv",
        "anova_table.csv",
        "err_cost.csv",
        "err_perf.csv",
        "rmse_cost.csv",
        "rmse_perf.csv",
        "usability_hist.csv",
        "summary_bars.csv",
    ];
    for f in files {
        let x = std::fs::read(a.join(f)).map_err(|e| format!("{f}: {e}"))?;
        let y = std::fs::read(b.join(f)).map_err(|e| format!("{f}: {e}"))?;
        ensure!(!x.is_empty() && x == y, "{f} differs between runs");
    }

    let bars = assets::published_summary().to_csv();
    let rows: Vec<&str> = bars.lines().skip(1).collect();
    ensure!(
        rows == ["cost,67,33", "performance,58,33", "usability,72,81"],
        "summary bars from the published constants: {rows:?}"
    );
    Ok(())
}

/// Arguments, extra environment and expected exit code.
type ExitCase<'a> = (&'a [&'a str], &'a [(&'a str, &'a str)], i32);

fn p11() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let brief = dir.path().join("brief.json");
    std::fs::write(&brief, serde_json::to_string(&brief_json()).unwrap()).map_err(|e| e.to_string())?;
    let b = brief.to_str().unwrap();
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let dead = format!("http://127.0.0.1:{port}");
    let missing = dir.path().join("missing.json");
    let cases: [ExitCase; 4] = [
        (&["predict", "--brief", b, "--task", "cost", "--bogus"], &[], 1),
        (&["predict", "--brief", b, "--task", "performance"], &[], 1),
        (
            &["predict", "--brief", missing.to_str().unwrap(), "--task", "cost"],
            &[],
            2,
        ),
        (
            &[
                "predict",
                "--brief",
                b,
                "--task",
                "cost",
                "--backend",
                "remote",
                "--no-retrieval",
            ],
            &[("PROTOPREDICT_LLM_BASE_URL", dead.as_str())],
            3,
        ),
    ];
    for (args, env, code) in cases {
        let o = Command::new(BIN)
            .args(args)
            .envs(env.iter().copied())
            .env_remove("PROTOPREDICT_BACKEND")
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(
            o.status.code() == Some(code),
            "{args:?}: exit {:?}, want {code}",
            o.status.code()
        );
        let err = String::from_utf8_lossy(&o.stderr);
        let lines: Vec<&str> = err.lines().collect();
        ensure!(lines.len() == 1, "{args:?}: stderr is not a single line: {err}");
        let v: serde_json::Value = serde_json::from_str(lines[0]).map_err(|e| format!("{args:?}: {e}"))?;
        ensure!(v["error"]["exit_code"] == code, "{args:?}: error line {v}");
    }
    service::golden_suite()
}

fn brief_json() -> serde_json::Value {
    serde_json::to_value(brief()).unwrap()
}

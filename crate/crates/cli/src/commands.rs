use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};

use protopredict::assets;
use protopredict::corpus::{load_benchmark_cases, parse_project_records, DesignCase};
use protopredict::gateway::{DesignBrief, Gateway, MockProfile, RemoteBackend, RemoteConfig, Task};
use protopredict::predictor::{AggregatedPrediction, Predictor, DEFAULT_PARALLELISM};
use protopredict::report::{
    self, audit, load_sources, run_benchmark, score_usability_records, write_bench_outputs, BenchConfig,
    BenchmarkReport, Figure, Group, Table,
};
use protopredict::retrieval::{build_corpus_index, ChunkConfig, HashEmbedder, VectorIndex, DEFAULT_K};
use protopredict::usability::{load_word_vectors, LemmaLexicon, Stopwords, UsabilityScorer, DEFAULT_BIN_WIDTH};
use protopredict_service::{AppState, ServiceConfig, Store};

use crate::error::CliError;
use crate::{
    Backend, BenchArgs, Cli, Command, Format, IndexArgs, IngestArgs, PredictArgs, ReportArgs, ServeArgs, UsabilityArgs,
};

const DATA_DIR_ENV: &str = "PROTOPREDICT_DATA_DIR";
const INDEX_ENV: &str = "PROTOPREDICT_INDEX";
const BACKEND_ENV: &str = "PROTOPREDICT_BACKEND";
const PROFILE_ENV: &str = "PROTOPREDICT_PROFILE";

pub fn run(cli: Cli) -> Result<(), CliError> {
    let out = match cli.command {
        Command::Ingest(a) => ingest(a, cli.format)?,
        Command::Index(a) => index(a, cli.format)?,
        Command::Predict(a) => predict(a, cli.format)?,
        Command::Bench(a) => bench(a, cli.format)?,
        Command::Usability(a) => usability(a, cli.format)?,
        Command::Report(a) => report_cmd(a, cli.format)?,
        Command::Serve(a) => return serve(a),
    };
    print!("{out}");
    if !out.ends_with('\n') {
        println!();
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::data(path.display(), e))
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("output serializes")
}

fn load_cases(path: Option<&Path>) -> Result<Vec<DesignCase>, CliError> {
    match path {
        None => Ok(assets::bench_cases()),
        Some(p) => load_benchmark_cases(read(p)?.as_bytes()).map_err(|e| CliError::data(p.display(), e)),
    }
}

fn ingest(a: IngestArgs, format: Format) -> Result<String, CliError> {
    let text = read(&a.corpus)?;
    let parsed = parse_project_records(text.as_bytes(), a.strict).map_err(|e| CliError::data(a.corpus.display(), e))?;
    let ids: Vec<&str> = parsed.records.iter().map(|r| r.id.as_str()).collect();
    if format == Format::Json {
        return Ok(to_json(&json!({
            "accepted": ids.len(),
            "records": ids,
            "rejected": parsed.rejected,
        })));
    }
    let mut s = format!("accepted {} record(s), rejected {}\n", ids.len(), parsed.rejected.len());
    for r in &parsed.rejected {
        let id = r.id.as_deref().unwrap_or("?");
        let _ = writeln!(s, "rejected record {} ({id}): {}", r.index, r.reason);
    }
    Ok(s)
}

fn index(a: IndexArgs, format: Format) -> Result<String, CliError> {
    let text = read(&a.corpus)?;
    let records = parse_project_records(text.as_bytes(), false)
        .map_err(|e| CliError::data(a.corpus.display(), e))?
        .records;
    let embedder = Arc::new(HashEmbedder::new(a.dim, a.seed).map_err(|e| CliError::Usage(format!("--dim: {e}")))?);
    let cfg = ChunkConfig {
        max_units: a.max_units,
        overlap: a.overlap,
    };
    cfg.validate()
        .map_err(|e| CliError::Usage(format!("--max-units/--overlap: {e}")))?;
    let idx = build_corpus_index(&records, embedder, cfg)?;
    idx.save(&a.out).map_err(|e| CliError::data(a.out.display(), e))?;
    if format == Format::Json {
        return Ok(to_json(&json!({
            "out": a.out,
            "records": records.len(),
            "chunks": idx.len(),
            "dim": idx.dim(),
            "seed": a.seed,
        })));
    }
    Ok(format!(
        "indexed {} chunk(s) from {} record(s), dim {}, into {}\n",
        idx.len(),
        records.len(),
        idx.dim(),
        a.out.display()
    ))
}

/// A design brief, or a benchmark case whose refined context becomes the brief.
fn load_brief(path: &Path) -> Result<DesignBrief, CliError> {
    let v: Value = serde_json::from_str(&read(path)?).map_err(|e| CliError::data(path.display(), e))?;
    let v = match v.get("refined_context") {
        Some(ctx) => {
            let mut ctx = ctx.clone();
            if let (Some(img), Some(obj)) = (v.get("image_ref"), ctx.as_object_mut()) {
                obj.insert("image_ref".into(), img.clone());
            }
            ctx
        }
        None => v,
    };
    let brief: DesignBrief = serde_json::from_value(v).map_err(|e| CliError::data(path.display(), e))?;
    brief.validate().map_err(|e| CliError::data(path.display(), e))?;
    Ok(brief)
}

fn load_index(path: Option<&Path>) -> Result<Arc<VectorIndex>, CliError> {
    match path {
        None => Ok(assets::default_index()),
        Some(p) => Ok(Arc::new(
            VectorIndex::load(p).map_err(|e| CliError::data(p.display(), e))?,
        )),
    }
}

fn env_path(var: &str) -> Option<PathBuf> {
    std::env::var_os(var).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn gateway(backend: Backend, profile: Option<&Path>) -> Result<Gateway, CliError> {
    match backend {
        Backend::Mock => {
            let profile = match profile {
                None => assets::demo_profile(),
                Some(p) => MockProfile::from_json(&read(p)?).map_err(|e| CliError::data(p.display(), e))?,
            };
            Ok(Gateway::mock(profile))
        }
        Backend::Remote => {
            let cfg = RemoteConfig::from_env().map_err(|e| CliError::Usage(e.to_string()))?;
            let backend = RemoteBackend::new(cfg).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Gateway::new(Arc::new(backend)))
        }
    }
}

fn predict(a: PredictArgs, format: Format) -> Result<String, CliError> {
    if a.task == Task::Performance && a.unit.as_deref().is_none_or(|u| u.trim().is_empty()) {
        return Err(CliError::Usage("--unit is required when --task is performance".into()));
    }
    let brief = load_brief(&a.brief)?;
    let gateway = gateway(a.backend, a.profile.as_deref())?;
    let mut predictor = Predictor::new(gateway).with_k(a.k).with_retrieval(!a.no_retrieval);
    if !a.no_retrieval {
        predictor = predictor.with_index(load_index(env_path(INDEX_ENV).as_deref())?);
    }
    let agg = predictor.predict_many(
        &brief,
        a.task,
        a.unit.as_deref(),
        a.n as usize,
        DEFAULT_PARALLELISM,
        a.seed,
    )?;
    Ok(match format {
        Format::Json => to_json(&agg),
        Format::Text => prediction_text(&agg),
    })
}

fn prediction_text(agg: &AggregatedPrediction) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "task         {}", agg.task);
    let _ = writeln!(s, "n            {}", agg.n);
    let _ = writeln!(s, "unparseable  {}", agg.unparseable_count);
    let unit = match agg.task {
        Task::Cost => "USD",
        _ => agg.unit.as_deref().unwrap_or(""),
    };
    if let Some(m) = agg.mean() {
        let _ = writeln!(s, "mean         {m:.4} {unit}");
    }
    if matches!(agg.task, Task::Cost | Task::Performance) {
        match agg.sd() {
            Some(sd) => {
                let _ = writeln!(s, "sd           {sd:.4} {unit}");
            }
            None => {
                let _ = writeln!(s, "sd           n/a");
            }
        }
    }
    let docs: Vec<String> = agg.evidence.iter().map(|e| format!("{}#{}", e.doc_id, e.seq)).collect();
    let _ = writeln!(
        s,
        "evidence     {}",
        if docs.is_empty() {
            "none".into()
        } else {
            docs.join(", ")
        }
    );
    if matches!(agg.task, Task::Usability | Task::Refine) {
        for sample in &agg.samples {
            let _ = writeln!(s, "[{}] {}", sample.index, sample.raw_text.replace('\n', " "));
        }
        for r in agg.samples.iter().filter_map(|x| x.improvement.as_ref()) {
            let _ = writeln!(s, "improvement  {}", r.text);
        }
    }
    s
}

fn bench(a: BenchArgs, format: Format) -> Result<String, CliError> {
    let cases = load_cases(a.cases.as_deref())?;
    let sources = match &a.sources {
        None => assets::demo_sources(),
        Some(p) => load_sources(p)?,
    };
    let cfg = BenchConfig {
        n: a.n as usize,
        seed: a.seed,
        ..BenchConfig::default()
    };
    let scorer = assets::default_scorer();
    let report = run_benchmark(&cases, &sources, &cfg, &scorer)?;
    let problems = audit(&report, &scorer);
    if !problems.is_empty() {
        return Err(CliError::Data(format!(
            "report failed its consistency audit: {}",
            problems.join("; ")
        )));
    }
    let out = match (a.out, env_path(DATA_DIR_ENV)) {
        (Some(o), _) => o,
        (None, Some(d)) => d.join("runs").join(&report.manifest.run_id),
        (None, None) => {
            return Err(CliError::Usage(format!(
                "--out is required when {DATA_DIR_ENV} is unset"
            )))
        }
    };
    let files = write_bench_outputs(&report, &out).map_err(|e| CliError::data(out.display(), e))?;
    if format == Format::Json {
        return Ok(report.to_json());
    }
    let mut s = format!("run {}\n\n", report.manifest.run_id);
    s.push_str(&report::accuracy_table(&report)?);
    s.push('\n');
    s.push_str(&report::anova_table(&report)?);
    s.push('\n');
    s.push_str(&report.summary.to_text());
    let _ = writeln!(s, "\nwrote {} file(s) to {}", files.len(), out.display());
    Ok(s)
}

fn scorer(a: &UsabilityArgs) -> Result<UsabilityScorer, CliError> {
    let mut s = assets::default_scorer();
    if let Some(p) = &a.vectors {
        s.vectors = load_word_vectors(read(p)?.as_bytes())
            .map_err(|e| CliError::data(p.display(), e))?
            .0;
    }
    if let Some(p) = &a.lemmas {
        s.lemmas = LemmaLexicon::parse(&read(p)?).map_err(|e| CliError::data(p.display(), e))?;
    }
    if let Some(p) = &a.stopwords {
        s.stopwords = Stopwords::parse(&read(p)?);
    }
    Ok(s)
}

fn usability(a: UsabilityArgs, format: Format) -> Result<String, CliError> {
    let scorer = scorer(&a)?;
    let cases = load_cases(a.truth.as_deref())?;
    let file = std::fs::File::open(&a.predictions).map_err(|e| CliError::data(a.predictions.display(), e))?;
    let records = report::read_records(file).map_err(|e| CliError::data(a.predictions.display(), e))?;
    let section = score_usability_records(&cases, &records, &scorer, DEFAULT_BIN_WIDTH, Group::GptRag)?;
    if let Some(dir) = &a.out {
        let write = |name: &str, text: String| {
            std::fs::write(dir.join(name), text).map_err(|e| CliError::data(dir.join(name).display(), e))
        };
        std::fs::create_dir_all(dir).map_err(|e| CliError::data(dir.display(), e))?;
        write("usability.json", to_json(&section))?;
        write("usability_matches.csv", section.matches_csv())?;
        write("usability_hist.csv", section.histogram_csv())?;
    }
    if format == Format::Json {
        return Ok(to_json(&section));
    }
    let mut s = String::new();
    for g in &section.groups {
        let scored = g.cases.iter().filter(|c| c.skipped.is_none()).count();
        let score = g.overall_similarity.map_or_else(|| "n/a".into(), |v| format!("{v:.1}"));
        let _ = writeln!(
            s,
            "{:<8} overall similarity {score} over {scored} case(s)",
            g.group.label()
        );
    }
    if let Some(t) = &section.t_test {
        let line = match &t.outcome {
            report::TestOutcome::Ok { result } => format!(
                "t = {:.3}, df = {:.1}, p = {}",
                result.t_stat,
                result.df,
                report::format_p_value(result.p_value_two_sided)
            ),
            report::TestOutcome::Degenerate { reason } => format!("degenerate: {reason}"),
        };
        let _ = writeln!(s, "welch t-test {} vs {}: {line}", t.a.label(), t.b.label());
    }
    Ok(s)
}

fn load_report(path: &Path) -> Result<BenchmarkReport, CliError> {
    let file = if path.is_dir() {
        path.join("report.json")
    } else {
        path.to_owned()
    };
    BenchmarkReport::from_json(&read(&file)?).map_err(|e| CliError::data(file.display(), e))
}

/// A delimited table as `{columns, rows}`.
fn csv_to_json(name: &str, text: &str) -> Result<Value, CliError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let columns: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Data(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_owned).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Data(e.to_string()))?;
    Ok(json!({ "schema": report::REPORT_SCHEMA, "name": name, "columns": columns, "rows": rows }))
}

fn report_cmd(a: ReportArgs, format: Format) -> Result<String, CliError> {
    let report = load_report(&a.input)?;
    let (name, text) = match (&a.figure, &a.table) {
        (Some(f), _) => {
            let fig: Figure = f.parse()?;
            (f.clone(), report::figure_data(&report, fig)?)
        }
        (None, Some(t)) => {
            let table: Table = t.parse()?;
            (t.clone(), table.render(&report)?)
        }
        (None, None) => {
            return Ok(match format {
                Format::Json => report.to_json(),
                Format::Text => format!("run {}\n{}", report.manifest.run_id, report.summary.to_text()),
            })
        }
    };
    Ok(match format {
        Format::Text => text,
        Format::Json => to_json(&csv_to_json(&name, &text)?),
    })
}

fn serve(a: ServeArgs) -> Result<(), CliError> {
    let backend = match std::env::var(BACKEND_ENV).ok().filter(|v| !v.is_empty()) {
        None => Backend::Mock,
        Some(v) => clap::ValueEnum::from_str(&v, true).map_err(|e| CliError::Usage(format!("{BACKEND_ENV}: {e}")))?,
    };
    let gateway = gateway(backend, env_path(PROFILE_ENV).as_deref())?;
    let store = match env_path(DATA_DIR_ENV) {
        None => Store::in_memory(),
        Some(d) => Store::open(&d).map_err(|e| CliError::data(d.display(), e))?,
    };
    let config = ServiceConfig {
        gateway,
        index: load_index(a.index.as_deref())?,
        cases: load_cases(a.cases.as_deref())?,
        store,
        scorer: assets::default_scorer(),
        parallelism: DEFAULT_PARALLELISM,
        k: DEFAULT_K,
    };
    let state = AppState::new(config);
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Data(e.to_string()))?;
    println!("serving protopredict/api-v1 on http://{}", a.addr);
    let served = rt.block_on(protopredict_service::serve(a.addr, state.clone()));
    drop(rt);
    drop(state);
    served.map_err(|e| CliError::Data(format!("serve on {}: {e}", a.addr)))
}

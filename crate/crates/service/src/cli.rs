//! Command-line front end. Exit codes: 0 success, 1 run failure, 2 usage.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};
use vidtriage_core::buzzword::Lexicons;
use vidtriage_core::config::modules;
use vidtriage_core::decision;
use vidtriage_core::eval::{
    compare_deepfake_backends, report, run_ablation, run_eval_with, Dataset, DeepfakeBench,
};
use vidtriage_core::inference::{BackendClient, BackendEndpoint};
use vidtriage_core::record::AnalysisRecord;

use crate::api::{router, AppState};
use crate::runtime::{Options, Runtime};

#[derive(Debug, Parser)]
#[command(name = "vidtriage", version, about = "Checkworthiness triage for short videos")]
pub struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Pipeline config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Replay recorded backend responses instead of calling real services.
    #[arg(long, global = true)]
    fixture_mode: bool,
    /// Fixture directory (default: $VIDTRIAGE_FIXTURES or ./fixtures).
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    /// Switch a module off; repeatable.
    #[arg(long, global = true, value_parser = clap::builder::PossibleValuesParser::new(modules::ALL))]
    disable: Vec<String>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Analysis and report store directory.
    #[arg(long, global = true)]
    store: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze one video file or URL.
    Analyze { source: String },
    /// Evaluate a labelled dataset (JSON lines).
    Eval {
        dataset: PathBuf,
        /// Fail when more than this fraction of records is skipped.
        #[arg(long)]
        max_skipped_fraction: Option<f64>,
        /// Write per-record predictions as CSV.
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Keep the report in the store for the HTTP API.
        #[arg(long)]
        save: bool,
    },
    /// Re-evaluate with each module removed in turn.
    Ablate {
        dataset: PathBuf,
        /// Limit the table to these modules; repeatable.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(modules::ALL))]
        module: Vec<String>,
    },
    /// Compare deepfake backends on a labelled frame bench.
    DeepfakeBench {
        bench: PathBuf,
        /// Endpoint name to compare; repeatable. Defaults to the config list.
        #[arg(long)]
        backend: Vec<String>,
    },
    /// Lexicon utilities.
    Lexicon {
        #[command(subcommand)]
        command: LexiconCommand,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        bind: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum LexiconCommand {
    /// Parse a lexicon file and report problems.
    Validate { file: PathBuf },
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("VIDTRIAGE_LOG")
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .with_ansi(std::io::IsTerminal::is_terminal(&std::io::stderr()))
        .try_init();
    let runtime = match tokio::runtime::Builder::new_multi_thread().enable_all().build() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: cannot start runtime: {e}");
            return 1;
        }
    };
    match runtime.block_on(run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn options(g: &Global) -> Options {
    Options {
        config: g.config.clone(),
        fixture_mode: g.fixture_mode,
        fixtures: g.fixtures.clone(),
        disable: g.disable.clone(),
        store: g.store.clone(),
    }
}

async fn run(cli: Cli) -> anyhow::Result<i32> {
    let opts = options(&cli.global);
    let out = cli.global.output;
    match cli.command {
        Command::Analyze { source } => analyze(&opts, out, &source).await,
        Command::Eval { dataset, max_skipped_fraction, predictions, save } => {
            eval(&opts, out, &dataset, max_skipped_fraction, predictions.as_deref(), save).await
        }
        Command::Ablate { dataset, module } => ablate(&opts, out, &dataset, &module).await,
        Command::DeepfakeBench { bench, backend } => deepfake_bench(&opts, out, &bench, &backend).await,
        Command::Lexicon { command: LexiconCommand::Validate { file } } => lexicon_validate(&file),
        Command::Serve { bind, workers } => serve(&opts, bind, workers).await,
    }
}

fn emit(text: &str) -> anyhow::Result<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        stdout.write_all(b"\n")?;
    }
    stdout.flush()?;
    Ok(())
}

async fn analyze(opts: &Options, out: Output, source: &str) -> anyhow::Result<i32> {
    let rt = Runtime::start(opts, &[]).await?;
    let pipeline = rt.pipeline(Some(rt.store()?))?;
    let analysis = match pipeline.analyze(source).await {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(1);
        }
    };
    match out {
        Output::Json => emit(std::str::from_utf8(&analysis.bytes)?)?,
        Output::Csv => emit(&analysis_csv(&analysis.record))?,
        Output::Text => emit(&analysis_text(&analysis.record, analysis.cached))?,
    }
    Ok(0)
}

fn or_dash(s: Option<&str>) -> &str {
    match s {
        Some(s) if !s.trim().is_empty() => s,
        _ => "-",
    }
}

pub fn analysis_text(r: &AnalysisRecord, cached: bool) -> String {
    let s = &r.signals;
    let mut t = String::new();
    let _ = writeln!(t, "video_id           {}", r.video_id);
    let _ = writeln!(t, "config_digest      {}{}", r.config_digest, if cached { " (cached)" } else { "" });
    let _ = writeln!(t, "duration_s         {:.1}", r.video.duration_s);
    let lang = s.transcript_lang.as_deref().map(|l| format!(" [{l}]")).unwrap_or_default();
    let _ = writeln!(t, "transcript         {}{lang}", or_dash(s.transcript.as_deref()));
    let _ = writeln!(t, "overlay_text       {}", or_dash(s.overlay_text.as_deref()));
    let _ = writeln!(t, "video_summary      {}", or_dash(s.video_summary.as_deref()));
    let _ = writeln!(t, "transcript_verdict {}", s.transcript_verdict.as_str());
    let _ = writeln!(t, "summary_verdict    {}", s.summary_verdict.as_str());
    let _ = writeln!(t, "overlay_verdict    {}", s.overlay_verdict.as_str());
    let hits: Vec<&str> = s.buzzword_hits.iter().map(|h| h.surface.as_str()).collect();
    let _ = writeln!(t, "buzzwords          {}", if hits.is_empty() { "-".into() } else { hits.join(", ") });
    let df = s.deepfake_score.map(|d| format!("{d:.3}")).unwrap_or_else(|| "-".into());
    let _ = writeln!(t, "deepfake_score     {df}");
    if s.claim_results.is_empty() {
        let _ = writeln!(t, "claims             -");
    } else {
        for c in &s.claim_results {
            let _ = writeln!(t, "claim              [{}] {}", c.stance.as_str(), c.claim_text);
        }
    }
    let _ = writeln!(t, "advertisement      {}", if s.is_advertisement { "yes" } else { "no" });
    let _ = writeln!(t, "label              {}", r.result.label);
    t.push('\n');
    t.push_str(&decision::explain(&r.result));
    t
}

fn analysis_csv(r: &AnalysisRecord) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fired: Vec<&str> = r.result.contributions.iter().map(|c| c.signal.as_str()).collect();
    let _ = w.write_record(["video_id", "label", "score", "threshold", "ad_override", "fired", "config_digest"]);
    let _ = w.write_record([
        r.video_id.as_str(),
        r.result.label.as_str(),
        &r.result.score.to_string(),
        &r.result.threshold.to_string(),
        if r.result.ad_override { "true" } else { "false" },
        &fired.join(";"),
        r.config_digest.as_str(),
    ]);
    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
}

/// Store-safe report id from a dataset name and config digest.
fn report_id(dataset: &str, digest: &str) -> String {
    let name: String = dataset
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    format!("{name}-{}", &digest[..digest.len().min(12)])
}

async fn eval(
    opts: &Options,
    out: Output,
    path: &Path,
    max_skipped: Option<f64>,
    predictions: Option<&Path>,
    save: bool,
) -> anyhow::Result<i32> {
    let dataset = Dataset::load(path)?;
    let rt = Runtime::start(opts, &[]).await?;
    let config = &rt.config;
    let needs_pipeline = dataset.records.iter().any(|r| r.signals.is_none());
    let pipeline = if needs_pipeline { Some(rt.pipeline(Some(rt.store()?))?) } else { None };
    let report = run_eval_with(&dataset, config, config.service.workers, |record| {
        let pipeline = pipeline.clone();
        async move {
            if let Some(signals) = &record.signals {
                return Ok(decision::score(signals, config));
            }
            let media = record.media.ok_or_else(|| "no recorded signals or media".to_string())?;
            let pipeline = pipeline.expect("pipeline exists when a record lacks signals");
            pipeline.analyze(&media).await.map(|a| a.record.result).map_err(|e| e.to_string())
        }
    })
    .await?;
    for s in &report.skipped {
        tracing::warn!(video = %s.video_id, reason = %s.reason, "skipped");
    }
    if let Some(file) = predictions {
        std::fs::write(file, report::predictions_csv(&report))
            .with_context(|| format!("writing {}", file.display()))?;
    }
    if save {
        let id = report_id(&report.dataset, &report.config_digest);
        rt.store()?.put_report(&id, &report)?;
        eprintln!("saved report {id}");
    }
    match out {
        Output::Text => emit(&report::eval_text(&report))?,
        Output::Csv => emit(&report::eval_csv(&report))?,
        Output::Json => emit(&serde_json::to_string_pretty(&report)?)?,
    }
    if let Some(limit) = max_skipped {
        let fraction = report.skipped_fraction();
        if fraction > limit {
            eprintln!("error: skipped fraction {fraction:.3} exceeds {limit}");
            return Ok(1);
        }
    }
    Ok(0)
}

async fn ablate(opts: &Options, out: Output, path: &Path, module_list: &[String]) -> anyhow::Result<i32> {
    let dataset = Dataset::load(path)?;
    let rt = Runtime::start(opts, &[]).await?;
    let table = run_ablation(&dataset, &rt.config, module_list)?;
    match out {
        Output::Text => emit(&report::ablation_text(&table))?,
        Output::Csv => emit(&report::ablation_csv(&table))?,
        Output::Json => emit(&serde_json::to_string_pretty(&table)?)?,
    }
    Ok(0)
}

async fn deepfake_bench(opts: &Options, out: Output, path: &Path, names: &[String]) -> anyhow::Result<i32> {
    let bench = DeepfakeBench::load(path)?;
    let rt = Runtime::start(opts, names).await?;
    let names: Vec<String> = if names.is_empty() { rt.config.deepfake_backends.clone() } else { names.to_vec() };
    if names.is_empty() {
        bail!("no deepfake backends configured");
    }
    let mut clients = Vec::new();
    for name in &names {
        let endpoint = BackendEndpoint::from_config(name, &rt.config.endpoint(name))?;
        clients.push(BackendClient::new(endpoint));
    }
    let rows = compare_deepfake_backends(&bench, &clients, rt.config.deepfake_trigger, 8).await?;
    match out {
        Output::Text => emit(&report::deepfake_text(&rows))?,
        Output::Csv => emit(&report::deepfake_csv(&rows))?,
        Output::Json => emit(&serde_json::to_string_pretty(&rows)?)?,
    }
    Ok(if rows.iter().all(|r| r.metrics.is_none()) { 1 } else { 0 })
}

fn lexicon_validate(file: &Path) -> anyhow::Result<i32> {
    match Lexicons::load(file) {
        Ok(lex) => {
            emit(&format!("{}: ok, {} entries", file.display(), lex.len()))?;
            Ok(0)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(1)
        }
    }
}

async fn serve(opts: &Options, bind: Option<String>, workers: Option<usize>) -> anyhow::Result<i32> {
    let mut rt = Runtime::start(opts, &[]).await?;
    if let Some(bind) = bind {
        rt.config.service.bind = bind;
    }
    if let Some(workers) = workers {
        rt.config.service.workers = workers;
    }
    let store = rt.store()?;
    let pipeline = rt.pipeline(Some(store.clone()))?;
    let state = AppState::new(pipeline, store, &rt.config);
    let app = router(state, rt.config.service.ui_dir.as_deref());
    let listener = tokio::net::TcpListener::bind(&rt.config.service.bind)
        .await
        .with_context(|| format!("binding {}", rt.config.service.bind))?;
    emit(&format!("listening on {}", listener.local_addr()?))?;
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(0)
}

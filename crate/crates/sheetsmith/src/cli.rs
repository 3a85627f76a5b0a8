//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 stage failure or lint errors, 2 configuration
//! or input error. With `--json`, data goes to stdout as canonical JSON and
//! everything else to stderr.

use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use sheetsmith_core::rubric::Dimension;
use sheetsmith_core::{
    lint, sanitize, ExportKind, ExportOutcome, KnowledgePack, LearnerProfile, LintFinding,
    LintOptions, LintProfile, PipelineSession, ReviewDecision, TaskItem, Verdict,
};

use crate::api::{self, AppState, TOKEN_ENV};
use crate::config::{Config, ConfigError, CONFIG_ENV};
use crate::gateway::{FixtureSet, MockProvider};
use crate::orchestrator::Orchestrator;
use crate::store::Document;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sheetsmith",
    version,
    about = "Generate, lint and review differentiated worksheets"
)]
pub struct Cli {
    /// Configuration file.
    #[arg(long, global = true, env = CONFIG_ENV, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Print canonical JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a profile and task through the pipeline up to teacher review.
    Run(RunArgs),
    /// Lint a LaTeX worksheet.
    Lint(LintArgs),
    /// Record, replay or list fixture suites.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
    /// Serve the HTTP API until interrupted.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Learner profile JSON file.
    #[arg(long, value_name = "FILE")]
    pub profile: PathBuf,
    /// Task JSON file.
    #[arg(long, value_name = "FILE")]
    pub task: PathBuf,
    /// Knowledge pack JSON file; repeatable. Without any, every stored pack is used.
    #[arg(long = "pack", value_name = "FILE")]
    pub packs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Accept the worksheet and write its artifacts.
    #[arg(long)]
    pub accept: bool,
    /// Directory for artifacts written by --accept.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Standard,
    Dyslexia,
}

impl From<ProfileArg> for LintProfile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Standard => LintProfile::Standard,
            ProfileArg::Dyslexia => LintProfile::Dyslexia,
        }
    }
}

#[derive(Debug, Args)]
pub struct LintArgs {
    /// LaTeX file to check.
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "standard")]
    pub profile: ProfileArg,
    /// Rendered page count, if known.
    #[arg(long, value_name = "N")]
    pub page_count: Option<u32>,
    /// Average sentence length threshold.
    #[arg(long, value_name = "WORDS", default_value_t = 15.0)]
    pub max_sentence_words: f64,
}

#[derive(Debug, Subcommand)]
pub enum FixturesCommand {
    /// Run the pipeline against the configured provider and save every reply.
    Record(RecordArgs),
    /// Run the pipeline against a recorded suite.
    Replay(ReplayArgs),
    /// List the records in a suite.
    List(ListArgs),
}

#[derive(Debug, Args)]
pub struct RecordArgs {
    /// Suite directory; must be empty or absent.
    #[arg(long, value_name = "DIR")]
    pub suite: PathBuf,
    #[command(flatten)]
    pub inputs: Inputs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long, value_name = "DIR")]
    pub suite: PathBuf,
    #[command(flatten)]
    pub inputs: Inputs,
    /// Accept the worksheet and write its artifacts.
    #[arg(long)]
    pub accept: bool,
    /// Directory for artifacts written by --accept.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    #[arg(long, value_name = "DIR")]
    pub suite: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Address to bind.
    #[arg(long, env = "SHEETSMITH_BIND", default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
}

/// Output streams, swappable in tests.
pub struct Io<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Runs a parsed command and returns its exit code.
pub fn execute(cli: Cli, io: &mut Io<'_>) -> u8 {
    let json = cli.json;
    let result = match cli.command {
        Command::Lint(args) => cmd_lint(&args, json, io),
        Command::Run(args) => with_config(cli.config.as_deref(), io, |cfg, io| {
            cmd_run(cfg, None, &args.inputs, args.accept, &args.out, json, io)
        }),
        Command::Fixtures(FixturesCommand::Record(args)) => {
            with_config(cli.config.as_deref(), io, |cfg, io| {
                cmd_record(cfg, &args, json, io)
            })
        }
        Command::Fixtures(FixturesCommand::Replay(args)) => {
            with_config(cli.config.as_deref(), io, |cfg, io| {
                cmd_run(
                    cfg,
                    Some(&args.suite),
                    &args.inputs,
                    args.accept,
                    &args.out,
                    json,
                    io,
                )
            })
        }
        Command::Fixtures(FixturesCommand::List(args)) => cmd_list(&args, json, io),
        Command::Serve(args) => with_config(cli.config.as_deref(), io, |cfg, io| {
            cmd_serve(cfg, &args, io)
        }),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(io.err, "error: {message}");
            code
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn config_failure(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.to_string(),
    }
}

fn stage_failure(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        message: message.to_string(),
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        config_failure(e)
    }
}

fn with_config(
    path: Option<&Path>,
    io: &mut Io<'_>,
    f: impl FnOnce(&Config, &mut Io<'_>) -> Result<u8, Failure>,
) -> Result<u8, Failure> {
    let path = path.ok_or_else(|| {
        config_failure(format!(
            "no configuration; pass --config or set {CONFIG_ENV}"
        ))
    })?;
    let cfg = Config::load(path)?;
    f(&cfg, io)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| config_failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_failure(format!("{}: {e}", path.display())))
}

fn print_json(io: &mut Io<'_>, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(stage_failure)?;
    writeln!(io.out, "{text}").map_err(stage_failure)
}

/// Stores the input documents, replacing same-id versions.
fn load_inputs(
    orch: &Orchestrator,
    inputs: &Inputs,
) -> Result<(LearnerProfile, TaskItem, Option<Vec<KnowledgePack>>), Failure> {
    fn put<D: Document>(orch: &Orchestrator, doc: &D) -> Result<(), Failure> {
        orch.store().put(doc).map_err(config_failure)
    }
    let profile: LearnerProfile = read_json(&inputs.profile)?;
    let task: TaskItem = read_json(&inputs.task)?;
    put(orch, &profile)?;
    put(orch, &task)?;
    let packs = if inputs.packs.is_empty() {
        None
    } else {
        let packs = inputs
            .packs
            .iter()
            .map(|p| read_json::<KnowledgePack>(p))
            .collect::<Result<Vec<_>, _>>()?;
        for p in &packs {
            put(orch, p)?;
        }
        Some(packs)
    };
    Ok((profile, task, packs))
}

fn cmd_run(
    cfg: &Config,
    replay_suite: Option<&Path>,
    inputs: &Inputs,
    accept: bool,
    out_dir: &Path,
    json: bool,
    io: &mut Io<'_>,
) -> Result<u8, Failure> {
    let provider = match replay_suite {
        Some(suite) => {
            if !suite.is_dir() {
                return Err(config_failure(format!(
                    "suite {} does not exist",
                    suite.display()
                )));
            }
            Arc::new(MockProvider::new(suite))
        }
        None => cfg.provider(),
    };
    let orch = cfg.orchestrator(cfg.gateway(provider, None)?)?;
    drive(&orch, inputs, accept, out_dir, json, io)
}

fn drive(
    orch: &Orchestrator,
    inputs: &Inputs,
    accept: bool,
    out_dir: &Path,
    json: bool,
    io: &mut Io<'_>,
) -> Result<u8, Failure> {
    let (profile, task, packs) = load_inputs(orch, inputs)?;
    let pack_ids = packs.map(|ps| ps.into_iter().map(|p| p.id).collect());
    let session = orch
        .create_session(&profile.id, &task.id, pack_ids)
        .map_err(config_failure)?;
    let _ = writeln!(io.err, "session {}", session.id.as_str());
    let mut session = match orch.run_to_review(session.id.as_str()) {
        Ok(s) => s,
        Err(e) => {
            if json {
                if let Ok(s) = orch.session(session.id.as_str()) {
                    print_json(io, &s)?;
                }
            }
            if let Some(f) = orch
                .session(session.id.as_str())
                .ok()
                .and_then(|s| s.failure)
            {
                write_findings(io, &f.findings);
            }
            return Err(stage_failure(e));
        }
    };
    if accept {
        let decision = ReviewDecision {
            verdict: Verdict::Accept,
            edited_latex: None,
            note: None,
            decided_at: orch.now(),
        };
        session = orch
            .apply_review(session.id.as_str(), decision)
            .map_err(stage_failure)?;
        write_artifacts(orch, &session, out_dir, io)?;
    }
    if json {
        print_json(io, &session)?;
    } else {
        summarize(&session, io);
    }
    Ok(EXIT_OK)
}

fn write_artifacts(
    orch: &Orchestrator,
    session: &PipelineSession,
    out_dir: &Path,
    io: &mut Io<'_>,
) -> Result<(), Failure> {
    let w = session
        .worksheet
        .as_ref()
        .expect("accepted sessions carry a worksheet");
    fs::create_dir_all(out_dir)
        .map_err(|e| config_failure(format!("{}: {e}", out_dir.display())))?;
    let stem = out_dir.join(session.id.as_str());
    let tex = stem.with_extension("tex");
    fs::write(&tex, &w.latex_source)
        .map_err(|e| stage_failure(format!("{}: {e}", tex.display())))?;
    let _ = writeln!(io.err, "wrote {}", tex.display());
    for kind in [ExportKind::Pdf, ExportKind::Docx] {
        match w.exports.get(&kind) {
            Some(ExportOutcome::Stored { artifact, .. }) => {
                let bytes = orch
                    .store()
                    .get_blob(artifact)
                    .map_err(stage_failure)?
                    .unwrap_or_default();
                let path = stem.with_extension(kind.extension());
                fs::write(&path, bytes)
                    .map_err(|e| stage_failure(format!("{}: {e}", path.display())))?;
                let _ = writeln!(io.err, "wrote {}", path.display());
            }
            Some(ExportOutcome::Skipped { reason }) => {
                let _ = writeln!(io.err, "{} skipped: {reason}", kind.extension());
            }
            Some(ExportOutcome::Failed { log_excerpt }) => {
                let _ = writeln!(io.err, "{} failed:\n{log_excerpt}", kind.extension());
            }
            None => {}
        }
    }
    Ok(())
}

fn summarize(session: &PipelineSession, io: &mut Io<'_>) {
    let _ = writeln!(
        io.out,
        "session: {}\nstate: {}",
        session.id.as_str(),
        session.state.as_str()
    );
    if let Some(d) = &session.diagnosis {
        let types: Vec<&str> = d
            .recommended_task_types
            .iter()
            .map(|t| t.as_str())
            .collect();
        let _ = writeln!(
            io.out,
            "diagnosis: performance {}, support {}, reading impairment {}, task types [{}]",
            d.performance_level.as_str(),
            d.support_needs.as_str(),
            if d.reading_impairment { "yes" } else { "no" },
            types.join(", ")
        );
        let _ = writeln!(io.out, "reason: {}", d.reason);
    }
    if let Some(w) = &session.worksheet {
        let _ = writeln!(io.out, "lint: {} finding(s)", w.lint_report.len());
        write_findings(io, &w.lint_report);
    }
    if let Some(e) = &session.evaluation {
        let scores: Vec<String> = Dimension::ALL
            .iter()
            .map(|d| format!("{} {}", d.key(), e.score(*d).get()))
            .collect();
        let _ = writeln!(io.out, "rubric: {}", scores.join(", "));
    }
}

fn write_findings(io: &mut Io<'_>, findings: &[LintFinding]) {
    for f in findings {
        let _ = writeln!(io.err, "  {f}");
    }
}

fn cmd_lint(args: &LintArgs, json: bool, io: &mut Io<'_>) -> Result<u8, Failure> {
    let src = fs::read_to_string(&args.file)
        .map_err(|e| config_failure(format!("{}: {e}", args.file.display())))?;
    let opts = LintOptions {
        max_avg_sentence_words: args.max_sentence_words,
        page_count: args.page_count,
        ..LintOptions::default()
    };
    let findings = lint(&src, args.profile.into(), &opts);
    let unsafe_issues = sanitize(&src).err();
    if json {
        print_json(io, &findings)?;
    } else {
        let _ = writeln!(
            io.err,
            "{:<5} {:<8} {:>9}  message",
            "rule", "severity", "line:col"
        );
        for f in &findings {
            let sev = if f.is_error() { "error" } else { "warning" };
            let at = format!("{}:{}", f.line, f.col);
            let _ = writeln!(
                io.err,
                "{:<5} {:<8} {:>9}  {}",
                f.rule_id.as_str(),
                sev,
                at,
                f.message
            );
        }
        let errors = findings.iter().filter(|f| f.is_error()).count();
        let _ = writeln!(io.err, "{} finding(s), {errors} error(s)", findings.len());
    }
    if let Some(v) = &unsafe_issues {
        let _ = writeln!(io.err, "{v}");
    }
    let failed = unsafe_issues.is_some() || findings.iter().any(LintFinding::is_error);
    Ok(if failed { EXIT_FAILURE } else { EXIT_OK })
}

fn cmd_record(cfg: &Config, args: &RecordArgs, json: bool, io: &mut Io<'_>) -> Result<u8, Failure> {
    let non_empty = fs::read_dir(&args.suite)
        .map(|mut d| d.next().is_some())
        .unwrap_or(false);
    if non_empty {
        return Err(config_failure(format!(
            "suite {} is not empty; record into a fresh directory",
            args.suite.display()
        )));
    }
    let orch = cfg.orchestrator(cfg.gateway(cfg.provider(), Some(&args.suite))?)?;
    let code = drive(&orch, &args.inputs, false, Path::new("."), json, io)?;
    let n = FixtureSet::load(&args.suite).map_err(stage_failure)?.len();
    let _ = writeln!(
        io.err,
        "recorded {n} fixture(s) into {}",
        args.suite.display()
    );
    Ok(code)
}

#[derive(Serialize)]
struct ListedRecord<'a> {
    request_hash: &'a str,
    ordinal: u32,
    role_tag: &'static str,
    response_chars: usize,
}

fn cmd_list(args: &ListArgs, json: bool, io: &mut Io<'_>) -> Result<u8, Failure> {
    let set = FixtureSet::load(&args.suite).map_err(config_failure)?;
    let rows: Vec<ListedRecord<'_>> = set
        .records
        .values()
        .map(|r| ListedRecord {
            request_hash: &r.request_hash,
            ordinal: r.ordinal,
            role_tag: r.request_snapshot.role_tag.as_str(),
            response_chars: r.response_text.chars().count(),
        })
        .collect();
    if json {
        print_json(io, &rows)?;
    } else {
        let _ = writeln!(
            io.out,
            "{:<64}  {:>7}  {:<10}  {:>6}",
            "request_hash", "ordinal", "role", "chars"
        );
        for r in &rows {
            let _ = writeln!(
                io.out,
                "{:<64}  {:>7}  {:<10}  {:>6}",
                r.request_hash, r.ordinal, r.role_tag, r.response_chars
            );
        }
    }
    Ok(EXIT_OK)
}

fn cmd_serve(cfg: &Config, args: &ServeArgs, io: &mut Io<'_>) -> Result<u8, Failure> {
    let orch = cfg.orchestrator(cfg.gateway(cfg.provider(), None)?)?;
    let report = orch.recover().map_err(config_failure)?;
    for q in &report.quarantined {
        let _ = writeln!(io.err, "quarantined {}: {}", q.file, q.reason);
    }
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(config_failure)?;
    let listener = rt
        .block_on(tokio::net::TcpListener::bind(args.bind))
        .map_err(|e| config_failure(format!("cannot bind {}: {e}", args.bind)))?;
    let addr = listener.local_addr().map_err(config_failure)?;
    let _ = writeln!(
        io.err,
        "listening on http://{addr} ({} sessions recovered)",
        report.sessions.len()
    );
    let _ = io.err.flush();
    let state = AppState::new(orch, std::env::var(TOKEN_ENV).ok());
    rt.block_on(api::serve(listener, state, shutdown_signal()))
        .map_err(stage_failure)?;
    // Dropping the runtime waits for background runs, so their last stage is persisted.
    drop(rt);
    let _ = writeln!(io.err, "shut down");
    Ok(EXIT_OK)
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}

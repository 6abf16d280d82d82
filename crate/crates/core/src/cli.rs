//! Command-line driver: project discovery, subcommand dispatch and exit codes.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or (with `--strict`) parse
//! failure, 3 refused or unplannable refactoring, 4 sources changed between
//! planning and applying.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::docminer::{extract_docs, write_docs_json};
use crate::envy::{detect_feature_envy, findings_report, Counting};
use crate::license::{classify_license, DEFAULT_THRESHOLD};
use crate::metrics::{metrics_report, project_metrics};
use crate::model::{build_model, ProjectModel};
use crate::movemethod::{self, MoveError};
use crate::syntax::{parse_file, SyntaxTree};

pub const JOBS_ENV: &str = "PSILITE_JOBS";

const SKIPPED_DIRS: &[&str] = &[".git", "build", "out", "target"];

#[derive(Debug, Parser)]
#[command(
    name = "psilite",
    version,
    about = "Headless analysis of Java projects"
)]
struct Cli {
    /// Treat files with parse notes as failures.
    #[arg(long, global = true)]
    strict: bool,
    /// Worker threads (default: $PSILITE_JOBS, else logical CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LicenseFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountingArg {
    Distinct,
    Occurrences,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct MoveMode {
    /// Print a unified diff and change nothing.
    #[arg(long)]
    pub dry_run: bool,
    /// Rewrite the files.
    #[arg(long)]
    pub apply: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Write every method Javadoc to a JSON file.
    MineDocs {
        root: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-class field, method and line counts.
    Metrics {
        root: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: ReportFormat,
    },
    /// Report methods that use another class's fields more than their own.
    DetectEnvy {
        root: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: ReportFormat,
        #[arg(long, value_enum, default_value = "distinct")]
        counting: CountingArg,
    },
    /// Move a method to the class it envies.
    MoveMethod {
        root: PathBuf,
        /// Fully qualified name of the declaring class.
        #[arg(long)]
        class: String,
        #[arg(long)]
        method: String,
        /// Target class; defaults to the class the method envies.
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        mode: MoveMode,
        /// Apply without asking.
        #[arg(long, requires = "apply")]
        yes: bool,
    },
    /// Recognize Apache-2.0, BSD-3-Clause or MIT license text.
    ClassifyLicense {
        path: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: LicenseFormat,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub jobs: usize,
    pub strict: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Refused(String),
    Stale(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Refused(_) => 3,
            Failure::Stale(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Refused(m) | Failure::Stale(m) => m,
        }
    }
}

impl From<MoveError> for Failure {
    fn from(e: MoveError) -> Self {
        match e {
            MoveError::UnknownClass(_) | MoveError::UnknownMethod { .. } => {
                Failure::Usage(e.to_string())
            }
            MoveError::StaleSources(_) => Failure::Stale(e.to_string()),
            MoveError::Io { .. } => Failure::Io(e.to_string()),
            MoveError::Preconditions(ref vs) => {
                let lines: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                Failure::Refused(format!("{e}\n{}", lines.join("\n")))
            }
            _ => Failure::Refused(e.to_string()),
        }
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunConfig {
    /// Parse arguments (without the program name). `Err` carries the
    /// rendered clap message and whether it is help/version output.
    fn from_args<I, T>(argv: I, env_jobs: Option<String>) -> Result<Self, Result<String, String>>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let args =
            std::iter::once(OsString::from("psilite")).chain(argv.into_iter().map(Into::into));
        let cli = Cli::try_parse_from(args).map_err(|e| {
            let text = e.render().to_string();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Ok(text)
                }
                _ => Err(text),
            }
        })?;
        let jobs = match (cli.jobs, env_jobs) {
            (Some(j), _) => j,
            (None, Some(v)) => v.trim().parse().map_err(|_| {
                Err(format!(
                    "error: {JOBS_ENV} must be a positive integer, got {v:?}\n"
                ))
            })?,
            (None, None) => default_jobs(),
        };
        if jobs == 0 {
            return Err(Err("error: the worker count must be at least 1\n".into()));
        }
        if let Command::ClassifyLicense { threshold, .. } = cli.command {
            if !(0.0..=1.0).contains(&threshold) {
                return Err(Err(format!(
                    "error: --threshold must lie in [0, 1], got {threshold}\n"
                )));
            }
        }
        Ok(RunConfig {
            command: cli.command,
            jobs,
            strict: cli.strict,
        })
    }
}

fn is_skipped(entry: &Path) -> bool {
    entry
        .file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| SKIPPED_DIRS.contains(&n))
}

/// Every `*.java` file under `root`, sorted by path relative to `root`.
pub fn discover_sources(root: &Path) -> io::Result<Vec<PathBuf>> {
    let mut rel = Vec::new();
    let mut stack = vec![PathBuf::new()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(root.join(&dir))? {
            let entry = entry?;
            let kind = entry.file_type()?;
            let path = dir.join(entry.file_name());
            if kind.is_dir() {
                if !is_skipped(&path) {
                    stack.push(path);
                }
            } else if path.extension().is_some_and(|e| e == "java") {
                rel.push(path);
            }
        }
    }
    rel.sort();
    Ok(rel.into_iter().map(|r| root.join(r)).collect())
}

struct Loaded {
    model: ProjectModel,
    files: usize,
    with_notes: Vec<PathBuf>,
    unreadable: Vec<String>,
}

fn load_project(root: &Path, strict: bool) -> Result<Loaded, Failure> {
    if !root.is_dir() {
        return Err(Failure::Io(format!("{}: not a directory", root.display())));
    }
    let paths =
        discover_sources(root).map_err(|e| Failure::Io(format!("{}: {e}", root.display())))?;
    let results: Vec<Result<SyntaxTree, String>> = paths
        .par_iter()
        .map(|p| {
            fs::read_to_string(p)
                .map(|src| parse_file(&src, p.clone()))
                .map_err(|e| format!("{}: {e}", p.display()))
        })
        .collect();
    let mut trees = Vec::new();
    let mut unreadable = Vec::new();
    for r in results {
        match r {
            Ok(t) => trees.push(t),
            Err(e) => unreadable.push(e),
        }
    }
    if strict && !unreadable.is_empty() {
        return Err(Failure::Io(unreadable.join("\n")));
    }
    let with_notes: Vec<PathBuf> = trees
        .iter()
        .filter(|t| !t.parse_notes.is_empty())
        .map(|t| t.path.clone())
        .collect();
    if strict && !with_notes.is_empty() {
        let mut msg = String::from("parse notes under --strict:");
        for t in trees.iter().filter(|t| !t.parse_notes.is_empty()) {
            for n in &t.parse_notes {
                msg.push_str(&format!(
                    "\n{}:{}: {}",
                    t.path.display(),
                    t.line_of(n.span.start),
                    n.message
                ));
            }
        }
        return Err(Failure::Io(msg));
    }
    let files = trees.len();
    let model = build_model(trees, root).map_err(|e| Failure::Io(e.to_string()))?;
    Ok(Loaded {
        model,
        files,
        with_notes,
        unreadable,
    })
}

fn summary(loaded: &Loaded, err: &mut dyn Write) {
    let _ = writeln!(
        err,
        "psilite: analyzed {} file(s); {} with parse notes; {} unreadable",
        loaded.files,
        loaded.with_notes.len(),
        loaded.unreadable.len()
    );
    for u in &loaded.unreadable {
        let _ = writeln!(err, "psilite: skipped {u}");
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Io(format!("cannot write output: {e}")))
}

fn dispatch(
    config: &RunConfig,
    pool: &rayon::ThreadPool,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let strict = config.strict;
    match &config.command {
        Command::MineDocs { root, out: path } => {
            let loaded = pool.install(|| load_project(root, strict))?;
            summary(&loaded, err);
            let records = pool.install(|| extract_docs(&loaded.model));
            write_docs_json(&records, &root.to_string_lossy(), path)
                .map_err(|e| Failure::Io(e.to_string()))?;
            let _ = writeln!(
                err,
                "psilite: wrote {} record(s) to {}",
                records.len(),
                path.display()
            );
            Ok(())
        }
        Command::Metrics { root, format } => {
            let loaded = pool.install(|| load_project(root, strict))?;
            summary(&loaded, err);
            let format = match format {
                ReportFormat::Table => crate::metrics::Format::Table,
                ReportFormat::Json => crate::metrics::Format::Json,
            };
            let report = metrics_report(&project_metrics(&loaded.model), format);
            write_out(out, &format!("{report}\n"))
        }
        Command::DetectEnvy {
            root,
            format,
            counting,
        } => {
            let loaded = pool.install(|| load_project(root, strict))?;
            summary(&loaded, err);
            let counting = match counting {
                CountingArg::Distinct => Counting::Distinct,
                CountingArg::Occurrences => Counting::Occurrences,
            };
            let format = match format {
                ReportFormat::Table => crate::envy::Format::Table,
                ReportFormat::Json => crate::envy::Format::Json,
            };
            let findings = pool.install(|| detect_feature_envy(&loaded.model, counting));
            write_out(out, &format!("{}\n", findings_report(&findings, format)))
        }
        Command::MoveMethod {
            root,
            class,
            method,
            target,
            mode,
            yes,
        } => {
            let loaded = pool.install(|| load_project(root, strict))?;
            summary(&loaded, err);
            let model = &loaded.model;
            let (c, m) = movemethod::select(model, class, method)?;
            let target = match target {
                Some(t) => t.clone(),
                None => movemethod::envied_target(model, c, m)?,
            };
            let plan = movemethod::plan_move(model, c, m, &target)?;
            let _ = writeln!(err, "psilite: {plan}");
            if mode.dry_run {
                return write_out(out, &movemethod::preview(&plan, model)?);
            }
            if !yes {
                let _ = write!(err, "Move {}.{} to {}? [y/N] ", c.fqn, m.name, target);
                let _ = err.flush();
                let mut answer = String::new();
                input
                    .read_line(&mut answer)
                    .map_err(|e| Failure::Io(format!("cannot read confirmation: {e}")))?;
                let answer = answer.trim().to_ascii_lowercase();
                if answer != "y" && answer != "yes" {
                    let _ = writeln!(err, "psilite: move cancelled; no files changed");
                    return Ok(());
                }
            }
            let outputs = movemethod::execute(&plan, model)?;
            for (rel, text) in &outputs {
                let path = root.join(rel);
                fs::write(&path, text)
                    .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                write_out(out, &format!("updated {}\n", rel.display()))?;
            }
            Ok(())
        }
        Command::ClassifyLicense {
            path,
            threshold,
            format,
        } => {
            let text =
                fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            let result = classify_license(&String::from_utf8_lossy(&text), *threshold);
            let line = match format {
                LicenseFormat::Text => result.to_text(),
                LicenseFormat::Json => result.to_json(),
            };
            write_out(out, &format!("{line}\n"))
        }
    }
}

/// Run with explicit streams; returns the exit code.
pub fn run_with<I, T>(
    argv: I,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::from_args(argv, std::env::var(JOBS_ENV).ok()) {
        Ok(c) => c,
        Err(Ok(help)) => {
            let _ = out.write_all(help.as_bytes());
            return 0;
        }
        Err(Err(usage)) => {
            let _ = err.write_all(usage.as_bytes());
            return 1;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "psilite: cannot start workers: {e}");
            return 2;
        }
    };
    match dispatch(&config, &pool, input, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "psilite: {}", f.message());
            f.code()
        }
    }
}

/// Run against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    run_with(argv, &mut input, &mut out, &mut err)
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ncblow_core::intersection::{default_repeated_blowup_report, ReportRecord};
use ncblow_core::scenario::{run, RunOptions, Scenario};
use ncblow_core::verify::{parse_suites, run_suites, VerifyConfig, DEFAULT_SEED, DEFAULT_WINDOW};
use ncblow_core::{Error, ExecutionMode};
use serde::Serialize;

const EXIT_VERIFY: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;

/// Scripted blowups, blowdowns and intersection bookkeeping for elliptic algebras.
#[derive(Parser, Debug)]
#[command(name = "ncblow", version)]
struct Cli {
    /// Run a scenario file.
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,

    /// Run verification suites: epsilon, line-dual, roundtrip, point-tables,
    /// oracle, series, intersection (comma separated), or all.
    #[arg(long, value_name = "SUITE")]
    verify: Option<String>,

    /// Degree window for series checks and trace rows [default: 50 for
    /// verify, 64 for traces].
    #[arg(long, value_name = "N")]
    window: Option<i64>,

    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Emit per-degree h0 rows for every algebra the scenario produces.
    #[arg(long)]
    trace: bool,

    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Run verification cases on one thread.
    #[arg(long)]
    sequential: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Blow the degree-9 Sklyanin Veronese up twice at one point and blow
    /// the last exceptional line back down.
    RepeatedBlowup,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Serialize)]
struct Document<'a> {
    records: &'a [ReportRecord],
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::Precondition(_) => EXIT_PRECONDITION,
        Error::Inconsistency(_) => EXIT_INCONSISTENT,
    }
}

fn emit(format: Format, records: &[ReportRecord], failure: Option<&str>) {
    let mut out = std::io::stdout().lock();
    match format {
        Format::Text => {
            for r in records {
                let _ = writeln!(
                    out,
                    "{} | {}: {} [{}]",
                    r.step, r.anchor, r.value, r.provenance
                );
            }
        }
        Format::Structured => {
            let doc = Document {
                records,
                status: if failure.is_some() { "error" } else { "ok" },
                error: failure.map(str::to_string),
            };
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&doc).expect("records serialize")
            );
        }
    }
    if let Some(msg) = failure {
        eprintln!("error: {msg}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = if cli.sequential {
        ExecutionMode::Sequential
    } else {
        ExecutionMode::default()
    };
    let actions = usize::from(cli.scenario.is_some())
        + usize::from(cli.verify.is_some())
        + usize::from(cli.command.is_some());
    if actions != 1 {
        eprintln!("error: give exactly one of --scenario, --verify or a subcommand");
        return ExitCode::from(EXIT_PARSE);
    }
    if cli.window.is_some_and(|w| w < 0) {
        eprintln!("error: --window must be nonnegative");
        return ExitCode::from(EXIT_PARSE);
    }

    if let Some(Command::RepeatedBlowup) = cli.command {
        return match default_repeated_blowup_report() {
            Ok(rep) => {
                emit(cli.format, &rep.records, None);
                ExitCode::SUCCESS
            }
            Err(e) => {
                emit(cli.format, &[], Some(&e.to_string()));
                ExitCode::from(exit_code(&e))
            }
        };
    }

    if let Some(suites) = &cli.verify {
        let suites = match parse_suites(suites) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_PARSE);
            }
        };
        let cfg = VerifyConfig {
            window: cli.window.unwrap_or(DEFAULT_WINDOW),
            seed: cli.seed,
            mode,
        };
        let outcomes = run_suites(&suites, &cfg);
        let records: Vec<ReportRecord> = outcomes
            .iter()
            .map(|o| {
                let value = if o.passed() {
                    format!("pass ({} checks)", o.checks)
                } else {
                    format!(
                        "FAIL ({} of {}): {}",
                        o.failures.len(),
                        o.checks,
                        o.failures[0]
                    )
                };
                ReportRecord::new(&format!("verify {}", o.suite), "suite", value, "derived")
            })
            .collect();
        let failed = outcomes.iter().any(|o| !o.passed());
        emit(
            cli.format,
            &records,
            failed.then_some("verification failed"),
        );
        return if failed {
            ExitCode::from(EXIT_VERIFY)
        } else {
            ExitCode::SUCCESS
        };
    }

    let path = cli.scenario.expect("checked above");
    let scenario = match Scenario::load(&path) {
        Ok(s) => s,
        Err(e) => {
            emit(cli.format, &[], Some(&e.to_string()));
            return ExitCode::from(exit_code(&e));
        }
    };
    let opts = RunOptions {
        window: cli.window.unwrap_or(64),
        trace: cli.trace,
        mode,
    };
    let (result, failure) = run(&scenario, &opts);
    match failure {
        None => {
            emit(cli.format, &result.records, None);
            ExitCode::SUCCESS
        }
        Some((line, e)) => {
            emit(
                cli.format,
                &result.records,
                Some(&format!("line {line}: {e}")),
            );
            ExitCode::from(exit_code(&e))
        }
    }
}

//! `minpair`: run the construction, verify traces, synthesize Ψ.
//!
//! Exit codes: 0 pass, 1 check failure, 2 config or runtime error,
//! 3 malformed trace.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use minpair::analysis::{
    check_property2, check_property3, check_structural, derive_x, end_to_end_check, reference_run,
    synthesize_psi, CheckOutcome, Counterexample, VerificationReport,
};
use minpair::trace::describe;
use minpair::{check_description, parse_config, Density, Nat, Replay, RunConfig, Side, Trace};

#[derive(Parser)]
#[command(
    name = "minpair",
    version,
    about = "Finite-injury construction workbench"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the construction and write its trace.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the config's `output`, then to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a trace against its config.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated; structural checks always run.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        checks: Vec<CheckKind>,
        /// Where to write the JSON report; standard output if absent.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Bound for the description check.
        #[arg(long, default_value_t = 1000)]
        bound: Nat,
    },
    /// Print the Ψ table of an operator pair below a bound.
    Psi {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        e0: Nat,
        #[arg(long)]
        e1: Nat,
        #[arg(long)]
        bound: Nat,
    },
    /// Summarize a trace.
    Report {
        #[arg(long)]
        trace: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    All,
    Structural,
    Property2,
    Property3,
    EndToEnd,
    OracleDiff,
    Description,
}

enum Failure {
    Runtime(String),
    Trace(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 2,
            Failure::Trace(_) => 3,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| Failure::Runtime(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    parse_config(&read(path)?).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn load_trace(path: &Path) -> Result<(Trace, Replay), Failure> {
    let trace = Trace::from_jsonl(&read(path)?)
        .map_err(|e| Failure::Trace(format!("{}: {e}", path.display())))?;
    let replay =
        Replay::new(&trace).map_err(|e| Failure::Trace(format!("{}: {e}", path.display())))?;
    Ok((trace, replay))
}

fn cmd_run(config: &Path, out: Option<&Path>) -> Result<u8, Failure> {
    let cfg = load_config(config)?;
    let trace = minpair::engine::run(&cfg).map_err(|e| Failure::Runtime(e.to_string()))?;
    write(out.or(cfg.output.as_deref()), &trace.to_jsonl())?;
    Ok(0)
}

fn oracle_diff(cfg: &RunConfig, trace: &Trace) -> Result<CheckOutcome, Failure> {
    let mut reference_cfg = cfg.clone();
    reference_cfg.horizon = trace.horizon();
    let reference = reference_run(&reference_cfg).map_err(|e| Failure::Runtime(e.to_string()))?;
    let (ours, theirs) = (trace.to_jsonl(), reference.to_jsonl());
    if ours == theirs {
        return Ok(CheckOutcome::pass("byte-identical to the reference run"));
    }
    let line = ours
        .lines()
        .zip(theirs.lines())
        .position(|(a, b)| a != b)
        .unwrap_or(0);
    Ok(CheckOutcome::fail(Counterexample {
        stage: line as Nat,
        element: None,
        requirement: None,
        detail: format!("trace and reference run first differ on line {}", line + 1),
    }))
}

fn description_checks(
    cfg: &RunConfig,
    replay: &Replay,
    bound: Nat,
) -> Result<VerificationReport, Failure> {
    let (phi, _) = cfg.build().map_err(|e| Failure::Runtime(e.to_string()))?;
    let mut report = VerificationReport::default();
    for side in Side::BOTH {
        let x = derive_x(replay, &phi, side, bound);
        let f = replay.description(side, replay.horizon());
        let d = check_description(&f, &x.bits, bound);
        let excluded = replay
            .members(side, replay.horizon())
            .range(..bound)
            .count() as Nat;
        let expected = Density::new(bound - excluded, bound);
        let outcome = if let Some(&n) = d.error_points.first() {
            CheckOutcome::fail(Counterexample {
                stage: replay.horizon(),
                element: Some(n),
                requirement: None,
                detail: format!("f_{side} disagrees with X_{side} at {n}"),
            })
        } else if d.domain_partial_density != expected {
            CheckOutcome::fail(Counterexample {
                stage: replay.horizon(),
                element: None,
                requirement: None,
                detail: format!(
                    "domain density {} instead of {expected}",
                    d.domain_partial_density
                ),
            })
        } else {
            CheckOutcome::pass(format!("domain density {expected} at N = {bound}"))
        };
        report.insert(format!("description.{side}"), outcome);
    }
    Ok(report)
}

fn cmd_verify(
    trace_path: &Path,
    config_path: &Path,
    checks: &[CheckKind],
    report_path: Option<&Path>,
    bound: Nat,
) -> Result<u8, Failure> {
    let cfg = load_config(config_path)?;
    let (trace, replay) = load_trace(trace_path)?;
    let (phi, ops) = cfg.build().map_err(|e| Failure::Runtime(e.to_string()))?;
    let wants = |k: CheckKind| checks.contains(&CheckKind::All) || checks.contains(&k);

    let mut report =
        check_structural(&trace, Some(&phi)).map_err(|e| Failure::Trace(e.to_string()))?;
    if wants(CheckKind::Property2) {
        for e in 0..phi.len() as Nat {
            for j in Side::BOTH {
                report.merge(check_property2(&replay, &phi, e, j));
            }
        }
    }
    if wants(CheckKind::Property3) {
        for e0 in 0..ops.len() as Nat {
            for e1 in 0..ops.len() as Nat {
                report.merge(check_property3(&replay, &ops, e0, e1));
            }
        }
    }
    if wants(CheckKind::EndToEnd) {
        match &cfg.reduction {
            Some(spec) => report.merge(end_to_end_check(&replay, &ops, spec)),
            None => report.insert(
                "end_to_end",
                CheckOutcome::inconclusive("config has no reduction"),
            ),
        }
    }
    if wants(CheckKind::OracleDiff) {
        report.insert("oracle_diff", oracle_diff(&cfg, &trace)?);
    }
    if wants(CheckKind::Description) && bound > 0 {
        report.merge(description_checks(&cfg, &replay, bound)?);
    }
    report
        .metadata
        .insert("trace".into(), trace_path.display().to_string());
    report
        .metadata
        .insert("config".into(), config_path.display().to_string());

    let mut text = report.to_json();
    text.push('\n');
    write(report_path, &text)?;
    for (name, outcome) in report.failures() {
        let detail = outcome.counterexample.as_ref().map_or(String::new(), |c| {
            format!(" at stage {}: {}", c.stage, c.detail)
        });
        eprintln!("FAIL {name}{detail}");
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_psi(trace: &Path, config: &Path, e0: Nat, e1: Nat, bound: Nat) -> Result<u8, Failure> {
    if bound == 0 {
        return Err(Failure::Runtime("--bound must be positive".into()));
    }
    let cfg = load_config(config)?;
    let (_, replay) = load_trace(trace)?;
    let (_, ops) = cfg.build().map_err(|e| Failure::Runtime(e.to_string()))?;
    let mut table = synthesize_psi(&replay, &ops, e0, e1);
    let density = table.density(bound);
    table.entries.retain(|&n, _| n < bound);
    let out = serde_json::json!({
        "bound": bound,
        "density": [density.numer(), density.denom()],
        "table": table,
    });
    let text = serde_json::to_string_pretty(&out).expect("tables serialize");
    println!("{text}");
    Ok(0)
}

fn cmd_report(trace: &Path) -> Result<u8, Failure> {
    let (trace, _) = load_trace(trace)?;
    print!("{}", describe(&trace));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out } => cmd_run(config, out.as_deref()),
        Command::Verify {
            trace,
            config,
            checks,
            report,
            bound,
        } => cmd_verify(trace, config, checks, report.as_deref(), *bound),
        Command::Psi {
            trace,
            config,
            e0,
            e1,
            bound,
        } => cmd_psi(trace, config, *e0, *e1, *bound),
        Command::Report { trace } => cmd_report(trace),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (Failure::Runtime(msg) | Failure::Trace(msg)) = &f;
            eprintln!("minpair: {msg}");
            ExitCode::from(f.code())
        }
    }
}

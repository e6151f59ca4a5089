use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hypercourant::TheoremKind;
use hypercourant_cli::commands::invalid_report;
use hypercourant_cli::fixtures::{fixture, NAMES};
use hypercourant_cli::{read_input, resolve_input, CliError, Direction, Outcome, Suite, FIXTURE_ENV};

#[derive(Parser, Debug)]
#[command(
    name = "hypercourant",
    version,
    about = "Exact checks for hypersymplectic structures on Courant algebroids"
)]
struct Cli {
    /// Human-readable report instead of JSON.
    #[arg(long, global = true)]
    text: bool,

    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,

    /// Compare supplied `theta_extra` terms with the derived ones.
    #[arg(long, global = true)]
    audit: bool,

    /// Directory searched for input files given by bare name.
    #[arg(long, global = true, env = FIXTURE_ENV, value_name = "DIR")]
    fixtures: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a check suite on an instance document.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Evaluate both sides of an equivalence.
    Theorem {
        file: PathBuf,
        #[arg(long, value_parser = parse_theorem)]
        theorem: TheoremKind,
    },
    /// Convert between triples and hyperkahler quadruples, or swap.
    Correspond {
        file: PathBuf,
        /// `to-hk`, `from-hk` or `swap:<pattern>` with pattern 23, 13, 12 or empty.
        #[arg(long)]
        direction: Direction,
        /// Write the resulting document here (default: standard output).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print a built-in fixture, or write fixtures into a directory.
    Fixture {
        /// Fixture name; all fixtures when omitted (needs a directory).
        name: Option<String>,
        #[arg(long, value_name = "DIR")]
        emit_fixture: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        budget: usize,
    },
}

fn parse_theorem(s: &str) -> Result<TheoremKind, String> {
    TheoremKind::parse(s).ok_or_else(|| {
        let names: Vec<&str> = TheoremKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown theorem `{s}` (known: {})", names.join(", "))
    })
}

fn emit_report(cli: &Cli, r: &hypercourant_cli::ReportDocument, to_stderr: bool) -> std::io::Result<()> {
    let body = if cli.text { r.to_text() } else { r.to_json() };
    match &cli.report {
        Some(p) => std::fs::write(p, body),
        None if to_stderr => std::io::stderr().write_all(body.as_bytes()),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}

fn run_document(cli: &Cli) -> ExitCode {
    let (file, label) = match &cli.command {
        Command::Check { file, suite } => (file, format!("check --suite {}", suite.name())),
        Command::Theorem { file, theorem } => (file, format!("theorem --theorem {}", theorem.name())),
        Command::Correspond { file, direction, .. } => (file, format!("correspond --direction {}", direction.name())),
        Command::Fixture { .. } => unreachable!("handled separately"),
    };
    let path = resolve_input(file, cli.fixtures.as_deref());
    let input = match read_input(&path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result: Result<Outcome, CliError> = match &cli.command {
        Command::Check { suite, .. } => hypercourant_cli::check(&input, *suite, cli.audit),
        Command::Theorem { theorem, .. } => hypercourant_cli::theorem(&input, *theorem, cli.audit),
        Command::Correspond { direction, .. } => hypercourant_cli::correspond(&input, direction, cli.audit),
        Command::Fixture { .. } => unreachable!(),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            let r = invalid_report(&label, &input, &e);
            if cli.report.is_some() {
                let _ = emit_report(cli, &r, true);
            }
            return ExitCode::from(e.exit_code());
        }
    };
    let mut report_to_stderr = false;
    if let Some(doc) = &outcome.document {
        let written = match &cli.command {
            Command::Correspond { out: Some(p), .. } => std::fs::write(p, doc),
            _ => {
                report_to_stderr = true;
                std::io::stdout().write_all(doc.as_bytes())
            }
        };
        if let Err(e) = written {
            eprintln!("error: cannot write document: {e}");
            return ExitCode::from(2);
        }
    }
    if let Err(e) = emit_report(cli, &outcome.report, report_to_stderr) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.report.exit_code)
}

fn write_fixture(dir: &Path, name: &str, seed: u64, budget: usize) -> Result<(), String> {
    let doc = fixture(name, seed, budget).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, doc.emit()).map_err(|e| format!("{}: {e}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run_fixture(cli: &Cli, name: &Option<String>, dir: &Option<PathBuf>, seed: u64, budget: usize) -> ExitCode {
    let result = match (name, dir) {
        (Some(n), None) => fixture(n, seed, budget)
            .map(|d| print!("{}", d.emit()))
            .map_err(|e| e.to_string()),
        (Some(n), Some(d)) => write_fixture(d, n, seed, budget),
        (None, _) => match dir.clone().or_else(|| cli.fixtures.clone()) {
            Some(d) => NAMES.iter().try_for_each(|n| write_fixture(&d, n, seed, budget)),
            None => Err(format!(
                "give a fixture name or a directory (--emit-fixture or {FIXTURE_ENV})"
            )),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Fixture {
            name,
            emit_fixture,
            seed,
            budget,
        } => run_fixture(&cli, name, emit_fixture, *seed, *budget),
        _ => run_document(&cli),
    }
}

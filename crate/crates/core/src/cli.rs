//! Command-line front end.
//!
//! Exit codes: 0 when every executed scenario passes, 1 when a check fails or
//! output cannot be written, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::linalg::ToleranceConfig;
use crate::report::{
    render, run_many, run_scenario, CheckReport, Format, RunConfig, Scenario,
};

/// Overrides the directory `verify` writes reports to when `--out` is absent.
pub const OUT_DIR_ENV: &str = "INTERTWINE_OUT_DIR";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "intertwine",
    version,
    about = "Verify non-isospectral intertwining constructions on truncated models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and emit its report.
    Run(RunArgs),
    /// List the scenario catalogue with parameter schemas.
    List,
    /// Run scenarios at default parameters and summarize.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario name (see `list`).
    scenario: String,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "hbar-omega")]
    hbar_omega: Option<f64>,
    /// Relative residual tolerance for identities and eigen-equations.
    #[arg(long)]
    tol: Option<f64>,
    /// json, markdown or csv.
    #[arg(long, default_value = "json")]
    format: String,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Run the whole catalogue.
    #[arg(long)]
    all: bool,
    /// Scenarios to run when `--all` is not given.
    scenarios: Vec<String>,
    /// Directory for one json report per scenario.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and executes the command.
pub fn main_with(
    args: impl IntoIterator<Item = OsString>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::List => cmd_list(out),
        Command::Verify(a) => cmd_verify(a, out, err),
    }
}

fn usage(err: &mut dyn Write, msg: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {msg}\n\nRun `intertwine --help` for usage.");
    EXIT_USAGE
}

fn verdict(report: &CheckReport) -> i32 {
    if report.overall_pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn cmd_run(a: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let scenario: Scenario = match a.scenario.parse() {
        Ok(s) => s,
        Err(e) => return usage(err, e),
    };
    let format: Format = match a.format.parse() {
        Ok(f) => f,
        Err(e) => return usage(err, e),
    };
    let mut tol = ToleranceConfig::default();
    if let Some(t) = a.tol {
        tol = match ToleranceConfig::new(t, tol.rank_tol, tol.cluster_tol) {
            Ok(t) => t,
            Err(e) => return usage(err, e),
        };
    }
    let cfg = RunConfig {
        scenario: Some(scenario),
        dim: a.dim,
        k: a.k,
        q: a.q,
        epsilon: a.epsilon,
        seed: a.seed,
        hbar_omega: a.hbar_omega,
        tol,
    };
    let report = match run_scenario(&cfg) {
        Ok(r) => r,
        Err(e) => return usage(err, e),
    };
    let bytes = render(&report, format);
    match a.out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &bytes) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_FAIL;
            }
            let _ = writeln!(err, "{}", summary_line(&report));
        }
        None => {
            let _ = out.write_all(&bytes);
        }
    }
    verdict(&report)
}

fn cmd_list(out: &mut dyn Write) -> i32 {
    for sc in Scenario::ALL {
        let _ = writeln!(out, "{:<16} {}", sc.name(), sc.description());
        let _ = writeln!(out, "{:<16} default dim = {}", "", sc.default_dim());
        for p in sc.params() {
            let _ = writeln!(out, "{:<16}   --{:<11} {}", "", p.key().replace('_', "-"), p.schema());
        }
    }
    EXIT_PASS
}

fn summary_line(r: &CheckReport) -> String {
    let failed: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
    let verdict = if r.overall_pass { "PASS" } else { "FAIL" };
    let mut line = format!("{verdict} {:<16} {} checks", r.scenario, r.checks.len());
    if !failed.is_empty() {
        line.push_str(&format!(", failed: {}", failed.join(", ")));
    }
    line
}

fn write_report(dir: &Path, report: &CheckReport) -> std::io::Result<()> {
    std::fs::write(
        dir.join(format!("{}.json", report.scenario)),
        render(report, Format::Json),
    )
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let scenarios: Vec<Scenario> = if a.all {
        if !a.scenarios.is_empty() {
            return usage(err, "`--all` takes no scenario names");
        }
        Scenario::ALL.to_vec()
    } else if a.scenarios.is_empty() {
        return usage(err, "give `--all` or at least one scenario name");
    } else {
        match a.scenarios.iter().map(|s| s.parse()).collect() {
            Ok(v) => v,
            Err(e) => return usage(err, e),
        }
    };
    let dir = a
        .out
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from));
    if let Some(d) = &dir {
        if let Err(e) = std::fs::create_dir_all(d) {
            let _ = writeln!(err, "error: cannot create {}: {e}", d.display());
            return EXIT_FAIL;
        }
    }

    let configs: Vec<RunConfig> = scenarios.iter().map(|&s| RunConfig::new(s)).collect();
    let mut code = EXIT_PASS;
    for (sc, result) in scenarios.iter().zip(run_many(&configs)) {
        match result {
            Ok(report) => {
                let _ = writeln!(out, "{}", summary_line(&report));
                if !report.overall_pass {
                    code = EXIT_FAIL;
                }
                if let Some(d) = &dir {
                    if let Err(e) = write_report(d, &report) {
                        let _ = writeln!(err, "error: cannot write report for {sc}: {e}");
                        code = EXIT_FAIL;
                    }
                }
            }
            Err(e) => {
                let _ = writeln!(out, "FAIL {sc:<16} {e}");
                code = EXIT_FAIL;
            }
        }
    }
    code
}

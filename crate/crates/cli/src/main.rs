use std::path::{Path, PathBuf};
use std::process::ExitCode;

use berry_cumulants_cli::{run, RunConfig, RunError, RunReport, Task};
use clap::{Args, Parser, Subcommand};

/// Berry phase cumulants: sweeps, gauge audits, route comparisons,
/// polarization and convergence studies.
#[derive(Parser)]
#[command(name = "berrycum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spin-1/2 cumulants over a list of field angles.
    Sweep(TaskArgs),
    /// Cumulants with and without a gauge twist.
    GaugeAudit(TaskArgs),
    /// Product, continuum and operator routes side by side.
    RouteCompare(TaskArgs),
    /// Zak phase, position and spread of a two-band Bloch model.
    Polarization(TaskArgs),
    /// Error against the closed form over a ladder of grid sizes.
    Convergence(TaskArgs),
    /// Runs every task with its default configuration in check mode.
    Check(CheckArgs),
}

#[derive(Args)]
struct TaskArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.csv and report.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long)]
    workers: Option<usize>,
    /// Exit with status 3 when any oracle check fails.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Writes one report directory per task under this path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

const ALL_TASKS: [Task; 5] = [Task::SpinSweep, Task::GaugeAudit, Task::RouteCompare, Task::Polarization, Task::Convergence];

fn print_checks(report: &RunReport) {
    for c in &report.checks {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
}

fn run_task(task: Task, args: &TaskArgs) -> Result<bool, RunError> {
    if args.workers == Some(0) {
        return Err(RunError::Config(vec!["--workers: must be at least 1".into()]));
    }
    let config = RunConfig::from_path(&args.config, task)?;
    let out = args.out.clone().or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    let report = run(&config, args.workers)?;
    report.write(&out)?;
    print_checks(&report);
    println!("{} rows written to {}", report.rows.len(), out.join("report.csv").display());
    Ok(report.passed() || !args.check)
}

fn run_check(args: &CheckArgs) -> Result<bool, RunError> {
    if args.workers == Some(0) {
        return Err(RunError::Config(vec!["--workers: must be at least 1".into()]));
    }
    let mut all = true;
    for task in ALL_TASKS {
        let config = RunConfig::from_json("{}", task)?;
        let report = run(&config, args.workers)?;
        if let Some(dir) = &args.out {
            report.write(&Path::new(dir).join(task.as_str()))?;
        }
        print_checks(&report);
        all &= report.passed();
    }
    println!("{}", if all { "all checks passed" } else { "some checks failed" });
    Ok(all)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep(a) => run_task(Task::SpinSweep, a),
        Command::GaugeAudit(a) => run_task(Task::GaugeAudit, a),
        Command::RouteCompare(a) => run_task(Task::RouteCompare, a),
        Command::Polarization(a) => run_task(Task::Polarization, a),
        Command::Convergence(a) => run_task(Task::Convergence, a),
        Command::Check(a) => run_check(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

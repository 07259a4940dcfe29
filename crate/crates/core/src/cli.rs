//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{ArgGroup, Parser, Subcommand};

use crate::bench::{self, emit_report, load_records, run_benchmark, BenchConfig, ReportFormat};
use crate::error::{Error, Result};
use crate::optimizers::{run_method, Budget, Method, OptimizerConfigs, TaskObjective};
use crate::robot::RobotModel;
use crate::solver::SolverLimits;
use crate::task::{load_task, Family, TaskSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bpo", version, about = "Robot base-pose optimization benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a family of tasks into DIR/<family>/<seed>.json.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "tasks")]
        out: PathBuf,
    },
    /// Run one optimizer on one task and write its JSONL record.
    #[command(group(ArgGroup::new("budget").args(["budget_evals", "budget_secs"])))]
    Optimize {
        #[arg(long)]
        task: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long, default_value_t = 3)]
        arity: usize,
        #[arg(long)]
        budget_evals: Option<usize>,
        #[arg(long)]
        budget_secs: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Robot description JSON; the bundled reference arm by default.
        #[arg(long)]
        robot: Option<PathBuf>,
    },
    /// Run every cell of a benchmark config.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
    /// Aggregate stored records into convergence statistics.
    Stats {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
        format: String,
    },
    /// Render stored records as a two-panel SVG.
    Plot {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match run(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen { family, count, seed, out } => {
            let set = TaskSet::generate(family, count, seed)?;
            for path in set.save(&out)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Optimize {
            task,
            method,
            arity,
            budget_evals,
            budget_secs,
            seed,
            out,
            robot,
        } => {
            let budget = match (budget_evals, budget_secs) {
                (_, Some(s)) => Budget::Seconds(s),
                (Some(n), None) => Budget::Evaluations(n),
                (None, None) => Budget::Evaluations(200),
            };
            budget.validate()?;
            let robot = match robot {
                Some(p) => RobotModel::load(p)?,
                None => RobotModel::reference_6r(),
            };
            let task = load_task(&task)?.with_arity(arity)?;
            let limits = SolverLimits::default();
            let objective = TaskObjective::new(&robot, &task, &limits);
            let mut rng = bench::cell_rng(&task.id, method, seed);
            let record = run_method(method, &objective, budget, &OptimizerConfigs::default(), &mut rng);
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            std::fs::write(&out, record.to_jsonl()?).map_err(|e| Error::io(&out, e))?;
            println!(
                "{} {method} a{arity}: {} evaluations, best cost {:.4}, solved {}",
                task.id,
                record.history.len(),
                record.best_cost,
                record.any_success()
            );
            Ok(())
        }
        Command::Bench { config } => {
            let cfg = BenchConfig::load(&config)?;
            let result = run_benchmark(&cfg)?;
            let failed = result.failed().count();
            println!(
                "{} cells, {} failed, records in {}",
                result.manifest.len(),
                failed,
                result.out_dir.join(bench::RECORDS_DIR).display()
            );
            for f in result.failed() {
                eprintln!("cell {} {} s{} failed: {:?}", f.task_id, f.method, f.seed, f.status);
            }
            Ok(())
        }
        Command::Stats { records, out, format } => {
            let cells = load_records(&records)?;
            let curves = bench::curves_for(&cells)?;
            emit_report(&curves, format.parse::<ReportFormat>()?, &out, "")
        }
        Command::Plot { records, out } => {
            let cells = load_records(&records)?;
            let curves = bench::curves_for(&cells)?;
            let label = if cells[0].budget.is_evaluations() { "evaluations" } else { "seconds" };
            emit_report(&curves, ReportFormat::Svg, &out, label)
        }
    }
}

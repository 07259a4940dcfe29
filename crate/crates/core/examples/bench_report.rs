//! A small benchmark through the library API: run the cells, reload the
//! records from disk, and write CSV, JSON and SVG reports.
//!
//! ```text
//! cargo run --release --example bench_report -- [out_dir]
//! ```

use basepose::bench::{curves_for, emit_report, load_records, run_benchmark, BenchConfig, ReportFormat};
use basepose::optimizers::{Budget, Method, OptimizerConfigs};
use basepose::task::{Family, TaskSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("basepose-bench"));
    let tasks_dir = out.join("tasks");
    TaskSet::generate(Family::Simple, 4, 0)?.save(&tasks_dir)?;

    let cfg = BenchConfig {
        tasks: vec![tasks_dir],
        methods: vec![Method::Dummy, Method::Random, Method::Ga],
        seeds: vec![0, 1],
        budget: Budget::Evaluations(60),
        arity: 3,
        parallelism: 2,
        out_dir: out.clone(),
        robot: None,
        optimizers: OptimizerConfigs::default(),
    };
    let result = run_benchmark(&cfg)?;
    println!("{} cells, {} failed", result.manifest.len(), result.failed().count());

    let curves = curves_for(&load_records(&out)?)?;
    for c in &curves {
        let last = c.grid.len() - 1;
        let (cost, succ) = (&c.best_cost[last], &c.success_rate[last]);
        println!(
            "{:>7}: cost {:.2} [{:.2}, {:.2}]  success {:.2} [{:.2}, {:.2}]",
            c.method, cost.mean, cost.ci_low, cost.ci_high, succ.mean, succ.ci_low, succ.ci_high
        );
    }
    emit_report(&curves, ReportFormat::Csv, out.join("report.csv"), "")?;
    emit_report(&curves, ReportFormat::Json, out.join("report.json"), "")?;
    emit_report(&curves, ReportFormat::Svg, out.join("report.svg"), "evaluations")?;
    println!("reports in {}", out.display());
    Ok(())
}

//! Fixed-budget benchmark runs over (task × method × seed) cells.
//!
//! Every cell gets its own random stream, seeded by [`cell_seed`]: the 64-bit
//! FNV-1a hash of `"<task id>\0<method>\0<seed>"` feeds a ChaCha8 generator.
//! Records go to `<out>/records/<task>__<method>__a<arity>__s<seed>.jsonl`
//! and `<out>/cells.json` lists every cell with its status.

pub mod report;
pub mod stats;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{emit_report, render_svg, ReportFormat};
pub use stats::{bootstrap_ci, build_curves, checkpoint_grid, success_rate, ConvergenceCurve, SummaryStats};

use crate::error::{Error, Result};
use crate::optimizers::{run_method, Budget, Method, OptRunRecord, OptimizerConfigs, TaskObjective};
use crate::robot::RobotModel;
use crate::solver::SolverLimits;
use crate::task::{load_task, Task};

/// Environment variable overriding [`BenchConfig::parallelism`].
pub const THREADS_ENV: &str = "BPO_THREADS";
pub const MANIFEST: &str = "cells.json";
pub const RECORDS_DIR: &str = "records";

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

fn default_parallelism() -> usize {
    1
}

fn default_budget() -> Budget {
    Budget::Evaluations(200)
}

fn default_arity() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// Task files, or directories searched recursively for `*.json` tasks.
    pub tasks: Vec<PathBuf>,
    pub methods: Vec<Method>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_budget")]
    pub budget: Budget,
    #[serde(default = "default_arity")]
    pub arity: usize,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    pub out_dir: PathBuf,
    /// Robot description; the bundled reference arm when absent.
    #[serde(default)]
    pub robot: Option<PathBuf>,
    #[serde(default)]
    pub optimizers: OptimizerConfigs,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() || self.methods.is_empty() || self.seeds.is_empty() {
            return Err(Error::Invariant("benchmark needs tasks, methods and seeds".into()));
        }
        if self.arity != 3 && self.arity != 6 {
            return Err(Error::Arity(self.arity));
        }
        if self.parallelism == 0 {
            return Err(Error::Invariant("parallelism must be at least 1".into()));
        }
        self.budget.validate()?;
        self.optimizers.ga.validate()?;
        self.optimizers.bo.validate()?;
        self.optimizers.sgd.validate()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: BenchConfig = serde_json::from_str(&text).map_err(|e| crate::task::parse_error(&text, &e))?;
        // Relative paths are relative to the config file.
        if let Some(dir) = path.parent() {
            let rebase = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            };
            cfg.tasks.iter_mut().for_each(rebase);
            rebase(&mut cfg.out_dir);
            cfg.robot.iter_mut().for_each(rebase);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Worker count after the environment override.
    pub fn threads(&self) -> usize {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&n: &usize| n > 0)
            .unwrap_or(self.parallelism)
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn cell_seed(task_id: &str, method: Method, seed: u64) -> u64 {
    fnv1a64(format!("{task_id}\0{}\0{seed}", method.name()).as_bytes())
}

pub fn cell_rng(task_id: &str, method: Method, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cell_seed(task_id, method, seed))
}

pub fn record_file_name(task_id: &str, method: Method, arity: usize, seed: u64) -> String {
    format!("{task_id}__{}__a{arity}__s{seed}.jsonl", method.name())
}

/// Loads tasks from files and directories, directories in sorted path order.
pub fn collect_tasks(paths: &[PathBuf]) -> Result<Vec<Task>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found = Vec::new();
            walk_json(p, &mut found)?;
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    files.iter().map(load_task).collect()
}

fn walk_json(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            walk_json(&path, out)?;
        } else if path.extension().is_some_and(|e| e == "json") {
            out.push(path);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellStatus {
    Ok { file: String },
    Failed { error: String },
}

/// Manifest entry for one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellInfo {
    pub task_id: String,
    pub method: Method,
    pub arity: usize,
    pub seed: u64,
    pub budget: Budget,
    pub fail_cost: f64,
    #[serde(flatten)]
    pub status: CellStatus,
}

/// A finished cell with its run history.
#[derive(Clone, Debug, PartialEq)]
pub struct CellRecord {
    pub task_id: String,
    pub method: Method,
    pub arity: usize,
    pub seed: u64,
    pub budget: Budget,
    pub record: OptRunRecord,
}

#[derive(Clone, Debug)]
pub struct BenchResult {
    pub out_dir: PathBuf,
    pub manifest: Vec<CellInfo>,
    pub cells: Vec<CellRecord>,
}

impl BenchResult {
    pub fn failed(&self) -> impl Iterator<Item = &CellInfo> {
        self.manifest.iter().filter(|c| matches!(c.status, CellStatus::Failed { .. }))
    }
}

/// Runs `f`, turning a panic into its message.
pub fn isolate<T>(f: impl FnOnce() -> T) -> std::result::Result<T, String> {
    catch_unwind(AssertUnwindSafe(f)).map_err(|p| {
        p.downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into())
    })
}

/// Runs every cell once. Cells are independent: a panicking cell is
/// recorded as failed and the rest carry on.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchResult> {
    cfg.validate()?;
    let robot = match &cfg.robot {
        Some(p) => RobotModel::load(p)?,
        None => RobotModel::reference_6r(),
    };
    let tasks: Vec<Task> = collect_tasks(&cfg.tasks)?.iter().map(|t| t.with_arity(cfg.arity)).collect::<Result<_>>()?;
    if tasks.is_empty() {
        return Err(Error::Data("no task files found".into()));
    }
    let records_dir = cfg.out_dir.join(RECORDS_DIR);
    std::fs::create_dir_all(&records_dir).map_err(|e| Error::io(&records_dir, e))?;

    let limits = SolverLimits::default();
    let jobs: Vec<(&Task, Method, u64)> = tasks
        .iter()
        .flat_map(|t| cfg.methods.iter().flat_map(move |&m| cfg.seeds.iter().map(move |&s| (t, m, s))))
        .collect();
    let run_cell = |&(task, method, seed): &(&Task, Method, u64)| -> (CellInfo, Option<CellRecord>) {
        let outcome = isolate(|| {
            let objective = TaskObjective::new(&robot, task, &limits);
            let mut rng = cell_rng(&task.id, method, seed);
            run_method(method, &objective, cfg.budget, &cfg.optimizers, &mut rng)
        });
        let mut info = CellInfo {
            task_id: task.id.clone(),
            method,
            arity: cfg.arity,
            seed,
            budget: cfg.budget,
            fail_cost: task.fail_cost,
            status: CellStatus::Failed { error: String::new() },
        };
        let record = match outcome {
            Ok(r) => r,
            Err(msg) => {
                info.status = CellStatus::Failed { error: msg };
                return (info, None);
            }
        };
        let file = record_file_name(&task.id, method, cfg.arity, seed);
        let path = records_dir.join(&file);
        let written = record.to_jsonl().and_then(|text| std::fs::write(&path, text).map_err(|e| Error::io(&path, e)));
        match written {
            Ok(()) => {
                info.status = CellStatus::Ok { file };
                let cell = CellRecord {
                    task_id: task.id.clone(),
                    method,
                    arity: cfg.arity,
                    seed,
                    budget: cfg.budget,
                    record,
                };
                (info, Some(cell))
            }
            Err(e) => {
                info.status = CellStatus::Failed { error: e.to_string() };
                (info, None)
            }
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads())
        .build()
        .map_err(|e| Error::Data(format!("thread pool: {e}")))?;
    let results: Vec<(CellInfo, Option<CellRecord>)> = pool.install(|| jobs.par_iter().map(run_cell).collect());

    let manifest: Vec<CellInfo> = results.iter().map(|(i, _)| i.clone()).collect();
    let cells: Vec<CellRecord> = results.into_iter().filter_map(|(_, c)| c).collect();
    let manifest_path = cfg.out_dir.join(MANIFEST);
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(|e| Error::io(&manifest_path, e))?;
    Ok(BenchResult {
        out_dir: cfg.out_dir.clone(),
        manifest,
        cells,
    })
}

/// Reads the manifest and every record file that still exists.
pub fn load_records(dir: impl AsRef<Path>) -> Result<Vec<CellRecord>> {
    let dir = dir.as_ref();
    let manifest_path = dir.join(MANIFEST);
    let text = std::fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Vec<CellInfo> = serde_json::from_str(&text).map_err(|e| crate::task::parse_error(&text, &e))?;
    let mut cells = Vec::new();
    for info in manifest {
        let CellStatus::Ok { file } = &info.status else {
            continue;
        };
        let path = dir.join(RECORDS_DIR).join(file);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
            Err(e) => return Err(Error::io(&path, e)),
        };
        cells.push(CellRecord {
            record: OptRunRecord::from_jsonl(&text, info.fail_cost)?,
            task_id: info.task_id,
            method: info.method,
            arity: info.arity,
            seed: info.seed,
            budget: info.budget,
        });
    }
    Ok(cells)
}

/// Curves on the default checkpoint grid of the records' largest budget.
pub fn curves_for(cells: &[CellRecord]) -> Result<Vec<ConvergenceCurve>> {
    let Some(budget) = cells.iter().map(|c| c.budget).max_by(|a, b| a.limit().total_cmp(&b.limit())) else {
        return Err(Error::Data("no records found".into()));
    };
    build_curves(cells, &checkpoint_grid(&budget), stats::DEFAULT_RESAMPLES)
}

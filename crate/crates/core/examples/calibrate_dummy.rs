//! Success rate of the nominal base pose (the dummy optimizer) on a batch of
//! generated tasks, next to uniform random search with a small budget.
//!
//! ```text
//! cargo run --release --example calibrate_dummy -- [family] [count] [seed] [evals] [arity]
//! ```

use std::time::Instant;

use basepose::optimizers::{opt_dummy, opt_random, Budget, TaskObjective};
use basepose::robot::RobotModel;
use basepose::solver::{evaluate_base_pose, SolverLimits, Stage};
use basepose::task::{Family, TaskSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map(|s| s.parse()).transpose()?.unwrap_or(Family::Simple);
    let count: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(50);
    let seed: u64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let evals: usize = args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(50);
    let arity: usize = args.get(4).map(|s| s.parse()).transpose()?.unwrap_or(3);

    let robot = RobotModel::reference_6r();
    let limits = SolverLimits::default();
    let set = TaskSet::generate(family, count, seed)?;

    let mut stages = std::collections::BTreeMap::<String, usize>::new();
    let (mut dummy_ok, mut random_ok) = (0, 0);
    let started = Instant::now();
    let mut n_evals = 0;
    for task in &set.tasks {
        let task = task.with_arity(arity)?;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = evaluate_base_pose(&robot, &task, &task.base_domain.nominal_params(), &mut rng, &limits)?;
        let key = out.failed_stage.map_or("success".to_string(), |s: Stage| format!("{s:?}"));
        *stages.entry(key).or_default() += 1;

        let obj = TaskObjective::new(&robot, &task, &limits);
        if opt_dummy(&obj, &mut rng).any_success() {
            dummy_ok += 1;
        }
        let rec = opt_random(&obj, Budget::Evaluations(evals), &mut rng);
        n_evals += rec.history.len() + 1;
        if rec.any_success() {
            random_ok += 1;
        }
    }
    let secs = started.elapsed().as_secs_f64();
    println!("family {family}, {count} tasks, arity {arity}");
    println!("nominal outcome by stage: {stages:?}");
    println!("dummy success  {:.3}", dummy_ok as f64 / count as f64);
    println!("random success {:.3} ({evals} evaluations)", random_ok as f64 / count as f64);
    println!("{:.3} ms per evaluation", 1e3 * secs / n_evals as f64);
    Ok(())
}

//! Every optimizer on the same batch of tasks with the same budget: success
//! rate, mean best cost (failure cost for unsolved tasks) and wall time.
//!
//! ```text
//! cargo run --release --example compare_optimizers -- [family] [tasks] [evals] [arity]
//! ```

use std::time::Instant;

use basepose::bench::cell_rng;
use basepose::optimizers::{run_method, Budget, Method, OptimizerConfigs, TaskObjective};
use basepose::robot::RobotModel;
use basepose::solver::SolverLimits;
use basepose::task::{Family, TaskSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let family: Family = args.first().map(|s| s.parse()).transpose()?.unwrap_or(Family::Simple);
    let n: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(10);
    let evals: usize = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(100);
    let arity: usize = args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(3);

    let robot = RobotModel::reference_6r();
    let limits = SolverLimits::default();
    let set = TaskSet::generate(family, n, 0)?;
    let configs = OptimizerConfigs::default();
    println!("{family} x {n}, {evals} evaluations, arity {arity}");
    for method in Method::ALL {
        let start = Instant::now();
        let (mut solved, mut cost) = (0usize, 0.0);
        for t in &set.tasks {
            let task = t.with_arity(arity)?;
            let objective = TaskObjective::new(&robot, &task, &limits);
            let mut rng = cell_rng(&task.id, method, 0);
            let rec = run_method(method, &objective, Budget::Evaluations(evals), &configs, &mut rng);
            solved += usize::from(rec.any_success());
            cost += rec.best_cost;
        }
        println!(
            "{method:>7}: success {:.2}  mean cost {:>6.2}  {:.1} s",
            solved as f64 / n as f64,
            cost / n as f64,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}

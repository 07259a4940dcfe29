//! Runs one optimizer on one task and prints its anytime trace: the best
//! cost found after each evaluation that improved it.
//!
//! ```text
//! cargo run --release --example optimize_task -- [method] [evals] [arity] [family] [seed]
//! ```

use basepose::optimizers::{run_method, Budget, Method, OptimizerConfigs, TaskObjective};
use basepose::robot::RobotModel;
use basepose::solver::SolverLimits;
use basepose::task::{gen_family, Family};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let method: Method = args.first().map(|s| s.parse()).transpose()?.unwrap_or(Method::Ga);
    let evals: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(200);
    let arity: usize = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let family: Family = args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(Family::Simple);
    let seed: u64 = args.get(4).map(|s| s.parse()).transpose()?.unwrap_or(0);

    let robot = RobotModel::reference_6r();
    let task = gen_family(family, seed)?.with_arity(arity)?;
    let limits = SolverLimits::default();
    let objective = TaskObjective::new(&robot, &task, &limits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let record = run_method(method, &objective, Budget::Evaluations(evals), &OptimizerConfigs::default(), &mut rng);

    println!("{method} on {} (arity {arity}), {} evaluations", task.id, record.history.len());
    let mut best = f64::INFINITY;
    for e in &record.history {
        if e.cost < best {
            best = e.cost;
            println!("  after {:>4} evaluations: {:.3}{}", e.consumed, e.cost, if e.success { "" } else { " (failure)" });
        }
    }
    println!("best cost {:.3}, params {:?}", record.best_cost, record.best_params.as_ref().map(|b| b.values()));
    Ok(())
}

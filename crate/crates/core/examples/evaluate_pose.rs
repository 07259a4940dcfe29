//! Scores a few candidate base poses on one generated task and shows which
//! pipeline stage rejected each infeasible one.
//!
//! ```text
//! cargo run --release --example evaluate_pose -- [seed]
//! ```

use basepose::robot::RobotModel;
use basepose::se3::BaseParams;
use basepose::solver::{evaluate_base_pose, SolverLimits};
use basepose::task::{gen_simple, sample_base_params};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let robot = RobotModel::reference_6r();
    let task = gen_simple(seed)?;
    let limits = SolverLimits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    println!(
        "task {}: {} goals, {} obstacles, failure cost {}",
        task.id,
        task.goals.len(),
        task.obstacles.len(),
        task.fail_cost
    );

    let mut candidates = vec![BaseParams::zeros(task.base_domain.arity())?];
    candidates.extend((0..7).map(|_| sample_base_params(&task.base_domain, &mut rng)));
    for b in &candidates {
        let out = evaluate_base_pose(&robot, &task, b, &mut rng, &limits)?;
        let p = task.base_domain.base_pose(b).translation;
        let verdict = match out.failed_stage {
            None => format!("cycle time {:.3} s", out.cost),
            Some(stage) => format!("failed at {stage:?}, cost {}", out.cost),
        };
        println!(
            "base ({:+.2}, {:+.2}, {:+.2}): {verdict} [{} IK descents, {} plans]",
            p.x, p.y, p.z, out.work.ik_descents, out.work.plans
        );
    }
    Ok(())
}

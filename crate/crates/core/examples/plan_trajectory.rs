//! Solves IK for two goals from a fixed base, connects them with
//! RRT-Connect and time-parameterizes the path under joint limits.
//!
//! ```text
//! cargo run --release --example plan_trajectory
//! ```

use basepose::robot::{Configuration, RobotModel};
use basepose::se3::Pose;
use basepose::solver::ik::solve_ik;
use basepose::solver::{rrt_connect, time_parameterize, PlannerOptions};
use basepose::task::GoalPose;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let robot = RobotModel::reference_6r();
    let base = Pose::identity();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // Two goals generated from known configurations, so both are reachable.
    let goals: Vec<GoalPose> = [[0.3, 0.6, 0.9, 0.0, 0.8, 0.0], [-1.2, 0.4, 1.1, 0.5, 0.6, -0.4]]
        .iter()
        .map(|q| robot.forward_kinematics(&Configuration(q.to_vec())).map(GoalPose::new))
        .collect::<Result<_, _>>()?;
    let mut configs = Vec::new();
    for g in &goals {
        let ik = solve_ik(&robot, &base, g, &mut rng, 200, 10);
        println!("IK: converged {} after {} steps, residual {:.2e}", ik.converged, ik.iterations, ik.residual);
        configs.push(ik.q);
    }

    let path = rrt_connect(&robot, &base, &configs[0], &configs[1], &[], &mut rng, &PlannerOptions::default())?;
    println!("path: {} waypoints, joint-space length {:.3} rad", path.waypoints.len(), path.length());
    let traj = time_parameterize(&robot, &path);
    println!("trajectory: {} segments, total time {:.3} s", traj.segments.len(), traj.total_time);
    for s in traj.sampled(4.0) {
        let peak = s.qd.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        println!("  t = {:.3} s  peak joint speed {:.3} rad/s", s.t, peak);
    }
    Ok(())
}

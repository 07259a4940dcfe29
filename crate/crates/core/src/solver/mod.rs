//! Evaluates one candidate base pose end to end.
//!
//! Filters run cheapest first and stop at the first failure:
//!
//! 1. reach: every goal within [`RobotModel::max_reach`] of the base;
//! 2. IK: a converged solution for every goal;
//! 3. collision-free IK: at least one converged solution per goal that clears
//!    obstacles and the robot itself;
//! 4. planning: RRT-Connect between consecutive goal configurations;
//! 5. timing: rest-to-rest trapezoids over the concatenated path.
//!
//! A feasible pose costs its cycle time; anything else costs the task's
//! failure cost.

pub mod ik;
pub mod planner;
pub mod trajectory;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use ik::{descend, solve_ik, solve_ik_with, IkOptions, IkResult};
pub use planner::{rrt_connect, JointPath, PlanError, PlannerOptions};
pub use trajectory::{time_parameterize, trapezoid_duration, Trajectory};

use crate::error::{Error, Result};
use crate::robot::{Configuration, RobotModel};
use crate::se3::BaseParams;
use crate::task::Task;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SolverLimits {
    pub ik: IkOptions,
    pub planner: PlannerOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Reach,
    Ik,
    CollisionIk,
    Planning,
    Parameterization,
}

/// Counters describing how far the pipeline got and what it spent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveWork {
    pub ik_descents: usize,
    pub ik_steps: usize,
    pub plans: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub success: bool,
    /// Cycle time on success, the task's failure cost otherwise.
    pub cost: f64,
    pub trajectory: Option<Trajectory>,
    pub failed_stage: Option<Stage>,
    /// Goal configurations found before the pipeline stopped.
    pub goal_configurations: Vec<Configuration>,
    pub work: SolveWork,
}

impl SolveOutcome {
    fn failure(task: &Task, stage: Stage, goal_configurations: Vec<Configuration>, work: SolveWork) -> Self {
        SolveOutcome {
            success: false,
            cost: task.fail_cost,
            trajectory: None,
            failed_stage: Some(stage),
            goal_configurations,
            work,
        }
    }
}

/// True iff every goal lies within the robot's reach of the base position
/// (inclusive).
pub fn filter_reach(robot: &RobotModel, b: &BaseParams, task: &Task) -> bool {
    let base = task.base_domain.base_pose(b);
    let reach = robot.max_reach();
    task.goals.iter().all(|g| (base.translation - g.pose.translation).norm() <= reach)
}

pub fn evaluate_base_pose<R: Rng + ?Sized>(
    robot: &RobotModel,
    task: &Task,
    b: &BaseParams,
    rng: &mut R,
    limits: &SolverLimits,
) -> Result<SolveOutcome> {
    if !task.base_domain.contains(b) {
        return Err(Error::Precondition(format!(
            "base parameters {:?} outside the task's base domain",
            b.values()
        )));
    }
    let mut work = SolveWork::default();
    if !filter_reach(robot, b, task) {
        return Ok(SolveOutcome::failure(task, Stage::Reach, vec![], work));
    }

    let base = task.base_domain.base_pose(b);
    let mut configs = Vec::with_capacity(task.goals.len());
    for goal in &task.goals {
        let (res, search) = ik::solve_ik_with(robot, &base, goal, None, rng, &limits.ik, |q| {
            robot.collision_free(&base, q, &task.obstacles)
        });
        work.ik_descents += search.descents;
        work.ik_steps += search.steps;
        if !search.accepted {
            let stage = if search.converged == 0 { Stage::Ik } else { Stage::CollisionIk };
            return Ok(SolveOutcome::failure(task, stage, configs, work));
        }
        configs.push(res.q);
    }

    if configs.len() == 1 {
        return Ok(SolveOutcome {
            success: true,
            cost: 0.0,
            trajectory: Some(Trajectory::stationary(&configs[0])),
            failed_stage: None,
            goal_configurations: configs,
            work,
        });
    }

    let mut waypoints: Vec<Configuration> = vec![configs[0].clone()];
    for pair in configs.windows(2) {
        work.plans += 1;
        match planner::rrt_connect(robot, &base, &pair[0], &pair[1], &task.obstacles, rng, &limits.planner) {
            Ok(path) => waypoints.extend(path.waypoints.into_iter().skip(1)),
            Err(_) => return Ok(SolveOutcome::failure(task, Stage::Planning, configs, work)),
        }
    }

    let trajectory = time_parameterize(robot, &JointPath { waypoints });
    if !trajectory.total_time.is_finite() || trajectory.total_time >= task.fail_cost {
        return Ok(SolveOutcome::failure(task, Stage::Parameterization, configs, work));
    }
    Ok(SolveOutcome {
        success: true,
        cost: trajectory.total_time,
        trajectory: Some(trajectory),
        failed_stage: None,
        goal_configurations: configs,
        work,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::Obstacle;
    use crate::se3::{Pose, Rotation};
    use crate::task::{BaseDomain, GoalPose};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn task_with(goals: Vec<GoalPose>, obstacles: Vec<Obstacle>) -> Task {
        Task {
            id: "unit".into(),
            tags: vec![],
            fail_cost: 20.0,
            goals,
            obstacles,
            base_domain: BaseDomain::new(Pose::identity(), [1.0, 1.0, 1.0], false),
        }
    }

    fn reachable_goal(robot: &RobotModel, q: &[f64]) -> GoalPose {
        GoalPose::new(robot.forward_kinematics(&Configuration(q.to_vec())).unwrap())
    }

    #[test]
    fn reach_filter_boundaries() {
        let r = RobotModel::reference_6r();
        let reach = r.max_reach();
        let far = task_with(vec![GoalPose::new(Pose::from_translation(10.0, 0.0, 0.0))], vec![]);
        let zero = BaseParams::zeros(3).unwrap();
        assert!(!filter_reach(&r, &zero, &far));
        let here = task_with(vec![GoalPose::new(Pose::identity())], vec![]);
        assert!(filter_reach(&r, &zero, &here));
        let edge = task_with(vec![GoalPose::new(Pose::from_translation(reach, 0.0, 0.0))], vec![]);
        assert!(filter_reach(&r, &zero, &edge));
    }

    #[test]
    fn unreachable_goal_costs_fail_cost_without_ik() {
        let r = RobotModel::reference_6r();
        let t = task_with(vec![GoalPose::new(Pose::from_translation(5.0, 0.0, 0.0))], vec![]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = evaluate_base_pose(&r, &t, &BaseParams::zeros(3).unwrap(), &mut rng, &SolverLimits::default()).unwrap();
        assert!(!out.success);
        assert_eq!(out.cost, 20.0);
        assert_eq!(out.failed_stage, Some(Stage::Reach));
        assert_eq!(out.work, SolveWork::default());
    }

    #[test]
    fn single_goal_costs_nothing() {
        let r = RobotModel::reference_6r();
        let t = task_with(vec![reachable_goal(&r, &[0.3, 0.4, 0.8, 0.0, 0.6, 0.0])], vec![]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = evaluate_base_pose(&r, &t, &BaseParams::zeros(3).unwrap(), &mut rng, &SolverLimits::default()).unwrap();
        assert!(out.success, "{:?}", out.failed_stage);
        assert_eq!(out.cost, 0.0);
    }

    #[test]
    fn two_goals_in_free_space_cost_one_trapezoid() {
        let r = RobotModel::reference_6r();
        let t = task_with(
            vec![reachable_goal(&r, &[0.3, 0.4, 0.8, 0.0, 0.6, 0.0]), reachable_goal(&r, &[-0.9, 0.2, 1.1, 0.5, -0.4, 1.0])],
            vec![],
        );
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = evaluate_base_pose(&r, &t, &BaseParams::zeros(3).unwrap(), &mut rng, &SolverLimits::default()).unwrap();
        assert!(out.success, "{:?}", out.failed_stage);
        let (a, b) = (&out.goal_configurations[0], &out.goal_configurations[1]);
        // Independent closed form: slowest joint over the straight segment.
        let expected = r
            .joints
            .iter()
            .zip(a.as_slice().iter().zip(b.as_slice()))
            .map(|(j, (x, y))| {
                let l = (y - x).abs();
                if l >= j.v_max * j.v_max / j.a_max {
                    l / j.v_max + j.v_max / j.a_max
                } else {
                    2.0 * (l / j.a_max).sqrt()
                }
            })
            .fold(0.0, f64::max);
        assert_abs_diff_eq!(out.cost, expected, epsilon = 1e-9);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let r = RobotModel::reference_6r();
        let t = task_with(vec![GoalPose::new(Pose::identity())], vec![]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = BaseParams::new(vec![2.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            evaluate_base_pose(&r, &t, &b, &mut rng, &SolverLimits::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn goal_inside_obstacle_fails_collision_stage() {
        let r = RobotModel::reference_6r();
        let goal = reachable_goal(&r, &[0.3, 0.4, 0.8, 0.0, 0.6, 0.0]);
        let block = Obstacle::Box {
            center: Pose::new(Rotation::identity(), goal.pose.translation),
            half_extents: [0.1; 3],
        };
        let t = task_with(vec![goal], vec![block]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let out = evaluate_base_pose(&r, &t, &BaseParams::zeros(3).unwrap(), &mut rng, &SolverLimits::default()).unwrap();
        assert_eq!(out.failed_stage, Some(Stage::CollisionIk));
        assert_eq!(out.cost, 20.0);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let r = RobotModel::reference_6r();
        let t = crate::task::gen_simple(3).unwrap();
        let b = BaseParams::new(vec![0.1, -0.2, 0.05]).unwrap();
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            evaluate_base_pose(&r, &t, &b, &mut rng, &SolverLimits::default()).unwrap()
        };
        assert_eq!(run(9), run(9));
    }
}

//! Damped least-squares inverse kinematics with random restarts.

use nalgebra::{Matrix6, Vector6};
use rand::Rng;

use crate::robot::{Configuration, RobotModel};
use crate::se3::{pose_distance, DistanceWeights, Pose, Rotation};
use crate::task::GoalPose;

/// Default iteration cap per IK descent.
pub const DEFAULT_IK_STEPS: usize = 33;

#[derive(Clone, Debug, PartialEq)]
pub struct IkOptions {
    pub max_steps: usize,
    /// Random restarts after the first descent.
    pub restarts: usize,
    pub damping: f64,
    /// Largest per-joint change in one step, radians.
    pub max_joint_step: f64,
    /// Scales the rotational error rows; `0` ignores orientation entirely.
    pub rot_weight: f64,
    pub weights: DistanceWeights,
}

impl Default for IkOptions {
    fn default() -> Self {
        IkOptions {
            max_steps: DEFAULT_IK_STEPS,
            restarts: 10,
            damping: 1e-3,
            max_joint_step: 0.5,
            rot_weight: 1.0,
            weights: DistanceWeights::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IkResult {
    pub q: Configuration,
    /// Goal distance at `q`.
    pub residual: f64,
    pub converged: bool,
    /// Steps taken by the descent that produced `q`.
    pub iterations: usize,
}

/// Position and rotation errors of the world end-effector pose against a goal.
pub fn goal_errors(ee_world: &Pose, goal: &GoalPose) -> (f64, f64) {
    let pos = (goal.pose.translation - ee_world.translation).norm();
    let rot = crate::se3::rotation_angle(&ee_world.rotation, &goal.pose.rotation);
    (pos, rot)
}

fn within_tolerance(ee_world: &Pose, goal: &GoalPose, opts: &IkOptions) -> bool {
    let (pos, rot) = goal_errors(ee_world, goal);
    pos <= goal.tol_pos && (opts.rot_weight == 0.0 || rot <= goal.tol_rot)
}

fn residual(ee_world: &Pose, goal: &GoalPose, opts: &IkOptions) -> f64 {
    if opts.rot_weight == 0.0 {
        (goal.pose.translation - ee_world.translation).norm()
    } else {
        pose_distance(ee_world, &goal.pose, &opts.weights)
    }
}

/// One damped least-squares descent from `q0`, clamping to joint limits.
pub fn descend(robot: &RobotModel, base: &Pose, goal: &GoalPose, q0: &Configuration, opts: &IkOptions) -> IkResult {
    let mut q: Vec<f64> = robot.joints.iter().zip(q0.as_slice()).map(|(j, &v)| j.clamp(v)).collect();
    let lambda2 = opts.damping * opts.damping;
    let mut iterations = 0;
    loop {
        let (ee, jac) = robot.fk_and_jacobian(&q);
        let ee_world = base.compose(&ee);
        if within_tolerance(&ee_world, goal, opts) || iterations >= opts.max_steps {
            let converged = within_tolerance(&ee_world, goal, opts);
            return IkResult {
                residual: residual(&ee_world, goal, opts),
                q: Configuration(q),
                converged,
                iterations,
            };
        }
        iterations += 1;

        let e_pos = goal.pose.translation - ee_world.translation;
        let e_rot = (goal.pose.rotation * ee_world.rotation.transpose()).to_axis_angle() * opts.rot_weight;
        let err = Vector6::new(e_pos.x, e_pos.y, e_pos.z, e_rot.x, e_rot.y, e_rot.z);

        // Jacobian in world coordinates.
        let r = base.rotation.matrix();
        let mut jw = jac;
        for i in 0..jw.ncols() {
            let lin = r * jw.fixed_view::<3, 1>(0, i);
            let ang = r * jw.fixed_view::<3, 1>(3, i) * opts.rot_weight;
            jw.fixed_view_mut::<3, 1>(0, i).copy_from(&lin);
            jw.fixed_view_mut::<3, 1>(3, i).copy_from(&ang);
        }
        let jjt: Matrix6<f64> = &jw * jw.transpose() + Matrix6::identity() * lambda2;
        let Some(chol) = jjt.cholesky() else {
            iterations = opts.max_steps;
            continue;
        };
        let dq = jw.transpose() * chol.solve(&err);
        let largest = dq.amax();
        let scale = if largest > opts.max_joint_step { opts.max_joint_step / largest } else { 1.0 };
        let mut moved = 0.0f64;
        for (i, j) in robot.joints.iter().enumerate() {
            let next = j.clamp(q[i] + dq[i] * scale);
            moved = moved.max((next - q[i]).abs());
            q[i] = next;
        }
        if moved < 1e-12 {
            // Pinned against limits or at a stationary point.
            iterations = opts.max_steps;
        }
    }
}

pub fn random_configuration<R: Rng + ?Sized>(robot: &RobotModel, rng: &mut R) -> Configuration {
    Configuration(robot.joints.iter().map(|j| rng.random_range(j.q_min..=j.q_max)).collect())
}

/// Best-of-restarts IK. The first descent starts at `seed` when given.
/// Returns as soon as a converged solution satisfying `accept` is found;
/// otherwise the lowest-residual result.
pub fn solve_ik_with<R: Rng + ?Sized>(
    robot: &RobotModel,
    base: &Pose,
    goal: &GoalPose,
    seed: Option<&Configuration>,
    rng: &mut R,
    opts: &IkOptions,
    mut accept: impl FnMut(&Configuration) -> bool,
) -> (IkResult, IkSearch) {
    let mut best: Option<IkResult> = None;
    let mut search = IkSearch::default();
    for attempt in 0..=opts.restarts {
        let start = match (attempt, seed) {
            (0, Some(s)) => s.clone(),
            _ => random_configuration(robot, rng),
        };
        let res = descend(robot, base, goal, &start, opts);
        search.descents += 1;
        search.steps += res.iterations;
        if res.converged {
            search.converged += 1;
            if accept(&res.q) {
                search.accepted = true;
                return (res, search);
            }
        }
        let better = match &best {
            None => true,
            Some(b) => (res.converged && !b.converged) || (res.converged == b.converged && res.residual < b.residual),
        };
        if better {
            best = Some(res);
        }
    }
    (best.expect("at least one descent"), search)
}

/// Bookkeeping from [`solve_ik_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IkSearch {
    pub descents: usize,
    pub steps: usize,
    pub converged: usize,
    pub accepted: bool,
}

pub fn solve_ik<R: Rng + ?Sized>(
    robot: &RobotModel,
    base: &Pose,
    goal: &GoalPose,
    rng: &mut R,
    max_steps: usize,
    restarts: usize,
) -> IkResult {
    let opts = IkOptions {
        max_steps,
        restarts,
        ..IkOptions::default()
    };
    solve_ik_with(robot, base, goal, None, rng, &opts, |_| true).0
}

/// Goal that only constrains position.
pub fn position_goal(p: nalgebra::Vector3<f64>) -> GoalPose {
    GoalPose::new(Pose::new(Rotation::identity(), p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::planar_arm;
    use nalgebra::Vector3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planar_full_stretch() {
        let r = planar_arm(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let opts = IkOptions {
            max_steps: 200,
            rot_weight: 0.0,
            ..IkOptions::default()
        };
        let goal = position_goal(Vector3::new(2.0, 0.0, 0.0));
        let (res, _) = solve_ik_with(&r, &Pose::identity(), &goal, None, &mut rng, &opts, |_| true);
        assert!(res.converged);
        assert!(res.residual <= 1e-3);
        assert!(res.q[0].abs() < 0.05 && res.q[1].abs() < 0.1, "{:?}", res.q);
    }

    #[test]
    fn unreachable_goal_does_not_converge() {
        let r = planar_arm(2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let res = solve_ik(&r, &Pose::identity(), &position_goal(Vector3::new(3.0, 0.0, 0.0)), &mut rng, 100, 5);
        assert!(!res.converged);
        assert!(res.residual > 0.9);
    }

    #[test]
    fn already_solved_goal_converges_immediately() {
        let r = RobotModel::reference_6r();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q0 = random_configuration(&r, &mut rng);
        let base = Pose::from_translation(0.2, 0.0, 0.1);
        let goal = GoalPose::new(base.compose(&r.forward_kinematics(&q0).unwrap()));
        let res = descend(&r, &base, &goal, &q0, &IkOptions::default());
        assert!(res.converged);
        assert!(res.iterations <= 2);
    }

    #[test]
    fn reference_arm_reaches_sampled_poses() {
        let r = RobotModel::reference_6r();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut ok = 0;
        for _ in 0..50 {
            let q = random_configuration(&r, &mut rng);
            let goal = GoalPose::new(r.forward_kinematics(&q).unwrap());
            let res = solve_ik(&r, &Pose::identity(), &goal, &mut rng, DEFAULT_IK_STEPS, 10);
            if res.converged {
                let ee = r.forward_kinematics(&res.q).unwrap();
                let (p, a) = goal_errors(&ee, &goal);
                assert!(p <= goal.tol_pos && a <= goal.tol_rot);
                assert!(r.within_limits(&res.q));
                ok += 1;
            }
        }
        assert!(ok >= 45, "only {ok}/50 converged");
    }
}

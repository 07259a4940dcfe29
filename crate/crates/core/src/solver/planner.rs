//! RRT-Connect in joint space with random-pair shortcut smoothing.

use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::robot::{Configuration, Obstacle, RobotModel, DEFAULT_CHECK_RESOLUTION};
use crate::se3::Pose;

use super::ik::random_configuration;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerOptions {
    pub max_iters: usize,
    /// Maximum per-joint extension, radians.
    pub step_size: f64,
    pub shortcut_attempts: usize,
    /// Joint-space resolution of segment collision checks.
    pub check_resolution: f64,
    /// Wall-clock cap; `None` means iteration-limited only.
    #[serde(default)]
    pub time_limit: Option<Duration>,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            max_iters: 2000,
            step_size: 0.2,
            shortcut_attempts: 100,
            check_resolution: DEFAULT_CHECK_RESOLUTION,
            time_limit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointPath {
    pub waypoints: Vec<Configuration>,
}

impl JointPath {
    /// Sum of Euclidean joint-space segment lengths.
    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("start configuration is in collision")]
    StartInCollision,
    #[error("goal configuration is in collision")]
    GoalInCollision,
    #[error("no path found within the iteration or time limit")]
    Exhausted,
}

struct Tree {
    nodes: Vec<Configuration>,
    parents: Vec<usize>,
}

impl Tree {
    fn new(root: Configuration) -> Self {
        Tree {
            nodes: vec![root],
            parents: vec![usize::MAX],
        }
    }

    fn nearest(&self, q: &Configuration) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, n) in self.nodes.iter().enumerate() {
            let d: f64 = n.0.iter().zip(&q.0).map(|(a, b)| (a - b) * (a - b)).sum();
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    fn push(&mut self, q: Configuration, parent: usize) -> usize {
        self.nodes.push(q);
        self.parents.push(parent);
        self.nodes.len() - 1
    }

    /// Configurations from the root to `idx`.
    fn branch(&self, mut idx: usize) -> Vec<Configuration> {
        let mut out = Vec::new();
        while idx != usize::MAX {
            out.push(self.nodes[idx].clone());
            idx = self.parents[idx];
        }
        out.reverse();
        out
    }
}

enum Extend {
    Reached(usize),
    Advanced(usize),
    Trapped,
}

struct Space<'a> {
    robot: &'a RobotModel,
    base: &'a Pose,
    obstacles: &'a [Obstacle],
    opts: &'a PlannerOptions,
}

impl Space<'_> {
    fn free(&self, q: &Configuration) -> bool {
        self.robot.collision_free(self.base, q, self.obstacles)
    }

    fn segment_free(&self, a: &Configuration, b: &Configuration) -> bool {
        self.robot.segment_collision_free(self.base, a, b, self.obstacles, self.opts.check_resolution)
    }

    fn extend(&self, tree: &mut Tree, target: &Configuration) -> Extend {
        let near = tree.nearest(target);
        let from = &tree.nodes[near];
        let span = from.max_abs_diff(target);
        let (q_new, reached) = if span <= self.opts.step_size {
            (target.clone(), true)
        } else {
            (from.lerp(target, self.opts.step_size / span), false)
        };
        if !self.segment_free(from, &q_new) {
            return Extend::Trapped;
        }
        let idx = tree.push(q_new, near);
        if reached {
            Extend::Reached(idx)
        } else {
            Extend::Advanced(idx)
        }
    }

    fn connect(&self, tree: &mut Tree, target: &Configuration) -> Extend {
        loop {
            match self.extend(tree, target) {
                Extend::Advanced(_) => continue,
                other => return other,
            }
        }
    }
}

/// Plans a collision-free joint path. Both endpoints must be collision-free.
pub fn rrt_connect<R: Rng + ?Sized>(
    robot: &RobotModel,
    base: &Pose,
    q_start: &Configuration,
    q_goal: &Configuration,
    obstacles: &[Obstacle],
    rng: &mut R,
    opts: &PlannerOptions,
) -> Result<JointPath, PlanError> {
    let space = Space {
        robot,
        base,
        obstacles,
        opts,
    };
    if !space.free(q_start) {
        return Err(PlanError::StartInCollision);
    }
    if !space.free(q_goal) {
        return Err(PlanError::GoalInCollision);
    }
    if q_start.max_abs_diff(q_goal) == 0.0 {
        return Ok(JointPath {
            waypoints: vec![q_start.clone(), q_goal.clone()],
        });
    }
    if space.segment_free(q_start, q_goal) {
        return Ok(JointPath {
            waypoints: vec![q_start.clone(), q_goal.clone()],
        });
    }

    let started = Instant::now();
    let mut a = Tree::new(q_start.clone());
    let mut b = Tree::new(q_goal.clone());
    // `a_is_start` tracks which tree is rooted at the start after swaps.
    let mut a_is_start = true;
    for _ in 0..opts.max_iters {
        if opts.time_limit.is_some_and(|limit| started.elapsed() > limit) {
            break;
        }
        let sample = random_configuration(robot, rng);
        let new_idx = match space.extend(&mut a, &sample) {
            Extend::Trapped => None,
            Extend::Advanced(i) | Extend::Reached(i) => Some(i),
        };
        if let Some(ia) = new_idx {
            let q_new = a.nodes[ia].clone();
            if let Extend::Reached(ib) = space.connect(&mut b, &q_new) {
                let mut from_a = a.branch(ia);
                let mut from_b = b.branch(ib);
                from_b.pop();
                from_b.reverse();
                from_a.extend(from_b);
                if !a_is_start {
                    from_a.reverse();
                }
                let path = JointPath { waypoints: from_a };
                return Ok(shortcut(&space, path, rng));
            }
        }
        std::mem::swap(&mut a, &mut b);
        a_is_start = !a_is_start;
    }
    Err(PlanError::Exhausted)
}

fn shortcut<R: Rng + ?Sized>(space: &Space<'_>, mut path: JointPath, rng: &mut R) -> JointPath {
    for _ in 0..space.opts.shortcut_attempts {
        let n = path.waypoints.len();
        if n <= 2 {
            break;
        }
        let i = rng.random_range(0..n - 2);
        let j = rng.random_range(i + 2..n);
        if space.segment_free(&path.waypoints[i], &path.waypoints[j]) {
            path.waypoints.drain(i + 1..j);
        }
    }
    path
}

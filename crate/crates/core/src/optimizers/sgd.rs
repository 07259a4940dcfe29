//! Gradient search on the summed goal distance with random restarts.
//!
//! Each restart alternates warm-started IK with an Adam step on the base
//! parameters, where the gradient is taken with the IK solutions frozen. Once
//! every goal is within tolerance (or the step cap is hit) the full pipeline
//! scores the final base pose.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::{Budget, OptRunRecord, Recorder, TaskObjective};
use crate::error::{Error, Result};
use crate::robot::{Configuration, RobotModel};
use crate::se3::{pose_distance, BaseParams, DistanceWeights, Pose};
use crate::solver::ik::{descend, random_configuration, IkOptions};
use crate::task::{clamp_params, sample_base_params, Task};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SgdConfig {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub n_adam: usize,
    pub n_ik: usize,
    pub epsilon: f64,
    pub fd_step: f64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        SgdConfig {
            alpha: 0.3923,
            beta1: 0.8749,
            beta2: 0.9739,
            n_adam: 44,
            n_ik: 33,
            epsilon: 1e-8,
            fd_step: 1e-5,
        }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.n_adam >= 1
            && self.n_ik >= 1
            && self.epsilon > 0.0
            && self.fd_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant(format!("inconsistent SGD configuration: {self:?}")))
        }
    }
}

/// `Σᵢ δ(B(b)·eeᵢ, gᵢ)` for fixed end-effector poses in the base frame.
fn summed_distance(task: &Task, b: &BaseParams, ee: &[Pose], w: &DistanceWeights) -> f64 {
    let base = task.base_domain.base_pose(b);
    ee.iter()
        .zip(&task.goals)
        .map(|(e, g)| pose_distance(&base.compose(e), &g.pose, w))
        .sum()
}

/// Central-difference gradient of the summed goal distance with respect to
/// the base parameters, holding the joint configurations `iks` fixed.
pub fn ik_distance_gradient(
    robot: &RobotModel,
    task: &Task,
    b: &BaseParams,
    iks: &[Configuration],
    w: &DistanceWeights,
    fd_step: f64,
) -> Result<Vec<f64>> {
    if iks.len() != task.goals.len() {
        return Err(Error::Dimension {
            expected: task.goals.len(),
            got: iks.len(),
        });
    }
    let ee: Vec<Pose> = iks.iter().map(|q| robot.forward_kinematics(q)).collect::<Result<_>>()?;
    let mut grad = Vec::with_capacity(b.arity());
    for i in 0..b.arity() {
        let shifted = |h: f64| {
            let mut v = b.values().to_vec();
            v[i] += h;
            BaseParams::new(v).expect("finite step")
        };
        let plus = summed_distance(task, &shifted(fd_step), &ee, w);
        let minus = summed_distance(task, &shifted(-fd_step), &ee, w);
        grad.push((plus - minus) / (2.0 * fd_step));
    }
    Ok(grad)
}

/// What one restart did, for inspection.
#[derive(Clone, Debug, PartialEq)]
pub struct RestartTrace {
    pub final_params: BaseParams,
    /// IK rounds run (each followed by an Adam step unless converged).
    pub iterations: usize,
    pub converged: bool,
    /// Largest step count of any single IK descent.
    pub max_ik_steps: usize,
}

pub fn opt_sgd_traced<R: Rng>(
    objective: &TaskObjective<'_>,
    budget: Budget,
    cfg: &SgdConfig,
    rng: &mut R,
) -> (OptRunRecord, Vec<RestartTrace>) {
    cfg.validate().expect("valid SGD configuration");
    let (robot, task) = (objective.robot, objective.task);
    let domain = &task.base_domain;
    let ik_opts = IkOptions {
        max_steps: cfg.n_ik,
        restarts: 0,
        ..objective.limits.ik.clone()
    };
    let mut rec = Recorder::new(objective, budget);
    let mut traces = Vec::new();
    while !rec.exhausted() {
        let mut b = sample_base_params(domain, rng);
        let mut qs: Vec<Configuration> = task.goals.iter().map(|_| random_configuration(robot, rng)).collect();
        let mut adam = AdamState::new(b.arity());
        let mut trace = RestartTrace {
            final_params: b.clone(),
            iterations: 0,
            converged: false,
            max_ik_steps: 0,
        };
        for _ in 0..cfg.n_adam {
            if rec.exhausted() {
                break;
            }
            trace.iterations += 1;
            let base = domain.base_pose(&b);
            let mut all = true;
            for (q, goal) in qs.iter_mut().zip(&task.goals) {
                let res = descend(robot, &base, goal, q, &ik_opts);
                trace.max_ik_steps = trace.max_ik_steps.max(res.iterations);
                all &= res.converged;
                *q = res.q;
            }
            if all {
                trace.converged = true;
                break;
            }
            let grad = ik_distance_gradient(robot, task, &b, &qs, &ik_opts.weights, cfg.fd_step).expect("one configuration per goal");
            let delta = adam_step(&mut adam, &grad, cfg);
            let moved: Vec<f64> = b.values().iter().zip(&delta).map(|(x, d)| x + d).collect();
            b = clamp_params(&BaseParams::new(moved).expect("finite step"), domain).expect("arity matches domain");
        }
        trace.final_params = b.clone();
        rec.evaluate(&b, rng);
        traces.push(trace);
    }
    (rec.finish(), traces)
}

pub fn opt_sgd<R: Rng>(objective: &TaskObjective<'_>, budget: Budget, cfg: &SgdConfig, rng: &mut R) -> OptRunRecord {
    opt_sgd_traced(objective, budget, cfg, rng).0
}

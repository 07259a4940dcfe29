//! Anytime base-pose optimizers sharing one budget protocol and one history
//! format.
//!
//! Every optimizer talks to an [`Objective`] through a [`Recorder`], which
//! charges the [`Budget`], appends to the run history and tracks the best
//! pose so far. Stopping a run at any point therefore leaves a valid
//! [`OptRunRecord`].

pub mod adam;
pub mod bo;
pub mod ga;
pub mod gp;
pub mod sgd;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

pub use adam::{adam_step, AdamState};
pub use bo::{expected_improvement, opt_bo, BoConfig};
pub use ga::{ga_crossover, ga_mutate, opt_ga, GaConfig};
pub use gp::GaussianProcess;
pub use sgd::{ik_distance_gradient, opt_sgd, SgdConfig};

use crate::error::{Error, Result};
use crate::robot::RobotModel;
use crate::se3::BaseParams;
use crate::solver::{evaluate_base_pose, SolveOutcome, SolverLimits};
use crate::task::{sample_base_params, BaseDomain, Task};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    /// Number of objective evaluations.
    Evaluations(usize),
    /// Wall-clock seconds; proposal and inner-loop work count too.
    Seconds(f64),
}

impl Budget {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Budget::Evaluations(n) if n > 0 => Ok(()),
            Budget::Seconds(s) if s > 0.0 && s.is_finite() => Ok(()),
            _ => Err(Error::Invariant(format!("budget limit must be positive: {self:?}"))),
        }
    }

    pub fn limit(&self) -> f64 {
        match *self {
            Budget::Evaluations(n) => n as f64,
            Budget::Seconds(s) => s,
        }
    }

    pub fn is_evaluations(&self) -> bool {
        matches!(self, Budget::Evaluations(_))
    }
}

/// Tracks budget consumption for one run.
#[derive(Clone, Debug)]
pub struct BudgetClock {
    budget: Budget,
    evaluations: usize,
    started: Instant,
}

impl BudgetClock {
    pub fn start(budget: Budget) -> Self {
        BudgetClock {
            budget,
            evaluations: 0,
            started: Instant::now(),
        }
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Budget units spent so far.
    pub fn consumed(&self) -> f64 {
        match self.budget {
            Budget::Evaluations(_) => self.evaluations as f64,
            Budget::Seconds(_) => self.started.elapsed().as_secs_f64(),
        }
    }

    pub fn exhausted(&self) -> bool {
        self.consumed() >= self.budget.limit()
    }
}

/// Result of one objective evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub cost: f64,
    pub success: bool,
}

impl From<&SolveOutcome> for Evaluation {
    fn from(o: &SolveOutcome) -> Self {
        Evaluation {
            cost: o.cost,
            success: o.success,
        }
    }
}

/// A black-box cost over base parameters. Implementations must be reentrant.
pub trait Objective: Sync {
    fn domain(&self) -> &BaseDomain;
    fn fail_cost(&self) -> f64;
    fn evaluate(&self, b: &BaseParams, rng: &mut dyn RngCore) -> Evaluation;
}

/// The full task pipeline as an objective.
#[derive(Clone, Copy, Debug)]
pub struct TaskObjective<'a> {
    pub robot: &'a RobotModel,
    pub task: &'a Task,
    pub limits: &'a SolverLimits,
}

impl<'a> TaskObjective<'a> {
    pub fn new(robot: &'a RobotModel, task: &'a Task, limits: &'a SolverLimits) -> Self {
        TaskObjective { robot, task, limits }
    }
}

impl Objective for TaskObjective<'_> {
    fn domain(&self) -> &BaseDomain {
        &self.task.base_domain
    }

    fn fail_cost(&self) -> f64 {
        self.task.fail_cost
    }

    fn evaluate(&self, b: &BaseParams, rng: &mut dyn RngCore) -> Evaluation {
        let outcome = evaluate_base_pose(self.robot, self.task, b, rng, self.limits)
            .expect("optimizers only propose in-domain parameters");
        Evaluation::from(&outcome)
    }
}

/// `‖b − target‖` over the domain; always "successful". A cheap surrogate
/// for comparing optimizers without a robot in the loop.
#[derive(Clone, Debug)]
pub struct SphereObjective {
    pub domain: BaseDomain,
    pub target: BaseParams,
}

impl Objective for SphereObjective {
    fn domain(&self) -> &BaseDomain {
        &self.domain
    }

    fn fail_cost(&self) -> f64 {
        crate::task::MIN_FAIL_COST
    }

    fn evaluate(&self, b: &BaseParams, _rng: &mut dyn RngCore) -> Evaluation {
        let d = b.values().iter().zip(self.target.values()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        Evaluation { cost: d, success: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub consumed: f64,
    pub params: BaseParams,
    pub cost: f64,
    pub success: bool,
}

/// Anytime history of one optimizer run.
#[derive(Clone, Debug, PartialEq)]
pub struct OptRunRecord {
    pub history: Vec<HistoryEntry>,
    pub best_cost: f64,
    pub best_params: Option<BaseParams>,
    pub fail_cost: f64,
}

impl OptRunRecord {
    pub fn empty(fail_cost: f64) -> Self {
        OptRunRecord {
            history: Vec::new(),
            best_cost: fail_cost,
            best_params: None,
            fail_cost,
        }
    }

    pub fn from_history(history: Vec<HistoryEntry>, fail_cost: f64) -> Self {
        let mut rec = OptRunRecord::empty(fail_cost);
        for e in history {
            rec.push(e);
        }
        rec
    }

    fn push(&mut self, e: HistoryEntry) {
        if e.success && (self.best_params.is_none() || e.cost < self.best_cost) {
            self.best_cost = e.cost;
            self.best_params = Some(e.params.clone());
        }
        self.history.push(e);
    }

    pub fn any_success(&self) -> bool {
        self.best_params.is_some()
    }

    /// Best successful cost among entries with `consumed ≤ t`, or the failure
    /// cost when there is none.
    pub fn best_cost_at(&self, t: f64) -> f64 {
        self.history
            .iter()
            .take_while(|e| e.consumed <= t)
            .filter(|e| e.success)
            .map(|e| e.cost)
            .fold(self.fail_cost, f64::min)
    }

    pub fn success_by(&self, t: f64) -> bool {
        self.history.iter().take_while(|e| e.consumed <= t).any(|e| e.success)
    }

    /// Running best cost after each history entry.
    pub fn running_best(&self) -> Vec<f64> {
        let mut best = self.fail_cost;
        self.history
            .iter()
            .map(|e| {
                if e.success {
                    best = best.min(e.cost);
                }
                best
            })
            .collect()
    }

    /// One JSON object per history entry, newline-terminated.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for e in &self.history {
            out.push_str(&serde_json::to_string(e)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str, fail_cost: f64) -> Result<Self> {
        let mut history = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let trimmed = line.trim();
            if !trimmed.is_empty() {
                let e: HistoryEntry = serde_json::from_str(trimmed).map_err(|e| {
                    let inner = crate::task::parse_error(trimmed, &e);
                    match inner {
                        Error::Parse { offset: o, message } => Error::Parse { offset: offset + o, message },
                        other => other,
                    }
                })?;
                history.push(e);
            }
            offset += line.len();
        }
        Ok(OptRunRecord::from_history(history, fail_cost))
    }
}

/// Evaluates parameters against an objective while charging a budget and
/// keeping the anytime history.
pub struct Recorder<'o, O: Objective + ?Sized> {
    objective: &'o O,
    clock: BudgetClock,
    record: OptRunRecord,
}

impl<'o, O: Objective + ?Sized> Recorder<'o, O> {
    pub fn new(objective: &'o O, budget: Budget) -> Self {
        Recorder {
            objective,
            clock: BudgetClock::start(budget),
            record: OptRunRecord::empty(objective.fail_cost()),
        }
    }

    pub fn objective(&self) -> &'o O {
        self.objective
    }

    pub fn domain(&self) -> &'o BaseDomain {
        self.objective.domain()
    }

    pub fn exhausted(&self) -> bool {
        self.clock.exhausted()
    }

    pub fn clock(&self) -> &BudgetClock {
        &self.clock
    }

    pub fn record(&self) -> &OptRunRecord {
        &self.record
    }

    /// Evaluates `b` unless the budget is already spent.
    pub fn evaluate<R: Rng>(&mut self, b: &BaseParams, rng: &mut R) -> Option<Evaluation> {
        if self.clock.exhausted() {
            return None;
        }
        let eval = self.objective.evaluate(b, rng);
        self.clock.evaluations += 1;
        self.record.push(HistoryEntry {
            consumed: self.clock.consumed(),
            params: b.clone(),
            cost: eval.cost,
            success: eval.success,
        });
        Some(eval)
    }

    pub fn finish(self) -> OptRunRecord {
        self.record
    }
}

/// Keeps the nominal base pose: one evaluation at zero offset.
pub fn opt_dummy<O: Objective + ?Sized, R: Rng>(objective: &O, rng: &mut R) -> OptRunRecord {
    let mut rec = Recorder::new(objective, Budget::Evaluations(1));
    rec.evaluate(&objective.domain().nominal_params(), rng);
    rec.finish()
}

/// Uniform sampling of the domain until the budget is spent.
pub fn opt_random<O: Objective + ?Sized, R: Rng>(objective: &O, budget: Budget, rng: &mut R) -> OptRunRecord {
    let mut rec = Recorder::new(objective, budget);
    while !rec.exhausted() {
        let b = sample_base_params(objective.domain(), rng);
        rec.evaluate(&b, rng);
    }
    rec.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dummy,
    Random,
    Ga,
    Bo,
    Sgd,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Dummy, Method::Random, Method::Ga, Method::Bo, Method::Sgd];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Dummy => "dummy",
            Method::Random => "random",
            Method::Ga => "ga",
            Method::Bo => "bo",
            Method::Sgd => "sgd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Data(format!("unknown method '{s}'")))
    }
}

/// Hyperparameters for every tunable optimizer.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfigs {
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default)]
    pub bo: BoConfig,
    #[serde(default)]
    pub sgd: SgdConfig,
}

/// Runs one optimizer on a task.
pub fn run_method<R: Rng>(
    method: Method,
    objective: &TaskObjective<'_>,
    budget: Budget,
    configs: &OptimizerConfigs,
    rng: &mut R,
) -> OptRunRecord {
    match method {
        Method::Dummy => opt_dummy(objective, rng),
        Method::Random => opt_random(objective, budget, rng),
        Method::Ga => opt_ga(objective, budget, &configs.ga, rng),
        Method::Bo => opt_bo(objective, budget, &configs.bo, rng),
        Method::Sgd => opt_sgd(objective, budget, &configs.sgd, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se3::Pose;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sphere() -> SphereObjective {
        SphereObjective {
            domain: BaseDomain::new(Pose::identity(), [1.0; 3], false),
            target: BaseParams::new(vec![0.3, -0.2, 0.5]).unwrap(),
        }
    }

    #[test]
    fn dummy_single_nominal_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = opt_dummy(&sphere(), &mut rng);
        assert_eq!(rec.history.len(), 1);
        assert_eq!(rec.history[0].params.values(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn random_respects_budget_and_domain() {
        let obj = sphere();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rec = opt_random(&obj, Budget::Evaluations(50), &mut rng);
        assert_eq!(rec.history.len(), 50);
        assert!(rec.history.iter().all(|e| obj.domain.contains(&e.params)));
        let best = rec.running_best();
        assert!(best.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*best.last().unwrap(), rec.best_cost);
        assert!(rec.history.windows(2).all(|w| w[0].consumed <= w[1].consumed));
    }

    #[test]
    fn seconds_budget_stops() {
        let obj = sphere();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rec = opt_random(&obj, Budget::Seconds(0.02), &mut rng);
        assert!(!rec.history.is_empty());
        let over: Vec<_> = rec.history.iter().filter(|e| e.consumed >= 0.02).collect();
        assert!(over.len() <= 1);
    }

    #[test]
    fn record_jsonl_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rec = opt_random(&sphere(), Budget::Evaluations(5), &mut rng);
        let text = rec.to_jsonl().unwrap();
        assert_eq!(text.lines().count(), 5);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        for key in ["consumed", "params", "cost", "success"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
        assert_eq!(OptRunRecord::from_jsonl(&text, rec.fail_cost).unwrap(), rec);
        assert!(matches!(OptRunRecord::from_jsonl("{\"consumed\": 1", 20.0), Err(Error::Parse { .. })));
    }

    #[test]
    fn best_cost_at_checkpoints() {
        let p = BaseParams::zeros(3).unwrap();
        let e = |consumed: f64, cost: f64, success: bool| HistoryEntry { consumed, params: p.clone(), cost, success };
        let rec = OptRunRecord::from_history(vec![e(1.0, 20.0, false), e(10.0, 4.0, true), e(11.0, 6.0, true)], 20.0);
        assert_eq!(rec.best_cost_at(9.0), 20.0);
        assert_eq!(rec.best_cost_at(10.0), 4.0);
        assert_eq!(rec.best_cost_at(100.0), 4.0);
        assert!(!rec.success_by(9.99));
        assert!(rec.success_by(10.0));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("cmaes".parse::<Method>().is_err());
    }
}

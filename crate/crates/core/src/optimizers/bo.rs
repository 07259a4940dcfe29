//! Bayesian optimization: Hammersley initial design, GP surrogate and
//! expected improvement maximized over uniform candidates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gp::{GpModel, DEFAULT_LENGTH_SCALES};
use super::{Budget, Objective, OptRunRecord, Recorder};
use crate::error::{Error, Result};
use crate::se3::{hammersley_points, BaseParams};
use crate::task::{sample_base_params, BaseDomain};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acquisition {
    #[default]
    ExpectedImprovement,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcquisitionOptimizer {
    /// Argmax over uniformly sampled candidates.
    #[default]
    Sampling,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialDesign {
    #[default]
    Hammersley,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoConfig {
    pub n_init: usize,
    pub xi: f64,
    pub acquisition: Acquisition,
    pub acq_optim: AcquisitionOptimizer,
    pub candidates: usize,
    pub init_gen: InitialDesign,
    pub batch: usize,
    pub length_scales: Vec<f64>,
}

impl Default for BoConfig {
    fn default() -> Self {
        BoConfig {
            n_init: 31,
            xi: 0.0973,
            acquisition: Acquisition::ExpectedImprovement,
            acq_optim: AcquisitionOptimizer::Sampling,
            candidates: 1000,
            init_gen: InitialDesign::Hammersley,
            batch: 1,
            length_scales: DEFAULT_LENGTH_SCALES.to_vec(),
        }
    }
}

impl BoConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.n_init >= 1
            && self.xi >= 0.0
            && self.candidates >= 1
            && self.batch == 1
            && !self.length_scales.is_empty()
            && self.length_scales.iter().all(|l| *l > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant(format!("inconsistent BO configuration: {self:?}")))
        }
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Expected improvement below `best_y` (minimization), offset by `xi`.
pub fn expected_improvement(mean: f64, stddev: f64, best_y: f64, xi: f64) -> f64 {
    let gain = best_y - mean - xi;
    if stddev <= 0.0 {
        return gain.max(0.0);
    }
    let z = gain / stddev;
    (gain * normal_cdf(z) + stddev * normal_pdf(z)).max(0.0)
}

/// The initial design: `n` Hammersley points mapped into the domain.
pub fn initial_design(domain: &BaseDomain, n: usize) -> Vec<BaseParams> {
    hammersley_points(n, domain.arity())
        .iter()
        .map(|u| domain.from_unit(u).expect("Hammersley dimension matches arity"))
        .collect()
}

/// Model state between evaluations.
pub struct BayesOpt<'d> {
    domain: &'d BaseDomain,
    cfg: BoConfig,
    model: GpModel,
    /// Number of GP fits so far.
    pub refits: usize,
}

impl<'d> BayesOpt<'d> {
    pub fn new(domain: &'d BaseDomain, cfg: &BoConfig) -> Self {
        BayesOpt {
            domain,
            cfg: cfg.clone(),
            model: GpModel::new(&cfg.length_scales),
            refits: 0,
        }
    }

    pub fn observe(&mut self, b: &BaseParams, cost: f64) {
        self.model.add(self.domain.to_unit(b), cost);
    }

    /// Refits the surrogate and returns the EI-maximizing candidate (first
    /// in sampling order on ties).
    pub fn propose<R: Rng>(&mut self, rng: &mut R) -> BaseParams {
        let gp = self.model.fit().expect("at least one observation");
        self.refits += 1;
        let best_y = self.model.targets().iter().copied().fold(f64::INFINITY, f64::min);
        let candidates: Vec<(BaseParams, Vec<f64>)> = (0..self.cfg.candidates)
            .map(|_| {
                let c = sample_base_params(self.domain, rng);
                let u = self.domain.to_unit(&c);
                (c, u)
            })
            .collect();
        // EI grows with the standard deviation, which never exceeds the prior
        // one; candidates whose prior-σ bound cannot beat the incumbent are
        // skipped without the O(n²) variance computation.
        let mut order: Vec<(usize, f64)> = candidates
            .iter()
            .enumerate()
            .map(|(i, (_, u))| (i, expected_improvement(gp.mean(u), gp.prior_std(), best_y, self.cfg.xi)))
            .collect();
        order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut best: Option<(f64, usize)> = None;
        for (i, bound) in order {
            if best.is_some_and(|(e, _)| bound < e) {
                break;
            }
            let (m, s) = gp.predict(&candidates[i].1);
            let ei = expected_improvement(m, s, best_y, self.cfg.xi);
            if best.is_none_or(|(e, j)| ei > e || (ei == e && i < j)) {
                best = Some((ei, i));
            }
        }
        let (_, i) = best.expect("at least one candidate");
        candidates.into_iter().nth(i).expect("index in range").0
    }
}

pub fn opt_bo_traced<O: Objective + ?Sized, R: Rng>(
    objective: &O,
    budget: Budget,
    cfg: &BoConfig,
    rng: &mut R,
) -> (OptRunRecord, usize) {
    cfg.validate().expect("valid BO configuration");
    let domain = objective.domain();
    let mut rec = Recorder::new(objective, budget);
    let mut model = BayesOpt::new(domain, cfg);
    for b in initial_design(domain, cfg.n_init) {
        match rec.evaluate(&b, rng) {
            Some(e) => model.observe(&b, e.cost),
            None => return (rec.finish(), model.refits),
        }
    }
    while !rec.exhausted() {
        let b = model.propose(rng);
        match rec.evaluate(&b, rng) {
            Some(e) => model.observe(&b, e.cost),
            None => break,
        }
    }
    (rec.finish(), model.refits)
}

pub fn opt_bo<O: Objective + ?Sized, R: Rng>(objective: &O, budget: Budget, cfg: &BoConfig, rng: &mut R) -> OptRunRecord {
    opt_bo_traced(objective, budget, cfg, rng).0
}

//! Real-valued genetic algorithm with rank selection, single-point crossover,
//! Gaussian mutation and elitism.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Budget, Objective, OptRunRecord, Recorder};
use crate::error::{Error, Result};
use crate::se3::BaseParams;
use crate::task::{clamp_params, sample_base_params, BaseDomain};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverKind {
    #[default]
    SinglePoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub mutation_prob: f64,
    pub parents_mating: usize,
    pub keep_parents: usize,
    pub crossover: CrossoverKind,
    pub keep_elites: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 25,
            mutation_prob: 0.2690,
            parents_mating: 14,
            keep_parents: 12,
            crossover: CrossoverKind::SinglePoint,
            keep_elites: 3,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.keep_elites <= self.keep_parents
            && self.keep_parents <= self.population_size
            && self.parents_mating <= self.population_size
            && self.parents_mating >= 2
            && self.population_size > self.keep_elites.max(self.keep_parents)
            && (0.0..=1.0).contains(&self.mutation_prob);
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant(format!("inconsistent GA configuration: {self:?}")))
        }
    }

    /// Individuals copied unchanged into the next generation.
    pub fn carried(&self) -> usize {
        self.keep_elites.max(self.keep_parents)
    }
}

/// First `n` genes of `a` followed by the remaining genes of `b`.
pub fn ga_crossover(a: &BaseParams, b: &BaseParams, n: usize) -> Result<BaseParams> {
    if a.arity() != b.arity() {
        return Err(Error::Dimension {
            expected: a.arity(),
            got: b.arity(),
        });
    }
    if n == 0 || n > a.arity() {
        return Err(Error::Precondition(format!("crossover point {n} outside 1..={}", a.arity())));
    }
    let genes = a.values()[..n].iter().chain(&b.values()[n..]).copied().collect();
    BaseParams::new(genes)
}

/// Mutation with injected randomness: `draw(i)` returns the perturbation for
/// gene `i`, or `None` to leave it alone. The result is clamped to the domain.
pub fn mutate_with(b: &BaseParams, domain: &BaseDomain, mut draw: impl FnMut(usize) -> Option<f64>) -> BaseParams {
    let genes: Vec<f64> = b.values().iter().enumerate().map(|(i, &g)| g + draw(i).unwrap_or(0.0)).collect();
    let out = BaseParams::new(genes).expect("finite mutation");
    clamp_params(&out, domain).expect("arity matches domain")
}

/// Adds an `N(0, 1)` draw to each gene independently with probability `p`.
pub fn ga_mutate<R: Rng + ?Sized>(b: &BaseParams, domain: &BaseDomain, rng: &mut R, p: f64) -> BaseParams {
    mutate_with(b, domain, |_| {
        if rng.random::<f64>() < p {
            Some(rng.sample(StandardNormal))
        } else {
            None
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub params: BaseParams,
    pub cost: f64,
}

fn key(b: &BaseParams) -> Vec<u64> {
    b.values().iter().map(|v| v.to_bits()).collect()
}

/// Runs the GA; `on_generation` sees every fully evaluated population,
/// sorted best first.
pub fn opt_ga_traced<O: Objective + ?Sized, R: Rng>(
    objective: &O,
    budget: Budget,
    cfg: &GaConfig,
    rng: &mut R,
    mut on_generation: impl FnMut(&[Individual]),
) -> OptRunRecord {
    cfg.validate().expect("valid GA configuration");
    let domain = objective.domain();
    let arity = domain.arity();
    let mut rec = Recorder::new(objective, budget);
    // Fitness cache: identical genomes are not re-evaluated.
    let mut cache: HashMap<Vec<u64>, f64> = HashMap::new();

    let mut pending: Vec<BaseParams> = (0..cfg.population_size).map(|_| sample_base_params(domain, rng)).collect();
    let mut carried: Vec<Individual> = Vec::new();
    loop {
        let mut population = carried;
        for b in pending {
            let cost = match cache.get(&key(&b)) {
                Some(&c) => c,
                None => match rec.evaluate(&b, rng) {
                    Some(e) => {
                        cache.insert(key(&b), e.cost);
                        e.cost
                    }
                    None => return rec.finish(),
                },
            };
            population.push(Individual { params: b, cost });
        }
        // Stable sort keeps the carried (older) individuals ahead on ties.
        population.sort_by(|a, b| a.cost.total_cmp(&b.cost));
        on_generation(&population);
        if rec.exhausted() {
            return rec.finish();
        }

        carried = population[..cfg.carried()].to_vec();
        let parents = &population[..cfg.parents_mating];
        pending = (0..cfg.population_size - carried.len())
            .map(|_| {
                let i = rng.random_range(0..parents.len());
                let mut j = rng.random_range(0..parents.len() - 1);
                if j >= i {
                    j += 1;
                }
                let n = rng.random_range(1..=arity);
                let child = ga_crossover(&parents[i].params, &parents[j].params, n).expect("equal arities");
                ga_mutate(&child, domain, rng, cfg.mutation_prob)
            })
            .collect();
    }
}

pub fn opt_ga<O: Objective + ?Sized, R: Rng>(objective: &O, budget: Budget, cfg: &GaConfig, rng: &mut R) -> OptRunRecord {
    opt_ga_traced(objective, budget, cfg, rng, |_| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::{opt_random, SphereObjective};
    use crate::se3::Pose;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn domain() -> BaseDomain {
        BaseDomain::new(Pose::identity(), [1.0; 3], false)
    }

    fn p(v: &[f64]) -> BaseParams {
        BaseParams::new(v.to_vec()).unwrap()
    }

    #[test]
    fn crossover_examples() {
        let (a, b) = (p(&[1.0, 2.0, 3.0]), p(&[4.0, 5.0, 6.0]));
        assert_eq!(ga_crossover(&a, &b, 2).unwrap(), p(&[1.0, 2.0, 6.0]));
        assert_eq!(ga_crossover(&a, &b, 3).unwrap(), a);
        for n in 1..=3 {
            assert_eq!(ga_crossover(&a, &a, n).unwrap(), a);
        }
        let six = BaseParams::zeros(6).unwrap();
        assert!(matches!(ga_crossover(&a, &six, 1), Err(Error::Dimension { .. })));
        assert!(ga_crossover(&a, &b, 0).is_err());
    }

    #[test]
    fn mutation_examples() {
        let d = domain();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = p(&[0.1, -0.2, 0.3]);
        assert_eq!(ga_mutate(&b, &d, &mut rng, 0.0), b);
        let forced = mutate_with(&BaseParams::zeros(3).unwrap(), &d, |_| Some(0.5));
        assert_eq!(forced, p(&[0.5, 0.5, 0.5]));
        let clamped = mutate_with(&BaseParams::zeros(3).unwrap(), &d, |_| Some(3.0));
        assert_eq!(clamped, p(&[1.0, 1.0, 1.0]));
    }

    #[test]
    fn mutation_frequency() {
        let d = BaseDomain::new(Pose::identity(), [1e9; 3], false);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = BaseParams::zeros(3).unwrap();
        let mut counts = [0usize; 3];
        let n = 10_000;
        for _ in 0..n {
            let m = ga_mutate(&b, &d, &mut rng, 0.269);
            for (c, v) in counts.iter_mut().zip(m.values()) {
                if *v != 0.0 {
                    *c += 1;
                }
            }
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 0.269).abs() < 0.02, "{c}");
        }
    }

    #[test]
    fn elitism_and_constant_population() {
        let obj = SphereObjective {
            domain: domain(),
            target: p(&[0.4, -0.1, 0.2]),
        };
        let cfg = GaConfig::default();
        let mut gens: Vec<Vec<Individual>> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        opt_ga_traced(&obj, Budget::Evaluations(300), &cfg, &mut rng, |pop| gens.push(pop.to_vec()));
        assert!(gens.len() > 5);
        for w in gens.windows(2) {
            assert_eq!(w[1].len(), 25);
            for elite in &w[0][..cfg.keep_elites] {
                assert!(w[1].iter().any(|i| i.params == elite.params));
            }
            assert!(w[1][0].cost <= w[0][0].cost);
        }
    }

    #[test]
    fn beats_random_sampling_on_sphere() {
        let mut wins = 0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let obj = SphereObjective {
                domain: domain(),
                target: sample_base_params(&domain(), &mut rng),
            };
            let ga = opt_ga(&obj, Budget::Evaluations(25 * 20), &GaConfig::default(), &mut rng);
            let rnd = opt_random(&obj, Budget::Evaluations(25), &mut rng);
            if ga.best_cost < rnd.best_cost {
                wins += 1;
            }
        }
        assert!(wins > 10, "{wins}/20");
    }

    #[test]
    fn deterministic_given_seed() {
        let obj = SphereObjective {
            domain: domain(),
            target: p(&[0.0, 0.5, 0.5]),
        };
        let run = || opt_ga(&obj, Budget::Evaluations(80), &GaConfig::default(), &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(run(), run());
    }
}

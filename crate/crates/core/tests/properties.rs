//! Property tests across module boundaries.

use basepose::bench::{bootstrap_ci, build_curves, checkpoint_grid, CellRecord};
use basepose::optimizers::{opt_ga, opt_random, Budget, GaConfig, HistoryEntry, Method, OptRunRecord, SphereObjective};
use basepose::se3::{BaseParams, Pose};
use basepose::task::{clamp_params, sample_base_params, BaseDomain};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn record(entries: &[(f64, bool)], fail_cost: f64) -> OptRunRecord {
    let history = entries
        .iter()
        .enumerate()
        .map(|(i, &(cost, success))| HistoryEntry {
            consumed: (i + 1) as f64,
            params: BaseParams::zeros(3).unwrap(),
            cost: if success { cost } else { fail_cost },
            success,
        })
        .collect();
    OptRunRecord::from_history(history, fail_cost)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bootstrap_interval_contains_mean(xs in prop::collection::vec(-100.0f64..100.0, 1..40), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = bootstrap_ci(&xs, 200, &mut rng, 0.95).unwrap();
        prop_assert!(s.ci_low <= s.mean && s.mean <= s.ci_high);
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(s.ci_low >= lo - 1e-9 && s.ci_high <= hi + 1e-9);
    }

    #[test]
    fn curves_are_monotone(cells in prop::collection::vec(prop::collection::vec((0.5f64..19.0, any::<bool>()), 1..30), 1..8)) {
        let records: Vec<CellRecord> = cells
            .iter()
            .enumerate()
            .map(|(seed, entries)| CellRecord {
                task_id: "p".into(),
                method: Method::Random,
                arity: 3,
                seed: seed as u64,
                budget: Budget::Evaluations(30),
                record: record(entries, 20.0),
            })
            .collect();
        let curves = build_curves(&records, &checkpoint_grid(&Budget::Evaluations(30)), 100).unwrap();
        let c = &curves[0];
        for w in c.best_cost.windows(2) {
            prop_assert!(w[1].mean <= w[0].mean + 1e-12);
        }
        for w in c.success_rate.windows(2) {
            prop_assert!(w[1].mean >= w[0].mean - 1e-12);
        }
        prop_assert!(c.success_rate.iter().all(|s| (0.0..=1.0).contains(&s.mean)));
    }

    #[test]
    fn records_round_trip_through_jsonl(entries in prop::collection::vec((0.0f64..30.0, any::<bool>()), 0..20)) {
        let rec = record(&entries, 50.0);
        prop_assert_eq!(OptRunRecord::from_jsonl(&rec.to_jsonl().unwrap(), 50.0).unwrap(), rec);
    }

    #[test]
    fn optimizers_stay_in_domain(seed in any::<u64>(), rot in any::<bool>(), hx in 0.1f64..2.0) {
        let domain = BaseDomain::new(Pose::from_translation(1.0, 0.0, 0.5), [hx, 0.5, 0.2], rot);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let obj = SphereObjective { target: sample_base_params(&domain, &mut rng), domain: domain.clone() };
        for rec in [
            opt_random(&obj, Budget::Evaluations(30), &mut rng),
            opt_ga(&obj, Budget::Evaluations(30), &GaConfig::default(), &mut rng),
        ] {
            prop_assert_eq!(rec.history.len(), 30);
            for e in &rec.history {
                prop_assert_eq!(&clamp_params(&e.params, &domain).unwrap(), &e.params);
            }
        }
    }
}

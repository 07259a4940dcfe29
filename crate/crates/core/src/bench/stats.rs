//! Bootstrap confidence intervals and convergence curves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CellRecord;
use crate::error::{Error, Result};
use crate::optimizers::{Budget, Method};

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const DEFAULT_LEVEL: f64 = 0.95;
pub const CHECKPOINTS: usize = 32;
/// Seed of the resampling stream used for reports.
pub const BOOTSTRAP_SEED: u64 = 0x5eed_b007;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_resamples: usize,
}

/// Linear-interpolation percentile of sorted data, `p ∈ [0, 1]`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Percentile bootstrap of the mean.
///
/// When every one of the `nⁿ` ordered resamples fits in the resampling
/// budget, they are enumerated exhaustively instead of drawn. The interval is
/// widened to contain the sample mean if the percentiles miss it.
pub fn bootstrap_ci<R: Rng + ?Sized>(samples: &[f64], n_resamples: usize, rng: &mut R, level: f64) -> Result<SummaryStats> {
    if samples.is_empty() {
        return Err(Error::Precondition("bootstrap needs at least one sample".into()));
    }
    if !(0.0..1.0).contains(&level) || n_resamples == 0 {
        return Err(Error::Precondition(format!("bad bootstrap settings: level {level}, {n_resamples} resamples")));
    }
    let n = samples.len();
    let m = mean(samples);
    let exhaustive = (n as f64) * (n as f64).ln() <= (n_resamples as f64).ln() + 1e-12;
    let mut means = if exhaustive {
        let total = n.pow(n as u32);
        let mut idx = vec![0usize; n];
        let mut out = Vec::with_capacity(total);
        for _ in 0..total {
            out.push(idx.iter().map(|&i| samples[i]).sum::<f64>() / n as f64);
            for d in idx.iter_mut() {
                *d += 1;
                if *d < n {
                    break;
                }
                *d = 0;
            }
        }
        out
    } else {
        (0..n_resamples)
            .map(|_| (0..n).map(|_| samples[rng.random_range(0..n)]).sum::<f64>() / n as f64)
            .collect()
    };
    means.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok(SummaryStats {
        mean: m,
        ci_low: percentile(&means, tail).min(m),
        ci_high: percentile(&means, 1.0 - tail).max(m),
        n_resamples: means.len(),
    })
}

/// Fraction of cells with a success recorded by checkpoint `t`.
pub fn success_rate(cells: &[&CellRecord], t: f64) -> f64 {
    if cells.is_empty() {
        return 0.0;
    }
    cells.iter().filter(|c| c.record.success_by(t)).count() as f64 / cells.len() as f64
}

/// `CHECKPOINTS` log-spaced points ending at the budget limit. Evaluation
/// budgets start at one evaluation, time budgets at a thousandth of the limit.
pub fn checkpoint_grid(budget: &Budget) -> Vec<f64> {
    let hi = budget.limit();
    let lo = if budget.is_evaluations() { 1.0_f64.min(hi) } else { hi / 1000.0 };
    let k = CHECKPOINTS - 1;
    (0..CHECKPOINTS)
        .map(|i| if i == k { hi } else { lo * (hi / lo).powf(i as f64 / k as f64) })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCurve {
    pub method: Method,
    pub arity: usize,
    pub grid: Vec<f64>,
    /// Best cost so far, failure cost for cells without a success.
    pub best_cost: Vec<SummaryStats>,
    pub success_rate: Vec<SummaryStats>,
    /// Mean best cost over solved cells only; `None` when nothing is solved.
    pub mean_cost_solved: Vec<Option<f64>>,
    pub cells: usize,
}

/// One curve per (method, arity), in method order.
pub fn build_curves(cells: &[CellRecord], grid: &[f64], n_resamples: usize) -> Result<Vec<ConvergenceCurve>> {
    let Some(first) = cells.first() else {
        return Ok(Vec::new());
    };
    if cells.iter().any(|c| c.budget.is_evaluations() != first.budget.is_evaluations()) {
        return Err(Error::Data("records mix evaluation and time budgets".into()));
    }
    let max_limit = cells.iter().map(|c| c.budget.limit()).fold(0.0, f64::max);
    if grid.iter().any(|&t| !(0.0..=max_limit).contains(&t)) {
        return Err(Error::Data(format!("checkpoint grid outside the recorded range [0, {max_limit}]")));
    }
    let mut keys: Vec<(Method, usize)> = cells.iter().map(|c| (c.method, c.arity)).collect();
    keys.sort();
    keys.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(BOOTSTRAP_SEED);
    keys.into_iter()
        .map(|(method, arity)| {
            let group: Vec<&CellRecord> = cells.iter().filter(|c| c.method == method && c.arity == arity).collect();
            let mut best_cost = Vec::with_capacity(grid.len());
            let mut success = Vec::with_capacity(grid.len());
            let mut solved = Vec::with_capacity(grid.len());
            for &t in grid {
                let costs: Vec<f64> = group.iter().map(|c| c.record.best_cost_at(t)).collect();
                let hits: Vec<f64> = group.iter().map(|c| f64::from(u8::from(c.record.success_by(t)))).collect();
                best_cost.push(bootstrap_ci(&costs, n_resamples, &mut rng, DEFAULT_LEVEL)?);
                success.push(bootstrap_ci(&hits, n_resamples, &mut rng, DEFAULT_LEVEL)?);
                let solved_costs: Vec<f64> = group.iter().filter(|c| c.record.success_by(t)).map(|c| c.record.best_cost_at(t)).collect();
                solved.push((!solved_costs.is_empty()).then(|| mean(&solved_costs)));
            }
            Ok(ConvergenceCurve {
                method,
                arity,
                grid: grid.to_vec(),
                best_cost,
                success_rate: success,
                mean_cost_solved: solved,
                cells: group.len(),
            })
        })
        .collect()
}

//! Percentile bootstrap of the mean: exhaustive on a tiny sample, sampled
//! on larger ones, with the interval narrowing as the sample grows.
//!
//! ```text
//! cargo run --release --example bootstrap_stats
//! ```

use basepose::bench::{bootstrap_ci, stats::DEFAULT_RESAMPLES};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tiny = bootstrap_ci(&[1.0, 2.0, 3.0], DEFAULT_RESAMPLES, &mut rng, 0.95)?;
    println!("[1, 2, 3]: mean {:.3}, CI [{:.3}, {:.3}] from {} resamples (all of them)", tiny.mean, tiny.ci_low, tiny.ci_high, tiny.n_resamples);

    let noise = Normal::new(10.0, 2.0)?;
    for n in [10, 100, 1000] {
        let samples: Vec<f64> = (0..n).map(|_| noise.sample(&mut rng)).collect();
        let s = bootstrap_ci(&samples, DEFAULT_RESAMPLES, &mut rng, 0.95)?;
        println!("n = {n:>4}: mean {:.3}, CI width {:.3}", s.mean, s.ci_high - s.ci_low);
    }
    Ok(())
}

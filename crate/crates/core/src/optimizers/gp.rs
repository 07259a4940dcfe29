//! Gaussian-process regression with an isotropic squared-exponential kernel.
//!
//! Targets are centered on their mean. The signal variance is the closed-form
//! maximum-likelihood value for each candidate length scale, and the length
//! scale with the highest log marginal likelihood wins.
//!
//! [`GpModel`] keeps one Cholesky factor per candidate length scale and
//! extends them row by row as observations arrive, so a refit after one new
//! point costs `O(n²)` per scale instead of `O(n³)`.

use crate::error::{Error, Result};

pub const DEFAULT_LENGTH_SCALES: [f64; 5] = [0.05, 0.1, 0.2, 0.5, 1.0];
pub const JITTER: f64 = 1e-10;
const MAX_JITTER: f64 = 1e-2;
const MIN_SIGNAL_VAR: f64 = 1e-12;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn kernel(a: &[f64], b: &[f64], length_scale: f64) -> f64 {
    (-0.5 * sq_dist(a, b) / (length_scale * length_scale)).exp()
}

/// Lower Cholesky factor of `K₀ + jitter·I`, stored row by row.
#[derive(Clone, Debug)]
struct Factor {
    length_scale: f64,
    jitter: f64,
    rows: Vec<Vec<f64>>,
}

impl Factor {
    fn new(length_scale: f64) -> Self {
        Factor {
            length_scale,
            jitter: JITTER,
            rows: Vec::new(),
        }
    }

    fn kernel_row(&self, x: &[Vec<f64>], q: &[f64]) -> Vec<f64> {
        x.iter().map(|xi| kernel(xi, q, self.length_scale)).collect()
    }

    /// Solves `L v = k`.
    fn forward(&self, k: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(k.len());
        for (i, row) in self.rows.iter().enumerate() {
            let s: f64 = row[..i].iter().zip(&v).map(|(l, vj)| l * vj).sum();
            v.push((k[i] - s) / row[i]);
        }
        v
    }

    /// Solves `Lᵀ a = v`.
    fn backward(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut a = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| self.rows[j][i] * a[j]).sum();
            a[i] = (v[i] - s) / self.rows[i][i];
        }
        a
    }

    /// Appends the next point of `x`; false if the factor would lose
    /// positive definiteness.
    fn push(&mut self, x: &[Vec<f64>]) -> bool {
        let n = self.rows.len();
        let k = self.kernel_row(&x[..n], &x[n]);
        let mut row = self.forward(&k);
        let d2 = 1.0 + self.jitter - row.iter().map(|v| v * v).sum::<f64>();
        // The exact pivot is at least the jitter; anything well below it is
        // cancellation noise.
        if d2.is_nan() || d2 < 0.5 * self.jitter {
            return false;
        }
        row.push(d2.sqrt());
        self.rows.push(row);
        true
    }

    /// Refactors all of `x`, raising the jitter until it succeeds.
    fn rebuild(&mut self, x: &[Vec<f64>]) -> Result<()> {
        loop {
            self.rows.clear();
            if (0..x.len()).all(|_| self.push(x)) {
                return Ok(());
            }
            self.jitter *= 10.0;
            if self.jitter > MAX_JITTER {
                return Err(Error::Invariant("GP kernel matrix is not positive definite".into()));
            }
        }
    }

    fn extend(&mut self, x: &[Vec<f64>]) -> Result<()> {
        while self.rows.len() < x.len() {
            if !self.push(x) {
                self.jitter *= 10.0;
                return self.rebuild(x);
            }
        }
        Ok(())
    }

    fn log_det(&self) -> f64 {
        self.rows.iter().enumerate().map(|(i, r)| 2.0 * r[i].ln()).sum()
    }
}

/// Training data plus one incrementally maintained factor per length scale.
#[derive(Clone, Debug)]
pub struct GpModel {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    factors: Vec<Factor>,
}

impl GpModel {
    pub fn new(length_scales: &[f64]) -> Self {
        GpModel {
            x: Vec::new(),
            y: Vec::new(),
            factors: length_scales.iter().map(|&l| Factor::new(l)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn targets(&self) -> &[f64] {
        &self.y
    }

    pub fn add(&mut self, x: Vec<f64>, y: f64) {
        self.x.push(x);
        self.y.push(y);
    }

    /// Posterior for the best length scale on the current data.
    pub fn fit(&mut self) -> Result<GaussianProcess> {
        let n = self.x.len();
        if n == 0 {
            return Err(Error::Precondition("GP needs at least one observation".into()));
        }
        if self.factors.is_empty() {
            return Err(Error::Precondition("empty length-scale grid".into()));
        }
        let y_mean = self.y.iter().sum::<f64>() / n as f64;
        let yc: Vec<f64> = self.y.iter().map(|v| v - y_mean).collect();
        let nf = n as f64;
        let mut best: Option<(f64, usize, Vec<f64>, f64)> = None;
        for (idx, f) in self.factors.iter_mut().enumerate() {
            f.extend(&self.x)?;
            let alpha = f.backward(&f.forward(&yc));
            let signal_var = (yc.iter().zip(&alpha).map(|(a, b)| a * b).sum::<f64>() / nf).max(MIN_SIGNAL_VAR);
            let lml = -0.5 * nf - 0.5 * nf * signal_var.ln() - 0.5 * f.log_det()
                - 0.5 * nf * (2.0 * std::f64::consts::PI).ln();
            if best.as_ref().is_none_or(|b| lml > b.0) {
                best = Some((lml, idx, alpha, signal_var));
            }
        }
        let (lml, idx, alpha, signal_var) = best.expect("non-empty grid");
        let factor = self.factors[idx].clone();
        Ok(GaussianProcess {
            x: self.x.clone(),
            length_scale: factor.length_scale,
            factor,
            alpha,
            signal_var,
            y_mean,
            log_marginal_likelihood: lml,
        })
    }
}

#[derive(Clone, Debug)]
pub struct GaussianProcess {
    x: Vec<Vec<f64>>,
    factor: Factor,
    /// `K₀⁻¹ (y − ȳ)` for the unit-variance kernel matrix `K₀`.
    alpha: Vec<f64>,
    pub length_scale: f64,
    pub signal_var: f64,
    pub y_mean: f64,
    pub log_marginal_likelihood: f64,
}

impl GaussianProcess {
    /// Fits with the length scale chosen from `length_scales`.
    pub fn fit(x: &[Vec<f64>], y: &[f64], length_scales: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Dimension {
                expected: x.len(),
                got: y.len(),
            });
        }
        let mut model = GpModel::new(length_scales);
        for (xi, yi) in x.iter().zip(y) {
            model.add(xi.clone(), *yi);
        }
        model.fit()
    }

    pub fn fit_with_length_scale(x: &[Vec<f64>], y: &[f64], length_scale: f64) -> Result<Self> {
        Self::fit(x, y, &[length_scale])
    }

    /// Posterior mean only; `O(n)`.
    pub fn mean(&self, q: &[f64]) -> f64 {
        self.y_mean + self.x.iter().zip(&self.alpha).map(|(xi, a)| a * kernel(xi, q, self.length_scale)).sum::<f64>()
    }

    /// Posterior mean and standard deviation at `q`.
    pub fn predict(&self, q: &[f64]) -> (f64, f64) {
        let k = self.factor.kernel_row(&self.x, q);
        let mean = self.y_mean + k.iter().zip(&self.alpha).map(|(a, b)| a * b).sum::<f64>();
        let v = self.factor.forward(&k);
        let var = self.signal_var * (1.0 - v.iter().map(|x| x * x).sum::<f64>()).max(0.0);
        (mean, var.sqrt())
    }

    pub fn prior_std(&self) -> f64 {
        self.signal_var.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect()
    }

    #[test]
    fn single_point_interpolates() {
        let x = vec![vec![0.3, 0.6, 0.1]];
        let gp = GaussianProcess::fit(&x, &[2.0], &DEFAULT_LENGTH_SCALES).unwrap();
        let (m, s) = gp.predict(&x[0]);
        assert!((m - 2.0).abs() <= 1e-3);
        assert!(s <= 1e-3);
    }

    #[test]
    fn interpolates_training_points() {
        let x = random_points(40, 3, 0);
        let y: Vec<f64> = x.iter().map(|p| (3.0 * p[0]).sin() + p[1] * p[2] + if p[0] > 0.8 { 20.0 } else { 0.0 }).collect();
        let gp = GaussianProcess::fit(&x, &y, &DEFAULT_LENGTH_SCALES).unwrap();
        for (p, t) in x.iter().zip(&y) {
            assert!((gp.predict(p).0 - t).abs() <= 1e-3, "{} vs {t}", gp.predict(p).0);
            assert!((gp.mean(p) - gp.predict(p).0).abs() < 1e-9);
        }
    }

    #[test]
    fn matches_dense_solve() {
        // Oracle: posterior from a dense LU solve of the full kernel system.
        let x = random_points(25, 2, 1);
        let y: Vec<f64> = x.iter().map(|p| p[0] * 4.0 - p[1]).collect();
        let l = 0.2;
        let gp = GaussianProcess::fit_with_length_scale(&x, &y, l).unwrap();
        let n = x.len();
        let k = DMatrix::from_fn(n, n, |i, j| kernel(&x[i], &x[j], l) + if i == j { JITTER } else { 0.0 });
        let ybar = y.iter().sum::<f64>() / n as f64;
        let yc = DVector::from_iterator(n, y.iter().map(|v| v - ybar));
        let lu = k.lu();
        let alpha = lu.solve(&yc).unwrap();
        let s2 = yc.dot(&alpha) / n as f64;
        for q in random_points(10, 2, 2) {
            let ks = DVector::from_iterator(n, x.iter().map(|xi| kernel(xi, &q, l)));
            let mean = ybar + ks.dot(&alpha);
            let var = s2 * (1.0 - ks.dot(&lu.solve(&ks).unwrap()));
            let (m, s) = gp.predict(&q);
            assert!((m - mean).abs() < 1e-6);
            assert!((s * s - var.max(0.0)).abs() < 1e-6);
        }
    }

    #[test]
    fn incremental_equals_batch() {
        let x = random_points(30, 3, 3);
        let y: Vec<f64> = x.iter().map(|p| p.iter().sum()).collect();
        let mut model = GpModel::new(&DEFAULT_LENGTH_SCALES);
        for (xi, yi) in x.iter().zip(&y) {
            model.add(xi.clone(), *yi);
            model.fit().unwrap();
        }
        let inc = model.fit().unwrap();
        let batch = GaussianProcess::fit(&x, &y, &DEFAULT_LENGTH_SCALES).unwrap();
        assert_eq!(inc.length_scale, batch.length_scale);
        let q = [0.2, 0.4, 0.6];
        assert!((inc.predict(&q).0 - batch.predict(&q).0).abs() < 1e-9);
    }

    #[test]
    fn reverts_to_prior_far_away() {
        let x = vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![0.0, 0.1]];
        let y = [1.0, 2.0, 3.0];
        let gp = GaussianProcess::fit_with_length_scale(&x, &y, 0.05).unwrap();
        let (m, s) = gp.predict(&[50.0, 50.0]);
        assert!((m - 2.0).abs() < 1e-9);
        assert!((s - gp.prior_std()).abs() < 1e-9);
    }

    #[test]
    fn constant_targets_give_constant_mean() {
        let x = vec![vec![0.1], vec![0.5], vec![0.9]];
        let gp = GaussianProcess::fit(&x, &[4.0; 3], &DEFAULT_LENGTH_SCALES).unwrap();
        for q in [0.0, 0.3, 0.7, 1.0] {
            assert!((gp.predict(&[q]).0 - 4.0).abs() <= 1e-3);
        }
    }

    #[test]
    fn duplicate_inputs_are_tolerated() {
        let x = vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![0.2, 0.9]];
        let gp = GaussianProcess::fit(&x, &[1.0, 1.0, 3.0], &DEFAULT_LENGTH_SCALES).unwrap();
        assert!((gp.predict(&[0.5, 0.5]).0 - 1.0).abs() <= 1e-3);
    }
}

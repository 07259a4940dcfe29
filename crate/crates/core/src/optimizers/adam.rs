//! Adam with bias correction.

use super::sgd::SgdConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u32,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        AdamState {
            m: vec![0.0; dim],
            v: vec![0.0; dim],
            t: 0,
        }
    }
}

/// One Adam update; returns the parameter change `−α·m̂/(√v̂ + ε)`.
pub fn adam_step(state: &mut AdamState, grad: &[f64], cfg: &SgdConfig) -> Vec<f64> {
    assert_eq!(grad.len(), state.m.len(), "gradient dimension mismatch");
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    grad.iter()
        .enumerate()
        .map(|(i, &g)| {
            state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
            state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
            let m_hat = state.m[i] / c1;
            let v_hat = state.v[i] / c2;
            -cfg.alpha * m_hat / (v_hat.sqrt() + cfg.epsilon)
        })
        .collect()
}

//! Minibatch Adam baseline: exponential moving averages of the gradient and
//! its square with bias correction,
//! `x <- x - alpha * mhat / (sqrt(vhat) + eps)`.
//!
//! No decrease guarantee is claimed; it is included as the practical
//! gradient-focused choice for non-analyzed runs.

use rand::Rng;

use crate::error::{contract, Result};
use crate::oracle::{batch_mean_grad, CountedOracle};
use crate::rng::{labels, stream_rng};
use crate::scalar::{real, Scalar};

use super::{GfoResult, GfoTracePoint, Reservoir};

#[derive(Debug, Clone)]
pub struct AdamConfig<T> {
    pub alpha: T,
    pub eps: T,
    pub beta1: T,
    pub beta2: T,
    pub batch: usize,
    pub iters: u64,
    pub seed: u64,
    pub trace_every: u64,
}

impl<T: Scalar> AdamConfig<T> {
    /// Conventional defaults: `beta1 = 0.9`, `beta2 = 0.999`, `eps = 1e-8`.
    pub fn new(alpha: T, batch: usize, iters: u64, seed: u64) -> Self {
        AdamConfig {
            alpha,
            eps: real(1e-8),
            beta1: real(0.9),
            beta2: real(0.999),
            batch,
            iters,
            seed,
            trace_every: 0,
        }
    }

    pub fn reseeded(&self, seed: u64) -> Self {
        let mut c = self.clone();
        c.seed = seed;
        c
    }
}

pub fn adam_run<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x0: &[T],
    cfg: &AdamConfig<T>,
) -> Result<GfoResult<T>> {
    let n = oracle.num_components();
    if cfg.batch == 0 || cfg.batch > n {
        return Err(contract("adam batch must satisfy 1 <= batch <= n"));
    }
    if !(cfg.alpha > T::zero()) || !(cfg.eps > T::zero()) {
        return Err(contract("adam requires alpha > 0 and eps > 0"));
    }
    for beta in [cfg.beta1, cfg.beta2] {
        if beta < T::zero() || beta >= T::one() {
            return Err(contract("adam requires 0 <= beta < 1"));
        }
    }
    let d = oracle.dim();
    let mut idx_rng = stream_rng(cfg.seed, labels::SGD_INDEX);
    let mut res_rng = stream_rng(cfg.seed, labels::RESERVOIR);
    let mut reservoir = Reservoir::new();
    let mut x = x0.to_vec();
    let mut m1 = vec![T::zero(); d];
    let mut m2 = vec![T::zero(); d];
    let mut indices = vec![0usize; cfg.batch];
    let mut trace = Vec::new();
    let one = T::one();
    for t in 0..cfg.iters {
        reservoir.offer(&x, &mut res_rng);
        let g = if cfg.batch == n {
            oracle.full_value_grad(&x)?.1
        } else {
            for slot in indices.iter_mut() {
                *slot = idx_rng.gen_range(0..n);
            }
            batch_mean_grad(oracle, &indices, &x)?
        };
        let tf = real_u64::<T>(t + 1);
        let bc1 = one - cfg.beta1.powf(tf);
        let bc2 = one - cfg.beta2.powf(tf);
        for j in 0..d {
            m1[j] = cfg.beta1 * m1[j] + (one - cfg.beta1) * g[j];
            m2[j] = cfg.beta2 * m2[j] + (one - cfg.beta2) * g[j] * g[j];
            let mhat = m1[j] / bc1;
            let vhat = m2[j] / bc2;
            x[j] = x[j] - cfg.alpha * mhat / (vhat.sqrt() + cfg.eps);
        }
        oracle.ensure_finite_iterate(&x, t + 1, "adam step")?;
        if cfg.trace_every > 0 && (t + 1) % cfg.trace_every == 0 {
            trace.push(GfoTracePoint {
                inner: t + 1,
                f: oracle.probe_value(&x),
                grad_norm: None,
                counters: oracle.counters(),
            });
        }
    }
    let y = reservoir.take().expect("at least one iterate");
    let f_y = oracle.probe_value(&y);
    let f_z = oracle.probe_value(&x);
    trace.push(GfoTracePoint {
        inner: cfg.iters,
        f: f_z,
        grad_norm: None,
        counters: oracle.counters(),
    });
    Ok(GfoResult {
        y,
        z: x,
        f_y,
        f_z,
        trace,
        sum_grad_sq: None,
    })
}

fn real_u64<T: Scalar>(v: u64) -> T {
    T::from_u64(v).expect("u64 fits scalar")
}

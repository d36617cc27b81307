//! Minibatch stochastic gradient descent with uniform sampling with
//! replacement. `batch = n` degenerates to a deterministic full pass, making
//! the per-iteration update identical to gradient descent.

use rand::Rng;

use crate::error::{contract, Result};
use crate::oracle::{batch_mean_grad, CountedOracle};
use crate::rng::{labels, stream_rng};
use crate::scalar::Scalar;

use super::{GfoResult, GfoTracePoint, Reservoir};

#[derive(Debug, Clone)]
pub struct SgdConfig<T> {
    pub step: T,
    pub batch: usize,
    pub iters: u64,
    pub seed: u64,
    pub trace_every: u64,
}

impl<T: Scalar> SgdConfig<T> {
    pub fn new(step: T, batch: usize, iters: u64, seed: u64) -> Self {
        SgdConfig {
            step,
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

pub fn sgd_run<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x0: &[T],
    cfg: &SgdConfig<T>,
) -> Result<GfoResult<T>> {
    let n = oracle.num_components();
    if cfg.batch == 0 || cfg.batch > n {
        return Err(contract("sgd batch must satisfy 1 <= batch <= n"));
    }
    let mut idx_rng = stream_rng(cfg.seed, labels::SGD_INDEX);
    let mut res_rng = stream_rng(cfg.seed, labels::RESERVOIR);
    let mut reservoir = Reservoir::new();
    let mut x = x0.to_vec();
    let mut indices = vec![0usize; cfg.batch];
    let mut trace = Vec::new();
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
        for (xi, gi) in x.iter_mut().zip(g.iter()) {
            *xi = *xi - cfg.step * *gi;
        }
        oracle.ensure_finite_iterate(&x, t + 1, "sgd step")?;
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

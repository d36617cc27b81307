//! Full-batch gradient descent baseline. Deterministic trajectory; the
//! sampled iterate `y` is the only randomized output.

use crate::error::Result;
use crate::linalg::norm2;
use crate::oracle::CountedOracle;
use crate::rng::{labels, stream_rng};
use crate::scalar::Scalar;

use super::{GfoResult, GfoTracePoint, Reservoir};

#[derive(Debug, Clone)]
pub struct GdConfig<T> {
    pub step: T,
    pub iters: u64,
    /// Seed for the uniform iterate sample `y`.
    pub seed: u64,
    pub trace_every: u64,
}

impl<T: Scalar> GdConfig<T> {
    pub fn new(step: T, iters: u64, seed: u64) -> Self {
        GdConfig {
            step,
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

pub fn gd_run<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x0: &[T],
    cfg: &GdConfig<T>,
) -> Result<GfoResult<T>> {
    assert!(cfg.step > T::zero(), "step must be positive");
    let mut res_rng = stream_rng(cfg.seed, labels::RESERVOIR);
    let mut reservoir = Reservoir::new();
    let mut x = x0.to_vec();
    let mut trace = Vec::new();
    for t in 0..cfg.iters {
        reservoir.offer(&x, &mut res_rng);
        let (f, g) = oracle.full_value_grad(&x)?;
        for (xi, gi) in x.iter_mut().zip(g.iter()) {
            *xi = *xi - cfg.step * *gi;
        }
        oracle.ensure_finite_iterate(&x, t + 1, "gd step")?;
        if cfg.trace_every > 0 && (t + 1) % cfg.trace_every == 0 {
            trace.push(GfoTracePoint {
                inner: t + 1,
                f,
                grad_norm: Some(norm2(&g)),
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

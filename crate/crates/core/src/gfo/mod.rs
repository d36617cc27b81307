//! Gradient-focused optimizers.
//!
//! Each runner returns a pair `(y, z)`: `z` is the final iterate and `y` is
//! drawn uniformly from the multiset of all inner iterates (the points seen
//! *before* each update) using the run's seeded generator. Function values
//! attached to results and trace points are uncounted diagnostics, so the
//! documented oracle accounting of each method is exact.

mod adam;
mod gd;
mod sgd;
mod svrg;

pub use adam::{adam_run, AdamConfig};
pub use gd::{gd_run, GdConfig};
pub use sgd::{sgd_run, SgdConfig};
pub use svrg::{svrg_run, SvrgConfig};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::oracle::{CountedOracle, OracleCounters};
use crate::scalar::Scalar;

/// One diagnostic trace point of a gradient-focused run.
#[derive(Debug, Clone)]
pub struct GfoTracePoint<T> {
    pub inner: u64,
    pub f: T,
    pub grad_norm: Option<T>,
    pub counters: OracleCounters,
}

/// Output contract of a gradient-focused run.
#[derive(Debug, Clone)]
pub struct GfoResult<T> {
    /// Uniformly sampled inner iterate.
    pub y: Vec<T>,
    /// Final iterate.
    pub z: Vec<T>,
    pub f_y: T,
    pub f_z: T,
    pub trace: Vec<GfoTracePoint<T>>,
    /// Sum of squared full-gradient norms over all inner iterates, when the
    /// run was asked to record it (diagnostic instrumentation).
    pub sum_grad_sq: Option<T>,
}

/// Single-slot uniform reservoir over a stream of candidate iterates.
pub(crate) struct Reservoir<T> {
    kept: Option<Vec<T>>,
    seen: u64,
}

impl<T: Clone> Reservoir<T> {
    pub fn new() -> Self {
        Reservoir {
            kept: None,
            seen: 0,
        }
    }

    pub fn offer(&mut self, candidate: &[T], rng: &mut ChaCha8Rng) {
        self.seen += 1;
        if self.seen == 1 || rng.gen_range(0..self.seen) == 0 {
            self.kept = Some(candidate.to_vec());
        }
    }

    pub fn take(self) -> Option<Vec<T>> {
        self.kept
    }
}

/// Gradient-focused strategy selection for the outer framework.
#[derive(Debug, Clone)]
pub enum GfoChoice<T> {
    Svrg(SvrgConfig<T>),
    Gd(GdConfig<T>),
    Sgd(SgdConfig<T>),
    Adam(AdamConfig<T>),
    /// Pass-through (`y = z = x`), for running a Hessian-focused method
    /// standalone inside the framework loop.
    Identity,
}

impl<T: Scalar> GfoChoice<T> {
    pub fn run(
        &self,
        oracle: &CountedOracle<'_, T>,
        x0: &[T],
        seed: u64,
    ) -> Result<GfoResult<T>> {
        match self {
            GfoChoice::Svrg(cfg) => svrg_run(oracle, x0, &cfg.reseeded(seed)),
            GfoChoice::Gd(cfg) => gd_run(oracle, x0, &cfg.reseeded(seed)),
            GfoChoice::Sgd(cfg) => sgd_run(oracle, x0, &cfg.reseeded(seed)),
            GfoChoice::Adam(cfg) => adam_run(oracle, x0, &cfg.reseeded(seed)),
            GfoChoice::Identity => {
                let f = oracle.probe_value(x0);
                Ok(GfoResult {
                    y: x0.to_vec(),
                    z: x0.to_vec(),
                    f_y: f,
                    f_z: f,
                    trace: Vec::new(),
                    sum_grad_sq: None,
                })
            }
        }
    }

    /// Nominal inner-iteration count `T_g`, used by the mixing-probability
    /// formula.
    pub fn nominal_inner_iters(&self) -> u64 {
        match self {
            GfoChoice::Svrg(cfg) => cfg.inner_iters,
            GfoChoice::Gd(cfg) => cfg.iters,
            GfoChoice::Sgd(cfg) => cfg.iters,
            GfoChoice::Adam(cfg) => cfg.iters,
            GfoChoice::Identity => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GfoChoice::Svrg(_) => "svrg",
            GfoChoice::Gd(_) => "gd",
            GfoChoice::Sgd(_) => "sgd",
            GfoChoice::Adam(_) => "adam",
            GfoChoice::Identity => "identity",
        }
    }
}

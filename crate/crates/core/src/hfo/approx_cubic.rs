//! Stochastic cubic step with adaptive per-coordinate scaling.
//!
//! A minibatch `B` supplies the gradient and the Hessian operator. The
//! moving average `s <- beta s + (1-beta)(|g|^3 + 2 g^2)` (element-wise)
//! defines the diagonal `Md = (s + 1e-12)^(1/9)` and the scaled model
//! `<g, v> + (1/2)<v, Hv> + (M/6) ||Md v||^3`, solved by the same fixed-step
//! gradient descent (scaled-term gradient `(M/2) ||Md v|| Md^2 v`). The step
//! is applied unconditionally, so the non-increase property holds only in
//! expectation and is monitored rather than enforced.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, OptError, Result};
use crate::linalg::{all_finite, norm2};
use crate::oracle::{batch_mean_grad, batch_mean_hvp, CountedOracle};
use crate::rng::{labels, stream_rng};
use crate::scalar::{real, Scalar};

use super::{HfoResult, Tau};

/// Moving-average state of the adaptive diagonal scale.
#[derive(Debug, Clone)]
pub struct DiagScaleState<T> {
    pub s: Vec<T>,
    pub beta: T,
    pub floor: T,
    pub exponent: T,
}

impl<T: Scalar> DiagScaleState<T> {
    /// Fresh state with the shipped constants: `beta = 0.9`, floor `1e-12`,
    /// exponent `1/9`.
    pub fn new(dim: usize) -> Self {
        Self::with_beta(dim, real(0.9))
    }

    pub fn with_beta(dim: usize, beta: T) -> Self {
        DiagScaleState {
            s: vec![T::zero(); dim],
            beta,
            floor: real(1e-12),
            exponent: real(1.0 / 9.0),
        }
    }

    /// `s <- beta s + (1-beta)(|g|^3 + 2 g^2)`; preserves non-negativity.
    pub fn update(&mut self, g: &[T]) {
        let one = T::one();
        let two = real::<T>(2.0);
        for (si, gi) in self.s.iter_mut().zip(g.iter()) {
            let a = gi.abs();
            *si = self.beta * *si + (one - self.beta) * (a * a * a + two * *gi * *gi);
        }
    }

    /// Diagonal entries `(s + floor)^(1/9)`.
    pub fn scale_vector(&self) -> Vec<T> {
        self.s
            .iter()
            .map(|si| (*si + self.floor).powf(self.exponent))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct AcdConfig<T> {
    pub reg: T,
    pub batch: usize,
    pub solver_step: T,
    pub grad_tol: T,
    pub max_iters: u64,
    pub init_scale: T,
}

/// Gradient of the scaled cubic model. With `scale = None` this is exactly
/// the unscaled model gradient `g + Hv + (M/2)||v|| v`.
pub fn scaled_model_gradient<T: Scalar>(
    g: &[T],
    hv: &[T],
    v: &[T],
    reg: T,
    scale: Option<&[T]>,
) -> Vec<T> {
    let half = real::<T>(0.5);
    match scale {
        None => {
            let w = reg * half * norm2(v);
            g.iter()
                .zip(hv.iter())
                .zip(v.iter())
                .map(|((gi, hvi), vi)| *gi + *hvi + w * *vi)
                .collect()
        }
        Some(md) => {
            let mdv: Vec<T> = md.iter().zip(v.iter()).map(|(m, vi)| *m * *vi).collect();
            let w = reg * half * norm2(&mdv);
            g.iter()
                .zip(hv.iter())
                .zip(v.iter().zip(md.iter()))
                .map(|((gi, hvi), (vi, mi))| *gi + *hvi + w * *mi * *mi * *vi)
                .collect()
        }
    }
}

/// One stochastic scaled-cubic step. Returns the result and the advanced
/// scale state. IFO cost `|B|`; ISO cost `|B|` per solver iteration.
pub fn approx_cubic_descent<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x: &[T],
    cfg: &AcdConfig<T>,
    mut state: DiagScaleState<T>,
    seed: u64,
) -> Result<(HfoResult<T>, DiagScaleState<T>)> {
    let n = oracle.num_components();
    let d = oracle.dim();
    if cfg.batch == 0 || cfg.batch > n {
        return Err(contract("approx cubic batch must satisfy 1 <= batch <= n"));
    }
    if state.s.len() != d {
        return Err(contract("scale state dimension mismatch"));
    }
    let mut rng: ChaCha8Rng = stream_rng(seed, labels::MINIBATCH);
    // Minibatch without replacement.
    let indices: Vec<usize> = if cfg.batch == n {
        (0..n).collect()
    } else {
        let mut ix = sample(&mut rng, n, cfg.batch).into_vec();
        ix.sort_unstable();
        ix
    };
    let g = batch_mean_grad(oracle, &indices, x)?;
    state.update(&g);
    let md = state.scale_vector();

    let mut v: Vec<T> = g.iter().map(|gi| -cfg.init_scale * *gi).collect();
    for k in 0..cfg.max_iters {
        let hv = batch_mean_hvp(oracle, &indices, x, &v)?;
        let gm = scaled_model_gradient(&g, &hv, &v, cfg.reg, Some(&md));
        let gn = norm2(&gm);
        if !gn.is_finite() {
            return Err(OptError::NonFiniteIterate {
                iteration: k + 1,
                context: "approx cubic solve",
            });
        }
        for (vi, gmi) in v.iter_mut().zip(gm.iter()) {
            *vi = *vi - cfg.solver_step * *gmi;
        }
        if !all_finite(&v) {
            return Err(OptError::NonFiniteIterate {
                iteration: k + 1,
                context: "approx cubic solve",
            });
        }
        if gn <= cfg.grad_tol {
            break;
        }
    }

    // Unconditional update; decrease is monitored, not enforced.
    let f_x = oracle.probe_value(x);
    let y: Vec<T> = x.iter().zip(v.iter()).map(|(xi, vi)| *xi + *vi).collect();
    let f_y = oracle.probe_value(&y);
    Ok((
        HfoResult {
            y,
            tau: Tau::Continue,
            f_y,
            decrease: f_x - f_y,
            certificate: None,
            moved: true,
        },
        state,
    ))
}

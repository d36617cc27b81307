//! Cubic-regularized model step.
//!
//! The model around `x` is
//! `m(v) = <g, v> + (1/2) <v, Hv> + (M/6) ||v||^3`
//! and is minimized by gradient descent on `m`, whose gradient is
//! `g + Hv + (M/2) ||v|| v`, at a fixed solver step until the model
//! gradient norm falls below a tolerance or an iteration cap. Each solver
//! iteration consumes one Hessian-vector product. The solver starts from
//! `v0 = -min(1/L, 1) g`; when the gradient is (numerically) zero a seeded
//! random perturbation breaks the symmetry so negative curvature remains
//! reachable.

use rand_chacha::ChaCha8Rng;

use crate::error::{contract, OptError, Result};
use crate::linalg::{all_finite, axpy, dot, norm2};
use crate::oracle::CountedOracle;
use crate::rng::{labels, random_unit_vector, stream_rng};
use crate::scalar::{real, Scalar};

use super::{HfoResult, Tau};

#[derive(Debug, Clone)]
pub struct CubicSubproblemConfig<T> {
    /// Cubic regularization weight `M`.
    pub reg: T,
    /// Fixed gradient-descent step on the model.
    pub solver_step: T,
    /// Stop once `||grad m(v)|| <= grad_tol`.
    pub grad_tol: T,
    pub max_iters: u64,
    /// Scale of the `-g` initialization (callers pass `min(1/L, 1)`).
    pub init_scale: T,
    /// Add a seeded perturbation to `v0` when `||g|| <=` this threshold.
    pub perturb_tol: T,
    /// Norm of that perturbation.
    pub perturb_scale: T,
}

impl<T: Scalar> CubicSubproblemConfig<T> {
    /// Benchmark profile: solver step 1e-2, tolerance 1e-3.
    pub fn synthetic_profile(reg: T) -> Self {
        CubicSubproblemConfig {
            reg,
            solver_step: real(1e-2),
            grad_tol: real(1e-3),
            max_iters: 100_000,
            init_scale: T::one(),
            perturb_tol: real(1e-12),
            perturb_scale: real(1e-6),
        }
    }

    /// Large-instance profile: solver step 1e-3, tolerance 0.1.
    pub fn large_profile(reg: T) -> Self {
        CubicSubproblemConfig {
            reg,
            solver_step: real(1e-3),
            grad_tol: real(0.1),
            max_iters: 100_000,
            init_scale: T::one(),
            perturb_tol: real(1e-12),
            perturb_scale: real(1e-6),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reg > T::zero()) {
            return Err(contract("cubic model requires M > 0"));
        }
        if !(self.grad_tol > T::zero()) || !(self.solver_step > T::zero()) {
            return Err(contract("cubic solver requires positive step and tolerance"));
        }
        Ok(())
    }
}

/// Model value, for tests and diagnostics.
pub fn cubic_model_value<T: Scalar>(g: &[T], hv: &[T], v: &[T], reg: T) -> T {
    let nv = norm2(v);
    dot(g, v) + dot(v, hv) / real(2.0) + reg / real::<T>(6.0) * nv * nv * nv
}

/// Minimize the cubic model by gradient descent. `hvp` is charged by the
/// caller's oracle context; returns the step and the iteration count.
pub fn cubic_subproblem<T, F>(
    g: &[T],
    mut hvp: F,
    cfg: &CubicSubproblemConfig<T>,
    seed: u64,
) -> Result<(Vec<T>, u64)>
where
    T: Scalar,
    F: FnMut(&[T]) -> Result<Vec<T>>,
{
    cfg.validate()?;
    let d = g.len();
    let mut v: Vec<T> = g.iter().map(|gi| -cfg.init_scale * *gi).collect();
    if norm2(g) <= cfg.perturb_tol {
        let mut rng: ChaCha8Rng = stream_rng(seed, labels::SUBPROBLEM_PERTURB);
        let u = random_unit_vector::<T>(&mut rng, d);
        axpy(cfg.perturb_scale, &u, &mut v);
    }
    let half = real::<T>(0.5);
    let mut iters = 0u64;
    for k in 0..cfg.max_iters {
        let hv = hvp(&v)?;
        iters = k + 1;
        let vnorm = norm2(&v);
        let cube = cfg.reg * half * vnorm;
        // grad m(v) = g + Hv + (M/2)||v|| v
        let mut gm_sq = T::zero();
        for j in 0..d {
            let gm = g[j] + hv[j] + cube * v[j];
            gm_sq = gm_sq + gm * gm;
            v[j] = v[j] - cfg.solver_step * gm;
        }
        if !gm_sq.is_finite() || !all_finite(&v) {
            return Err(OptError::NonFiniteIterate {
                iteration: iters,
                context: "cubic subproblem solve",
            });
        }
        if gm_sq.sqrt() <= cfg.grad_tol {
            break;
        }
    }
    Ok((v, iters))
}

/// Full cubic-regularization step at `x`: solve the model with full-batch
/// gradient and HVPs, then keep the better of `x + v` and `x` (guarding
/// the non-increase contract against inexact solves).
pub fn cubic_descent<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x: &[T],
    cfg: &CubicSubproblemConfig<T>,
    seed: u64,
) -> Result<HfoResult<T>> {
    let (f_x, g) = oracle.full_value_grad(x)?;
    let l = oracle.spec().lipschitz_grad;
    let mut cfg = cfg.clone();
    cfg.init_scale = (T::one() / l).min(T::one());
    let (v, _iters) = cubic_subproblem(&g, |w| oracle.full_hvp(x, w), &cfg, seed)?;
    let mut u = x.to_vec();
    axpy(T::one(), &v, &mut u);
    let f_u = oracle.full_value_grad(&u)?.0;
    let (y, f_y, moved) = if f_u < f_x {
        (u, f_u, true)
    } else {
        (x.to_vec(), f_x, false)
    };
    Ok(HfoResult {
        y,
        tau: Tau::Continue,
        f_y,
        decrease: f_x - f_y,
        certificate: None,
        moved,
    })
}

//! Hessian-focused optimizers: negative-curvature descent, cubic-regularized
//! steps, and the stochastic diagonal-scaled variant, plus the second-order
//! criticality check used to certify halting.

mod approx_cubic;
mod check;
mod cubic;
mod hessian_descent;
mod min_eig;

pub use approx_cubic::{approx_cubic_descent, AcdConfig, DiagScaleState};
pub use check::{check_second_order_critical, CheckOutcome};
pub use cubic::{cubic_descent, cubic_subproblem, CubicSubproblemConfig};
pub use hessian_descent::{hessian_descent, hessian_descent_with_certificate, HdConfig};
pub use min_eig::{min_eig_vector, MinEigSettings};

use crate::error::Result;
use crate::oracle::CountedOracle;
use crate::scalar::Scalar;

/// Certified curvature direction.
#[derive(Debug, Clone)]
pub struct CurvatureEstimate<T> {
    /// Unit direction.
    pub direction: Vec<T>,
    /// `v . (hess f(x) v)` recomputed from one fresh full HVP.
    pub rayleigh: T,
    /// Total full Hessian-vector products consumed (including the final
    /// recomputation), so ISO cost is exactly `n * hvp_calls`.
    pub hvp_calls: u64,
    /// Probability with which the `gamma/2` accuracy guarantee holds.
    pub confidence: T,
    /// False when the iteration budget ran out before the estimate settled;
    /// callers decide whether a degraded certificate is acceptable.
    pub converged: bool,
    /// Spectral shift the estimator ran with; callers may feed it back as a
    /// hint for later estimates at nearby points.
    pub shift: T,
}

/// Continue/halt flag of a Hessian-focused step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tau {
    Halt,
    Continue,
}

#[derive(Debug, Clone)]
pub struct HfoResult<T> {
    pub y: Vec<T>,
    pub tau: Tau,
    pub f_y: T,
    pub certificate: Option<CurvatureEstimate<T>>,
    /// `f(x) - f(y)` realized by the step (diagnostic).
    pub decrease: T,
    /// Whether the candidate point was accepted over the input point.
    pub moved: bool,
}

/// Hessian-focused strategy selection for the outer framework.
#[derive(Debug, Clone)]
pub enum HfoChoice<T> {
    HessianDescent(HdConfig<T>),
    Cubic(CubicSubproblemConfig<T>),
    ApproxCubic(AcdConfig<T>, DiagScaleState<T>),
}

impl<T: Scalar> HfoChoice<T> {
    pub fn step(
        &mut self,
        oracle: &CountedOracle<'_, T>,
        x: &[T],
        gamma: T,
        seed: u64,
        fresh_certificate: Option<&CurvatureEstimate<T>>,
    ) -> Result<HfoResult<T>> {
        match self {
            HfoChoice::HessianDescent(cfg) => match fresh_certificate {
                Some(cert) => hessian_descent_with_certificate(oracle, x, cert.clone(), cfg),
                None => hessian_descent(oracle, x, gamma, cfg, seed),
            },
            HfoChoice::Cubic(cfg) => cubic_descent(oracle, x, cfg, seed),
            HfoChoice::ApproxCubic(cfg, state) => {
                let (res, next) = approx_cubic_descent(oracle, x, cfg, state.clone(), seed)?;
                *state = next;
                Ok(res)
            }
        }
    }

    pub fn reg_constant(&self) -> T {
        match self {
            HfoChoice::HessianDescent(cfg) => cfg.reg,
            HfoChoice::Cubic(cfg) => cfg.reg,
            HfoChoice::ApproxCubic(cfg, _) => cfg.reg,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HfoChoice::HessianDescent(_) => "hessian-descent",
            HfoChoice::Cubic(_) => "cubic",
            HfoChoice::ApproxCubic(_, _) => "approx-cubic",
        }
    }
}

//! Negative-curvature descent step.
//!
//! Given a certified direction `v` with Rayleigh quotient `r = v . Hv`, the
//! candidate is `u = x - (|r|/M) sign(<v, grad f(x)>) v` (with `sign(0) = +1`)
//! and the output is the better of `u` and `x`, so the objective never
//! increases. When `r <= -gamma/2` the M-Lipschitz-Hessian expansion gives a
//! guaranteed decrease of at least `|r|^3 / (3 M^2)`.

use crate::error::{contract, Result};
use crate::linalg::dot;
use crate::oracle::CountedOracle;
use crate::scalar::Scalar;

use super::{min_eig_vector, CurvatureEstimate, HfoResult, MinEigSettings, Tau};

#[derive(Debug, Clone)]
pub struct HdConfig<T> {
    /// Curvature regularizer `M` scaling the step `|r|/M`.
    pub reg: T,
    /// Estimator success probability target.
    pub rho: T,
    pub min_eig: MinEigSettings<T>,
}

impl<T: Scalar> HdConfig<T> {
    pub fn new(reg: T, rho: T) -> Self {
        HdConfig {
            reg,
            rho,
            min_eig: MinEigSettings::default(),
        }
    }
}

pub fn hessian_descent<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x: &[T],
    gamma: T,
    cfg: &HdConfig<T>,
    seed: u64,
) -> Result<HfoResult<T>> {
    if !(cfg.reg > T::zero()) {
        return Err(contract("hessian descent requires M > 0"));
    }
    let cert = min_eig_vector(oracle, x, gamma, cfg.rho, seed, &cfg.min_eig)?;
    hessian_descent_with_certificate(oracle, x, cert, cfg)
}

/// Same step starting from an already computed curvature certificate (the
/// framework reuses the criticality check's certificate this way; the
/// certificate's cost has already been counted where it was produced).
pub fn hessian_descent_with_certificate<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x: &[T],
    cert: CurvatureEstimate<T>,
    cfg: &HdConfig<T>,
) -> Result<HfoResult<T>> {
    if !(cfg.reg > T::zero()) {
        return Err(contract("hessian descent requires M > 0"));
    }
    let (f_x, grad) = oracle.full_value_grad(x)?;
    let alpha = cert.rayleigh.abs() / cfg.reg;
    let sign = if dot(&cert.direction, &grad) < T::zero() {
        -T::one()
    } else {
        T::one() // sign(0) := +1
    };
    let step = alpha * sign;
    let u: Vec<T> = x
        .iter()
        .zip(cert.direction.iter())
        .map(|(xi, vi)| *xi - step * *vi)
        .collect();
    let f_u = oracle.full_value_grad(&u)?.0;
    // Ties keep the input point.
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
        certificate: Some(cert),
        moved,
    })
}

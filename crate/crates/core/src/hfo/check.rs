//! Probabilistic second-order criticality check.
//!
//! A point passes when its full gradient norm is at most `eps` and the
//! certified curvature estimate is at least `-gamma/2`. Because the
//! estimator promises `rayleigh <= lambda_min + gamma/2` with probability
//! `rho`, a Rayleigh quotient above `-gamma/2` certifies
//! `lambda_min >= -gamma` at confidence `rho` (failure probability
//! `q = 1 - rho`), matching the halting contract. The gradient test runs
//! first so no curvature work is spent on far-from-critical points.

use crate::error::Result;
use crate::linalg::norm2;
use crate::oracle::CountedOracle;
use crate::scalar::{real, Scalar};

use super::{min_eig_vector, CurvatureEstimate, MinEigSettings};

#[derive(Debug, Clone)]
pub struct CheckOutcome<T> {
    pub is_critical: bool,
    pub grad_norm: T,
    pub certificate: Option<CurvatureEstimate<T>>,
}

pub fn check_second_order_critical<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x: &[T],
    eps: T,
    gamma: T,
    rho: T,
    seed: u64,
    settings: &MinEigSettings<T>,
) -> Result<CheckOutcome<T>> {
    let (_, grad) = oracle.full_value_grad(x)?;
    let grad_norm = norm2(&grad);
    if grad_norm > eps {
        return Ok(CheckOutcome {
            is_critical: false,
            grad_norm,
            certificate: None,
        });
    }
    let cert = min_eig_vector(oracle, x, gamma, rho, seed, settings)?;
    let is_critical = cert.rayleigh >= -gamma * real::<T>(0.5);
    Ok(CheckOutcome {
        is_critical,
        grad_norm,
        certificate: Some(cert),
    })
}

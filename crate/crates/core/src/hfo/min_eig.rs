//! Matrix-free smallest-eigenvector estimation by shifted power iteration.
//!
//! To approach the bottom of the spectrum of `H = hess f(x)` with Hessian-
//! vector products only, iterate on `B = c I - H` with a shift `c` above the
//! top of the spectrum: the dominant eigenvector of `B` is the bottom
//! eigenvector of `H`. The returned direction `v` targets
//! `v . Hv <= lambda_min(H) + gamma/2` with probability at least `rho`,
//! using `ceil(ln(1/(1-rho)))` independently seeded restarts and keeping the
//! best Rayleigh quotient.
//!
//! The shift is estimated on the fly: a short plain power iteration first
//! locates the top of the spectrum, and `c` is set a safe margin above it.
//! Shifting by the gradient-Lipschitz constant `L` would also make `B` PSD,
//! but when `L` far exceeds the local spectral radius (conservative box
//! constants) the shifted gap collapses and convergence stalls; the
//! adaptive shift keeps the per-iteration contraction meaningful. The
//! `L`-based theoretical budget `ceil((8/gamma) c ln(9 d e))` still caps the
//! iteration count, and a restart that hits the cap degrades the reported
//! confidence instead of failing.

use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Result};
use crate::linalg::{dot, normalize};
use crate::oracle::CountedOracle;
use crate::rng::{labels, random_unit_vector, stream_rng};
use crate::scalar::{real, Scalar};

use super::CurvatureEstimate;

#[derive(Debug, Clone)]
pub struct MinEigSettings<T> {
    /// Reuse a previously estimated shift instead of re-estimating the top
    /// of the spectrum (saves HVPs when the Hessian changes slowly along a
    /// run). The shift is still validated against the restart iterations.
    pub shift_hint: Option<T>,
    /// Hard cap multiplier safeguard on iterations per restart.
    pub max_iters_cap: u64,
}

impl<T: Scalar> Default for MinEigSettings<T> {
    fn default() -> Self {
        MinEigSettings {
            shift_hint: None,
            max_iters_cap: 50_000,
        }
    }
}

/// Estimate the smallest-curvature direction of the Hessian at `x`.
/// Every HVP is a full-batch product costing `n` ISO calls.
pub fn min_eig_vector<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x: &[T],
    gamma: T,
    rho: T,
    seed: u64,
    settings: &MinEigSettings<T>,
) -> Result<CurvatureEstimate<T>> {
    if !(gamma > T::zero()) {
        return Err(contract("min_eig_vector requires gamma > 0"));
    }
    if !(rho > T::zero()) || !(rho < T::one()) {
        return Err(contract("min_eig_vector requires 0 < rho < 1"));
    }
    let d = oracle.dim();
    let mut rng: ChaCha8Rng = stream_rng(seed, labels::POWER_START);
    let mut hvp_calls: u64 = 0;

    // Phase 1: shift above the top of the spectrum.
    let shift = match settings.shift_hint {
        Some(c) => c,
        None => {
            let mut w = random_unit_vector::<T>(&mut rng, d);
            let mut top = T::zero();
            let mut prev = T::infinity();
            for k in 0..40u64 {
                let mut hw = oracle.full_hvp(x, &w)?;
                hvp_calls += 1;
                let rq = dot(&w, &hw);
                top = if k == 0 { rq } else { top.max(rq) };
                let nn = normalize(&mut hw);
                if nn == T::zero() {
                    break; // zero Hessian: any shift works
                }
                w = hw;
                if k >= 5 && (rq - prev).abs() <= real::<T>(1e-3) * rq.abs().max(real(1e-6)) {
                    break;
                }
                prev = rq;
            }
            top + real::<T>(0.5) * top.abs() + gamma + real(1e-6)
        }
    };

    // Theoretical per-restart budget, capped for safety.
    let cap_formula = (real::<T>(8.0) / gamma)
        * shift.abs().max(T::one())
        * real::<T>((9.0 * d as f64 * std::f64::consts::E).ln());
    let max_iters = (cap_formula.to_f64().unwrap_or(f64::MAX).ceil() as u64)
        .clamp(8, settings.max_iters_cap);

    let restarts = ((1.0 / (1.0 - rho.to_f64().unwrap())).ln().ceil() as u64).max(1);
    // Stall detection: stop a restart once the Rayleigh quotient has moved
    // by less than a small fraction of the target accuracy for several
    // consecutive iterations.
    let stall_tol = gamma * real::<T>(1.0 / 256.0);
    let stall_patience = 8u32;

    let mut best_v: Option<Vec<T>> = None;
    let mut best_rq = T::infinity();
    let mut converged = true;
    for _r in 0..restarts {
        let mut v = random_unit_vector::<T>(&mut rng, d);
        let mut prev_rq = T::infinity();
        let mut stalled: u32 = 0;
        let mut finished = false;
        let mut rq = T::infinity();
        for _k in 0..max_iters {
            let hv = oracle.full_hvp(x, &v)?;
            hvp_calls += 1;
            rq = dot(&v, &hv);
            if prev_rq.is_finite() && (rq - prev_rq).abs() <= stall_tol {
                stalled += 1;
                if stalled >= stall_patience {
                    finished = true;
                    break;
                }
            } else {
                stalled = 0;
            }
            prev_rq = rq;
            // b = shift * v - hv, normalized.
            let mut b: Vec<T> = v
                .iter()
                .zip(hv.iter())
                .map(|(vi, hvi)| shift * *vi - *hvi)
                .collect();
            if normalize(&mut b) == T::zero() {
                finished = true;
                break; // v is an exact eigenvector of H with eigenvalue = shift
            }
            v = b;
        }
        if !finished {
            converged = false;
        }
        if rq < best_rq {
            best_rq = rq;
            best_v = Some(v);
        }
    }

    let mut v = best_v.expect("at least one restart ran");
    normalize(&mut v);
    // Fresh certification product; the reported Rayleigh quotient always
    // comes from this final HVP.
    let hv = oracle.full_hvp(x, &v)?;
    hvp_calls += 1;
    let rayleigh = dot(&v, &hv);

    let confidence = if converged { rho } else { rho * real(0.5) };
    Ok(CurvatureEstimate {
        direction: v,
        rayleigh,
        hvp_calls,
        confidence,
        converged,
        shift,
    })
}

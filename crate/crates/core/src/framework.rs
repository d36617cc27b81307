//! Outer driver alternating a gradient-focused and a Hessian-focused
//! subroutine.
//!
//! Each outer iteration runs the gradient-focused optimizer from the
//! current point, hands either its sampled iterate `y` (with probability
//! `p`) or its final iterate `z` to the criticality check, and halts with
//! the checked point if it certifies; otherwise the Hessian-focused
//! optimizer produces the next point. On a full run without halting the
//! output set is the sequence of sampled iterates `y^1..y^T`, from which
//! `k` indices are drawn uniformly with replacement.
//!
//! Performing the check before the Hessian-focused call (rather than after
//! it) is behavior-equivalent and saves one curvature invocation on the
//! halting iteration; the check's certificate is reused by the
//! negative-curvature step when one follows at the same point.

use rand::Rng;

use crate::error::{contract, Result};
use crate::gfo::GfoChoice;
use crate::hfo::{check_second_order_critical, HfoChoice, MinEigSettings};
use crate::linalg::norm2;
use crate::oracle::{CountedOracle, OracleCounters};
use crate::rng::{labels, stream_rng};
use crate::scalar::{real, real_usize, Scalar};
use crate::trace::{Phase, TraceRow};

/// Oracle-budget limits enforced between subroutine invocations; a run can
/// overshoot by at most one invocation's worth of calls.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub max_ifo: Option<u64>,
    pub max_iso: Option<u64>,
    pub max_wall_nanos: Option<u64>,
}

impl Budget {
    pub fn exceeded(&self, c: &OracleCounters) -> bool {
        self.max_ifo.is_some_and(|m| c.ifo_calls >= m)
            || self.max_iso.is_some_and(|m| c.iso_calls >= m)
            || self.max_wall_nanos.is_some_and(|m| c.wall_nanos >= m)
    }
}

#[derive(Debug, Clone)]
pub struct MixConfig<T> {
    /// Outer iteration budget `T`.
    pub outer_iters: u64,
    pub eps: T,
    /// Curvature threshold; the conventional coupling is `gamma = sqrt(eps)`.
    pub gamma: T,
    /// Mixing probability; `None` resolves to the optimal-rate formula.
    pub p: Option<T>,
    /// Estimator confidence used by checks and curvature steps.
    pub rho: T,
    pub seed: u64,
    /// Output samples drawn from the output set.
    pub k_samples: usize,
    pub gfo: GfoChoice<T>,
    pub hfo: HfoChoice<T>,
    pub budget: Budget,
}

impl<T: Scalar> MixConfig<T> {
    pub fn resolve_p(&self, oracle: &CountedOracle<'_, T>) -> T {
        match self.p {
            Some(p) => p,
            None => {
                let spec = oracle.spec();
                default_p(
                    spec.num_components,
                    self.eps,
                    self.gamma,
                    spec.lipschitz_grad,
                    self.hfo.reg_constant(),
                    self.rho,
                    self.gfo.nominal_inner_iters(),
                )
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct MixRunResult<T> {
    /// `{u}` on early halt, else the sampled iterates `y^1..y^T`.
    pub output_set: Vec<Vec<T>>,
    pub halted_early: bool,
    /// Uniform with-replacement draws from `output_set`.
    pub samples: Vec<(usize, Vec<T>)>,
    /// The halted point when halted, else the last Hessian-focused output.
    pub final_x: Vec<T>,
    pub f_final: T,
    pub outer_completed: u64,
    pub budget_exhausted: bool,
    pub trace: Vec<TraceRow<T>>,
    pub counters: OracleCounters,
}

/// `g(n, eps) = T_g / (40 L n^(2/3))`: the gradient-progress rate constant
/// of the variance-reduced method.
pub fn gfo_rate<T: Scalar>(n: usize, lipschitz_grad: T, inner_iters: u64) -> T {
    let n23 = real_usize::<T>(n).powf(real(2.0 / 3.0));
    T::from_u64(inner_iters).expect("iteration count fits scalar")
        / (real::<T>(40.0) * lipschitz_grad * n23)
}

/// `h(n, eps, gamma) = rho gamma^3 / (24 M^2)`: the guaranteed decrease of
/// the negative-curvature step.
pub fn hfo_rate<T: Scalar>(gamma: T, reg: T, rho: T) -> T {
    rho * gamma * gamma * gamma / (real::<T>(24.0) * reg * reg)
}

/// Harmonic combination `1/p = 1/eg + 1/h`, clamped away from {0, 1}.
pub fn mixing_weight<T: Scalar>(eps_sq_g: T, h: T) -> T {
    let p = T::one() / (T::one() / eps_sq_g + T::one() / h);
    p.max(real(1e-6)).min(T::one() - real(1e-6))
}

/// Optimal-rate mixing probability
/// `1/p = 1/(eps^2 g(n,eps)) + 1/h(n,eps,gamma)`.
pub fn default_p<T: Scalar>(
    n: usize,
    eps: T,
    gamma: T,
    lipschitz_grad: T,
    reg: T,
    rho: T,
    inner_iters: u64,
) -> T {
    let g = gfo_rate(n, lipschitz_grad, inner_iters);
    let h = hfo_rate(gamma, reg, rho);
    mixing_weight(eps * eps * g, h)
}

/// Per-iteration progress floor `theta = min((1-p) eps^2 g, p h)`.
pub fn theta<T: Scalar>(p: T, eps: T, g_val: T, h_val: T) -> T {
    ((T::one() - p) * eps * eps * g_val).min(p * h_val)
}

/// Iteration floor `T > delta / theta` for the output-set guarantee.
pub fn suggested_outer_iters<T: Scalar>(delta: T, theta_val: T) -> u64 {
    let ratio = (delta / theta_val).to_f64().unwrap_or(f64::MAX);
    ratio.max(0.0).floor() as u64 + 1
}

/// Recommended output-sample count
/// `k = ceil(ln(1/zeta) / min(ln(T theta / delta), ln(1/q)))`, reading the
/// logs as magnitudes of the per-sample failure probability
/// `max(delta/(T theta), q)`; at least 1. Requires `T theta > delta`.
pub fn recommended_k<T: Scalar>(delta: T, outer_iters: u64, theta_val: T, q: T, zeta: T) -> Result<usize> {
    let t_theta = T::from_u64(outer_iters).expect("fits") * theta_val;
    if !(t_theta > delta) {
        return Err(contract(
            "recommended_k requires T * theta > delta (increase the outer budget)",
        ));
    }
    let log_a = (t_theta / delta).ln();
    let log_b = if q <= T::zero() {
        T::infinity()
    } else {
        (T::one() / q).ln()
    };
    let denom = log_a.min(log_b);
    let k = ((T::one() / zeta).ln() / denom).ceil();
    Ok(k.to_f64().unwrap_or(1.0).max(1.0) as usize)
}

/// `k` uniform with-replacement draws over the output set.
pub fn sample_outputs<T: Scalar>(
    output_set: &[Vec<T>],
    k: usize,
    seed: u64,
) -> Result<Vec<(usize, Vec<T>)>> {
    if output_set.is_empty() {
        return Err(contract("cannot sample from an empty output set"));
    }
    if k == 0 {
        return Err(contract("sample count must be at least 1"));
    }
    let mut rng = stream_rng(seed, labels::OUTPUT_SAMPLING);
    Ok((0..k)
        .map(|_| {
            let i = rng.gen_range(0..output_set.len());
            (i, output_set[i].clone())
        })
        .collect())
}

pub fn mix_run<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x0: &[T],
    cfg: &MixConfig<T>,
) -> Result<MixRunResult<T>> {
    if cfg.outer_iters == 0 {
        return Err(contract("outer iteration budget must be positive"));
    }
    if !(cfg.eps > T::zero()) || !(cfg.gamma > T::zero()) {
        return Err(contract("eps and gamma must be positive"));
    }
    let p = cfg.resolve_p(oracle);
    if p < T::zero() || p > T::one() {
        return Err(contract("mixing probability must lie in [0, 1]"));
    }
    let mut bern_rng = stream_rng(cfg.seed, labels::BERNOULLI);
    let p64 = p.to_f64().expect("p fits f64");

    let mut x = x0.to_vec();
    let mut sampled_iterates: Vec<Vec<T>> = Vec::new();
    let mut trace: Vec<TraceRow<T>> = Vec::new();
    let mut halted_early = false;
    let mut budget_exhausted = false;
    let mut outer_completed = 0u64;
    let mut final_x = x0.to_vec();
    let mut min_eig_settings = MinEigSettings::default();
    let mut hfo = cfg.hfo.clone();

    'outer: for t in 1..=cfg.outer_iters {
        if cfg.budget.exceeded(&oracle.counters()) {
            budget_exhausted = true;
            break 'outer;
        }
        let gfo_res = cfg.gfo.run(oracle, &x, cfg.seed ^ (labels::GFO_BASE + t))?;
        for pt in &gfo_res.trace {
            trace.push(TraceRow::new(
                t,
                pt.inner,
                pt.counters,
                pt.f,
                pt.grad_norm.unwrap_or(T::nan()),
                None,
                Phase::Gfo,
            ));
        }
        let take_y = bern_rng.gen_bool(p64);
        let (u, f_u) = if take_y {
            (gfo_res.y.clone(), gfo_res.f_y)
        } else {
            (gfo_res.z.clone(), gfo_res.f_z)
        };
        sampled_iterates.push(gfo_res.y);
        final_x = u.clone();

        if cfg.budget.exceeded(&oracle.counters()) {
            budget_exhausted = true;
            outer_completed = t;
            break 'outer;
        }
        let check = check_second_order_critical(
            oracle,
            &u,
            cfg.eps,
            cfg.gamma,
            cfg.rho,
            cfg.seed ^ (labels::CHECK_BASE + t),
            &min_eig_settings,
        )?;
        trace.push(TraceRow::new(
            t,
            0,
            oracle.counters(),
            f_u,
            check.grad_norm,
            check.certificate.as_ref().map(|c| c.rayleigh),
            Phase::Check,
        ));
        if check.is_critical {
            halted_early = true;
            outer_completed = t;
            break 'outer;
        }

        if cfg.budget.exceeded(&oracle.counters()) {
            budget_exhausted = true;
            outer_completed = t;
            break 'outer;
        }
        let hfo_res = hfo.step(
            oracle,
            &u,
            cfg.gamma,
            cfg.seed ^ (labels::HFO_BASE + t),
            check.certificate.as_ref(),
        )?;
        // Reuse the estimated spectral shift across outer iterations; the
        // Hessian drifts slowly along one run.
        if min_eig_settings.shift_hint.is_none() {
            if let Some(cert) = check
                .certificate
                .as_ref()
                .or(hfo_res.certificate.as_ref())
            {
                min_eig_settings.shift_hint = Some(cert.shift);
            }
        }
        let grad_probe = norm2(&oracle.probe_value_grad(&hfo_res.y).1);
        trace.push(TraceRow::new(
            t,
            0,
            oracle.counters(),
            hfo_res.f_y,
            grad_probe,
            hfo_res.certificate.as_ref().map(|c| c.rayleigh),
            Phase::Hfo,
        ));
        x = hfo_res.y.clone();
        final_x = hfo_res.y;
        outer_completed = t;
    }

    let output_set = if halted_early {
        vec![final_x.clone()]
    } else {
        if sampled_iterates.is_empty() {
            sampled_iterates.push(final_x.clone());
        }
        sampled_iterates
    };
    let k = cfg.k_samples.max(1);
    let samples = sample_outputs(&output_set, k, cfg.seed)?;
    let f_final = oracle.probe_value(&final_x);
    Ok(MixRunResult {
        output_set,
        halted_early,
        samples,
        final_x,
        f_final,
        outer_completed,
        budget_exhausted,
        trace,
        counters: oracle.counters(),
    })
}

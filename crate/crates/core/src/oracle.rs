//! Finite-sum problem abstraction and oracle call accounting.
//!
//! A problem is `f(x) = (1/n) sum_i f_i(x)`. Optimizers only touch it
//! through two incremental oracles:
//!
//! * IFO: `(i, x) -> (f_i(x), grad f_i(x))`, cost one `ifo_calls` unit;
//! * ISO: `(i, x, v) -> hess f_i(x) * v`, cost one `iso_calls` unit.
//!
//! A full-batch gradient therefore costs exactly `n` IFO calls and a
//! full-batch Hessian-vector product exactly `n` ISO calls. Batch sums run
//! in ascending component order so repeated runs are bitwise identical.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use crate::error::{contract, OptError, Result};
use crate::linalg::{all_finite, axpy, dot, norm2, sub};
use crate::scalar::{real, real_usize, Scalar};

/// Static description of a finite-sum problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec<T> {
    /// Number of summands `n`.
    pub num_components: usize,
    /// Ambient dimension `d`.
    pub dim: usize,
    /// Gradient Lipschitz constant `L` of every component.
    pub lipschitz_grad: T,
    /// Hessian Lipschitz constant `M` of the mean function.
    pub lipschitz_hess: T,
    /// Optional known lower bound on `f`, for budget diagnostics.
    pub lower_bound_hint: Option<T>,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.num_components == 0 || self.dim == 0 {
            return Err(contract("problem requires n >= 1 and d >= 1"));
        }
        if !(self.lipschitz_grad > T::zero()) || !(self.lipschitz_hess > T::zero()) {
            return Err(contract("problem requires L > 0 and M > 0"));
        }
        Ok(())
    }
}

/// A finite-sum objective with analytic component oracles.
///
/// Implementations must be pure: outputs depend only on `(i, x)` or
/// `(i, x, v)`. Counting is layered on top by [`CountedOracle`].
pub trait Objective<T: Scalar>: Send + Sync {
    fn spec(&self) -> ProblemSpec<T>;

    /// Writes `grad f_i(x)` into `grad` and returns `f_i(x)`.
    fn component_value_grad(&self, i: usize, x: &[T], grad: &mut [T]) -> T;

    /// Writes `hess f_i(x) * v` into `out`.
    fn component_hvp(&self, i: usize, x: &[T], v: &[T], out: &mut [T]);
}

/// Snapshot of the running cost tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OracleCounters {
    pub ifo_calls: u64,
    pub iso_calls: u64,
    /// Elapsed wall time of the owning context. This is a measurement, not
    /// part of the deterministic run state.
    pub wall_nanos: u64,
}

/// Per-run mutable counter context. Increments are atomic so oracle
/// evaluations may be issued from several threads of one run.
#[derive(Debug)]
pub struct CounterContext {
    ifo: AtomicU64,
    iso: AtomicU64,
    started: Instant,
}

impl Default for CounterContext {
    fn default() -> Self {
        Self::new()
    }
}

impl CounterContext {
    pub fn new() -> Self {
        CounterContext {
            ifo: AtomicU64::new(0),
            iso: AtomicU64::new(0),
            started: Instant::now(),
        }
    }

    #[inline]
    pub fn add_ifo(&self, k: u64) {
        self.ifo.fetch_add(k, Ordering::Relaxed);
    }

    #[inline]
    pub fn add_iso(&self, k: u64) {
        self.iso.fetch_add(k, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> OracleCounters {
        OracleCounters {
            ifo_calls: self.ifo.load(Ordering::Relaxed),
            iso_calls: self.iso.load(Ordering::Relaxed),
            wall_nanos: self.started.elapsed().as_nanos() as u64,
        }
    }
}

/// An objective bound to a counter context: the only view optimizers get.
pub struct CountedOracle<'a, T: Scalar> {
    objective: &'a dyn Objective<T>,
    ctx: &'a CounterContext,
    spec: ProblemSpec<T>,
    /// Set once an iterate with non-finite components is observed.
    numeric_flag: AtomicBool,
}

impl<'a, T: Scalar> CountedOracle<'a, T> {
    pub fn new(objective: &'a dyn Objective<T>, ctx: &'a CounterContext) -> Self {
        let spec = objective.spec();
        CountedOracle {
            objective,
            ctx,
            spec,
            numeric_flag: AtomicBool::new(false),
        }
    }

    pub fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    pub fn num_components(&self) -> usize {
        self.spec.num_components
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn counters(&self) -> OracleCounters {
        self.ctx.snapshot()
    }

    pub fn context(&self) -> &CounterContext {
        self.ctx
    }

    fn check_point(&self, x: &[T], what: &str) -> Result<()> {
        if x.len() != self.spec.dim {
            return Err(contract(format!(
                "{what} has length {}, problem dimension is {}",
                x.len(),
                self.spec.dim
            )));
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.spec.num_components {
            return Err(contract(format!(
                "component index {i} out of range (n = {})",
                self.spec.num_components
            )));
        }
        Ok(())
    }

    /// One IFO call: `(f_i(x), grad f_i(x))`, gradient written into `grad`.
    pub fn ifo_into(&self, i: usize, x: &[T], grad: &mut [T]) -> Result<T> {
        self.check_index(i)?;
        self.check_point(x, "point")?;
        let v = self.objective.component_value_grad(i, x, grad);
        self.ctx.add_ifo(1);
        if !v.is_finite() || !all_finite(grad) {
            return Err(OptError::NonFiniteOracle { index: i });
        }
        Ok(v)
    }

    pub fn ifo(&self, i: usize, x: &[T]) -> Result<(T, Vec<T>)> {
        let mut grad = vec![T::zero(); self.spec.dim];
        let v = self.ifo_into(i, x, &mut grad)?;
        Ok((v, grad))
    }

    /// One ISO call: `hess f_i(x) * v` written into `out`.
    pub fn iso_into(&self, i: usize, x: &[T], v: &[T], out: &mut [T]) -> Result<()> {
        self.check_index(i)?;
        self.check_point(x, "point")?;
        self.check_point(v, "direction")?;
        self.objective.component_hvp(i, x, v, out);
        self.ctx.add_iso(1);
        if !all_finite(out) {
            return Err(OptError::NonFiniteOracle { index: i });
        }
        Ok(())
    }

    pub fn iso(&self, i: usize, x: &[T], v: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.spec.dim];
        self.iso_into(i, x, v, &mut out)?;
        Ok(out)
    }

    /// Full-batch value and gradient: costs exactly `n` IFO calls.
    pub fn full_value_grad(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        self.check_point(x, "point")?;
        let n = self.spec.num_components;
        let d = self.spec.dim;
        let mut acc_grad = vec![T::zero(); d];
        let mut buf = vec![T::zero(); d];
        let mut acc_val = T::zero();
        for i in 0..n {
            let v = self.ifo_into(i, x, &mut buf)?;
            acc_val = acc_val + v;
            axpy(T::one(), &buf, &mut acc_grad);
        }
        let inv_n = T::one() / real_usize::<T>(n);
        acc_val = acc_val * inv_n;
        for g in acc_grad.iter_mut() {
            *g *= inv_n;
        }
        Ok((acc_val, acc_grad))
    }

    /// Full-batch Hessian-vector product: costs exactly `n` ISO calls.
    pub fn full_hvp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        self.check_point(x, "point")?;
        self.check_point(v, "direction")?;
        let n = self.spec.num_components;
        let d = self.spec.dim;
        let mut acc = vec![T::zero(); d];
        let mut buf = vec![T::zero(); d];
        for i in 0..n {
            self.iso_into(i, x, v, &mut buf)?;
            axpy(T::one(), &buf, &mut acc);
        }
        let inv_n = T::one() / real_usize::<T>(n);
        for a in acc.iter_mut() {
            *a *= inv_n;
        }
        Ok(acc)
    }

    /// Default central-difference step for [`Self::check_hvp`].
    pub fn default_fd_step(&self, x: &[T], v: &[T]) -> T {
        let nx = norm2(x).max(T::one());
        let nv = norm2(v);
        real::<T>(1e-5) * nx / nv
    }

    /// Relative error between the analytic full HVP and a central finite
    /// difference of the full gradient:
    /// `|| hvp - (grad(x+hv) - grad(x-hv)) / 2h || / max(1, ||fd||)`.
    pub fn check_hvp(&self, x: &[T], v: &[T], h: T) -> Result<T> {
        if !(h > T::zero()) {
            return Err(contract("check_hvp requires h > 0"));
        }
        if norm2(v) == T::zero() {
            return Err(contract("check_hvp requires a nonzero direction"));
        }
        let hvp = self.full_hvp(x, v)?;
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        axpy(h, v, &mut xp);
        axpy(-h, v, &mut xm);
        let (_, gp) = self.full_value_grad(&xp)?;
        let (_, gm) = self.full_value_grad(&xm)?;
        let fd: Vec<T> = gp
            .iter()
            .zip(gm.iter())
            .map(|(a, b)| (*a - *b) / (real::<T>(2.0) * h))
            .collect();
        let diff = sub(&hvp, &fd);
        Ok(norm2(&diff) / norm2(&fd).max(T::one()))
    }

    /// Diagnostic value of `f(x)` that does not touch the counters.
    ///
    /// Trace rows and result summaries report `f` without charging oracle
    /// cost; the documented per-operation accounting (e.g. an SVRG run
    /// consuming exactly `S*n + 2*T_g` IFO calls) holds because of this.
    pub fn probe_value(&self, x: &[T]) -> T {
        let n = self.spec.num_components;
        let mut buf = vec![T::zero(); self.spec.dim];
        let mut acc = T::zero();
        for i in 0..n {
            acc = acc + self.objective.component_value_grad(i, x, &mut buf);
        }
        acc / real_usize::<T>(n)
    }

    /// Diagnostic `(f(x), grad f(x))` without counter cost. See
    /// [`Self::probe_value`].
    pub fn probe_value_grad(&self, x: &[T]) -> (T, Vec<T>) {
        let n = self.spec.num_components;
        let d = self.spec.dim;
        let mut acc_grad = vec![T::zero(); d];
        let mut buf = vec![T::zero(); d];
        let mut acc = T::zero();
        for i in 0..n {
            acc = acc + self.objective.component_value_grad(i, x, &mut buf);
            axpy(T::one(), &buf, &mut acc_grad);
        }
        let inv_n = T::one() / real_usize::<T>(n);
        for g in acc_grad.iter_mut() {
            *g *= inv_n;
        }
        (acc * inv_n, acc_grad)
    }

    pub fn flag_non_finite(&self) {
        self.numeric_flag.store(true, Ordering::Relaxed);
    }

    pub fn saw_non_finite(&self) -> bool {
        self.numeric_flag.load(Ordering::Relaxed)
    }

    /// Guard used by optimizer loops after each iterate update.
    pub fn ensure_finite_iterate(
        &self,
        x: &[T],
        iteration: u64,
        context: &'static str,
    ) -> Result<()> {
        if all_finite(x) {
            Ok(())
        } else {
            self.flag_non_finite();
            Err(OptError::NonFiniteIterate { iteration, context })
        }
    }
}

/// Adaptor substituting effective smoothness constants for a problem's
/// recorded ones. Benchmark configurations use this when the conservative
/// box constants of a problem make the textbook step-size formulas
/// impractically small; the substitution is echoed into run artifacts.
pub struct WithConstants<'a, T: Scalar> {
    inner: &'a dyn Objective<T>,
    lipschitz_grad: T,
    lipschitz_hess: T,
}

impl<'a, T: Scalar> WithConstants<'a, T> {
    pub fn new(inner: &'a dyn Objective<T>, l: T, m: T) -> Self {
        WithConstants {
            inner,
            lipschitz_grad: l,
            lipschitz_hess: m,
        }
    }
}

impl<'a, T: Scalar> Objective<T> for WithConstants<'a, T> {
    fn spec(&self) -> ProblemSpec<T> {
        let mut s = self.inner.spec();
        s.lipschitz_grad = self.lipschitz_grad;
        s.lipschitz_hess = self.lipschitz_hess;
        s
    }

    fn component_value_grad(&self, i: usize, x: &[T], grad: &mut [T]) -> T {
        self.inner.component_value_grad(i, x, grad)
    }

    fn component_hvp(&self, i: usize, x: &[T], v: &[T], out: &mut [T]) {
        self.inner.component_hvp(i, x, v, out)
    }
}

/// Mean gradient over an explicit index set, ascending order, used by
/// minibatch methods. Costs `indices.len()` IFO calls.
pub fn batch_mean_grad<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    indices: &[usize],
    x: &[T],
) -> Result<Vec<T>> {
    let d = oracle.dim();
    let mut acc = vec![T::zero(); d];
    let mut buf = vec![T::zero(); d];
    for &i in indices {
        oracle.ifo_into(i, x, &mut buf)?;
        axpy(T::one(), &buf, &mut acc);
    }
    let inv = T::one() / real_usize::<T>(indices.len());
    for a in acc.iter_mut() {
        *a *= inv;
    }
    Ok(acc)
}

/// Mean HVP over an explicit index set. Costs `indices.len()` ISO calls.
pub fn batch_mean_hvp<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    indices: &[usize],
    x: &[T],
    v: &[T],
) -> Result<Vec<T>> {
    let d = oracle.dim();
    let mut acc = vec![T::zero(); d];
    let mut buf = vec![T::zero(); d];
    for &i in indices {
        oracle.iso_into(i, x, v, &mut buf)?;
        axpy(T::one(), &buf, &mut acc);
    }
    let inv = T::one() / real_usize::<T>(indices.len());
    for a in acc.iter_mut() {
        *a *= inv;
    }
    Ok(acc)
}

//! Small analytic test problems with exact smoothness constants.

use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Result};
use crate::linalg::DenseMat;
use crate::oracle::{Objective, ProblemSpec};
use crate::rng::{stream_rng, uniform};
use crate::scalar::{real, Scalar};

/// Separable convex quadratic stored as `f_i(x) = (1 + jitter_i) * sum_j
/// lambda_j x_j^2 + c_i . x` with `sum_i c_i = 0` and `sum_i jitter_i = 0`,
/// so the mean function is exactly `sum_j lambda_j x_j^2`.
///
/// The zero-sum perturbations give the components genuine variance for
/// stochastic-method tests while leaving the mean landscape and its
/// minimizer untouched. `L = 2 max_j lambda_j * (1 + max_i jitter_i)` is
/// exact; the Hessian is constant so any positive recorded `M` is valid.
pub struct SeparableQuadratic<T> {
    lambdas: Vec<T>,
    linear: Vec<Vec<T>>,
    jitter: Vec<T>,
    num_components: usize,
    lipschitz_hess: T,
}

impl<T: Scalar> SeparableQuadratic<T> {
    /// All components identical (no linear terms, no jitter).
    pub fn uniform_components(lambdas: Vec<T>, num_components: usize) -> Self {
        SeparableQuadratic {
            linear: Vec::new(),
            jitter: Vec::new(),
            lambdas,
            num_components,
            lipschitz_hess: T::one(),
        }
    }

    /// Components with seeded zero-sum linear terms of scale `c_scale` and
    /// zero-sum spectrum jitter of scale `jitter_scale` (both may be 0).
    pub fn with_noise(
        lambdas: Vec<T>,
        num_components: usize,
        seed: u64,
        c_scale: f64,
        jitter_scale: f64,
    ) -> Result<Self> {
        if num_components < 1 {
            return Err(contract("quadratic requires n >= 1"));
        }
        if jitter_scale >= 1.0 || jitter_scale < 0.0 {
            return Err(contract("jitter_scale must lie in [0, 1)"));
        }
        let d = lambdas.len();
        let mut rng: ChaCha8Rng = stream_rng(seed, 40);
        let linear = zero_sum_vectors(&mut rng, num_components, d, c_scale);
        let jitter = if jitter_scale > 0.0 && num_components > 1 {
            let js = zero_sum_vectors(&mut rng, num_components, 1, jitter_scale);
            js.into_iter().map(|v| v[0]).collect()
        } else {
            Vec::new()
        };
        Ok(SeparableQuadratic {
            lambdas,
            linear,
            jitter,
            num_components,
            lipschitz_hess: T::one(),
        })
    }

    pub fn set_hessian_constant(&mut self, m: T) {
        self.lipschitz_hess = m;
    }

    fn jitter_factor(&self, i: usize) -> T {
        if self.jitter.is_empty() {
            T::one()
        } else {
            T::one() + self.jitter[i]
        }
    }
}

/// `count` vectors of dimension `d` with entries uniform in
/// `[-scale, scale]`, the last one balancing the sum to exactly zero.
fn zero_sum_vectors<T: Scalar>(
    rng: &mut ChaCha8Rng,
    count: usize,
    d: usize,
    scale: f64,
) -> Vec<Vec<T>> {
    if scale == 0.0 || count == 0 {
        return Vec::new();
    }
    let mut out: Vec<Vec<T>> = Vec::with_capacity(count);
    let mut running = vec![T::zero(); d];
    for _ in 0..count.saturating_sub(1) {
        let v: Vec<T> = (0..d).map(|_| uniform(rng, -scale, scale)).collect();
        for (r, x) in running.iter_mut().zip(v.iter()) {
            *r += *x;
        }
        out.push(v);
    }
    out.push(running.iter().map(|r| -*r).collect());
    out
}

impl<T: Scalar> Objective<T> for SeparableQuadratic<T> {
    fn spec(&self) -> ProblemSpec<T> {
        let max_lambda = self
            .lambdas
            .iter()
            .fold(T::zero(), |acc, l| acc.max(l.abs()));
        let max_jitter = self
            .jitter
            .iter()
            .fold(T::zero(), |acc, j| acc.max(j.abs()));
        ProblemSpec {
            num_components: self.num_components,
            dim: self.lambdas.len(),
            lipschitz_grad: (real::<T>(2.0) * max_lambda * (T::one() + max_jitter))
                .max(real(1e-12)),
            lipschitz_hess: self.lipschitz_hess,
            lower_bound_hint: Some(T::zero()),
        }
    }

    fn component_value_grad(&self, i: usize, x: &[T], grad: &mut [T]) -> T {
        let w = self.jitter_factor(i);
        let two = real::<T>(2.0);
        let mut val = T::zero();
        for j in 0..x.len() {
            let lx = self.lambdas[j] * x[j];
            val = val + w * lx * x[j];
            grad[j] = two * w * lx;
        }
        if !self.linear.is_empty() {
            let c = &self.linear[i];
            for j in 0..x.len() {
                val = val + c[j] * x[j];
                grad[j] += c[j];
            }
        }
        val
    }

    fn component_hvp(&self, i: usize, _x: &[T], v: &[T], out: &mut [T]) {
        let w = self.jitter_factor(i);
        let two = real::<T>(2.0);
        for j in 0..v.len() {
            out[j] = two * w * self.lambdas[j] * v[j];
        }
    }
}

/// The two-dimensional saddle `f(x) = (x_1^2 - x_2^2) / 2`, wrapped as a
/// finite sum of `n` identical components. The Hessian is the constant
/// `diag(1, -1)`, so `L = 1`; the true Hessian-Lipschitz constant is 0,
/// which breaks curvature step rules, so a positive stand-in is recorded.
pub struct TwoDSaddle<T> {
    num_components: usize,
    lipschitz_hess: T,
}

impl<T: Scalar> TwoDSaddle<T> {
    pub fn new(num_components: usize) -> Self {
        TwoDSaddle {
            num_components,
            lipschitz_hess: T::one(),
        }
    }

    pub fn set_hessian_constant(&mut self, m: T) {
        self.lipschitz_hess = m;
    }
}

impl<T: Scalar> Objective<T> for TwoDSaddle<T> {
    fn spec(&self) -> ProblemSpec<T> {
        ProblemSpec {
            num_components: self.num_components,
            dim: 2,
            lipschitz_grad: T::one(),
            lipschitz_hess: self.lipschitz_hess,
            lower_bound_hint: None,
        }
    }

    fn component_value_grad(&self, _i: usize, x: &[T], grad: &mut [T]) -> T {
        grad[0] = x[0];
        grad[1] = -x[1];
        (x[0] * x[0] - x[1] * x[1]) / real(2.0)
    }

    fn component_hvp(&self, _i: usize, _x: &[T], v: &[T], out: &mut [T]) {
        out[0] = v[0];
        out[1] = -v[1];
    }
}

/// Separable quartic `f_i(x) = sum_j x_j^4`, identical components.
/// On the box `|x_j| <= R`: `L = 12 R^2`, `M = 24 R`.
pub struct SeparableQuartic<T> {
    dim: usize,
    num_components: usize,
    box_radius: T,
}

impl<T: Scalar> SeparableQuartic<T> {
    pub fn new(dim: usize, num_components: usize, box_radius: T) -> Self {
        SeparableQuartic {
            dim,
            num_components,
            box_radius,
        }
    }
}

impl<T: Scalar> Objective<T> for SeparableQuartic<T> {
    fn spec(&self) -> ProblemSpec<T> {
        let r = self.box_radius;
        ProblemSpec {
            num_components: self.num_components,
            dim: self.dim,
            lipschitz_grad: real::<T>(12.0) * r * r,
            lipschitz_hess: real::<T>(24.0) * r,
            lower_bound_hint: Some(T::zero()),
        }
    }

    fn component_value_grad(&self, _i: usize, x: &[T], grad: &mut [T]) -> T {
        let mut val = T::zero();
        for j in 0..x.len() {
            let x2 = x[j] * x[j];
            val = val + x2 * x2;
            grad[j] = real::<T>(4.0) * x2 * x[j];
        }
        val
    }

    fn component_hvp(&self, _i: usize, x: &[T], v: &[T], out: &mut [T]) {
        for j in 0..x.len() {
            out[j] = real::<T>(12.0) * x[j] * x[j] * v[j];
        }
    }
}

/// `f(x) = x^T H x / 2` for an explicit symmetric `H`, as a single-component
/// problem. Test fixture for curvature estimation against dense ground truth.
pub struct QuadraticForm<T> {
    h: DenseMat<T>,
    lipschitz_grad: T,
}

impl<T: Scalar> QuadraticForm<T> {
    pub fn new(h: DenseMat<T>, lipschitz_grad: T) -> Self {
        QuadraticForm { h, lipschitz_grad }
    }

    pub fn matrix(&self) -> &DenseMat<T> {
        &self.h
    }
}

impl<T: Scalar> Objective<T> for QuadraticForm<T> {
    fn spec(&self) -> ProblemSpec<T> {
        ProblemSpec {
            num_components: 1,
            dim: self.h.dim,
            lipschitz_grad: self.lipschitz_grad,
            lipschitz_hess: T::one(),
            lower_bound_hint: None,
        }
    }

    fn component_value_grad(&self, _i: usize, x: &[T], grad: &mut [T]) -> T {
        self.h.matvec_into(x, grad);
        crate::linalg::dot(x, grad) / real(2.0)
    }

    fn component_hvp(&self, _i: usize, _x: &[T], v: &[T], out: &mut [T]) {
        self.h.matvec_into(v, out);
    }
}

/// Constant objective: every gradient is zero. Degenerate fixture.
pub struct ConstantObjective {
    pub dim: usize,
    pub num_components: usize,
}

impl<T: Scalar> Objective<T> for ConstantObjective {
    fn spec(&self) -> ProblemSpec<T> {
        ProblemSpec {
            num_components: self.num_components,
            dim: self.dim,
            lipschitz_grad: T::one(),
            lipschitz_hess: T::one(),
            lower_bound_hint: Some(T::zero()),
        }
    }

    fn component_value_grad(&self, _i: usize, _x: &[T], grad: &mut [T]) -> T {
        for g in grad.iter_mut() {
            *g = T::zero();
        }
        T::zero()
    }

    fn component_hvp(&self, _i: usize, _x: &[T], _v: &[T], out: &mut [T]) {
        for o in out.iter_mut() {
            *o = T::zero();
        }
    }
}

/// The shipped toy catalogue, used by the validation command and tests.
pub fn toy_problems<T: Scalar>() -> Vec<(&'static str, Box<dyn Objective<T>>)> {
    let quad = SeparableQuadratic::with_noise(
        vec![T::one(); 8],
        16,
        9,
        0.1,
        0.0,
    )
    .expect("static toy construction");
    vec![
        ("quadratic", Box::new(quad)),
        ("saddle2d", Box::new(TwoDSaddle::new(4))),
        ("quartic", Box::new(SeparableQuartic::new(6, 8, T::one()))),
    ]
}

//! Seeded generator for the synthetic saddle benchmark family.
//!
//! `f_i(x) = x^T A_i x + b_i . x + sum_j x_j^10` with the `A_i` and `b_i`
//! drawn so that `sum_i b_i = 0` exactly and the Hessian of the mean
//! function at the origin has one prescribed negative eigenvalue and the
//! remaining eigenvalues inside a prescribed positive interval. The origin
//! is then an exactly critical non-degenerate saddle point.
//!
//! Construction: a seeded random orthogonal `Q` and targets
//! `(neg_eig, mu_2..mu_d)` with `mu_j` uniform in the positive range define
//! the mean matrix `Abar = Q diag(neg_eig/2, mu/2) Q^T` (the halving makes
//! the origin Hessian `2 Abar` hit the targets). Per-component matrices are
//! `A_i = Abar + R_i` with symmetric perturbations `R_i` (entries uniform in
//! [-0.1, 0.1]) balanced so `sum_i R_i = 0`, and `b_i` are zero-sum vectors
//! at scale 1e-3. The spectrum is re-verified numerically at construction
//! for `d <= 200`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};

use rand_chacha::ChaCha8Rng;

use crate::error::{contract, OptError, Result};
use crate::linalg::{norm_inf, orthonormalize_columns, DenseMat};
use crate::oracle::{Objective, ProblemSpec};
use crate::rng::{standard_normal, stream_rng, uniform};
use crate::scalar::{real, real_usize, Scalar};

/// Verified-spectrum tolerance on the origin Hessian eigenvalues.
const SPECTRUM_TOL: f64 = 1e-9;
/// Spectrum verification is skipped above this dimension.
const VERIFY_DIM_LIMIT: usize = 200;
/// Box radius on which the recorded L and M constants are valid.
const BOX_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticParams<T> {
    pub num_components: usize,
    pub dim: usize,
    pub seed: u64,
    pub neg_eig: T,
    pub pos_range: (T, T),
}

impl<T: Scalar> SyntheticParams<T> {
    pub fn desk_scale(seed: u64) -> Self {
        SyntheticParams {
            num_components: 1000,
            dim: 100,
            seed,
            neg_eig: real(-0.001),
            pos_range: (T::one(), real(2.0)),
        }
    }
}

pub struct SyntheticSaddle<T> {
    params: SyntheticParams<T>,
    /// `n` symmetric matrices, each `d*d` row-major, concatenated.
    a: Vec<T>,
    /// `n` vectors of length `d`, concatenated.
    b: Vec<T>,
    lipschitz_grad: T,
    lipschitz_hess: T,
    box_exceeded: AtomicBool,
}

impl<T: Scalar> SyntheticSaddle<T> {
    /// Seeded construction; retries with a derived internal seed up to 5
    /// times if the numerical spectrum check fails.
    pub fn generate(params: SyntheticParams<T>) -> Result<Self> {
        let SyntheticParams {
            num_components: n,
            dim: d,
            ..
        } = params;
        if n < 2 || d < 2 {
            return Err(contract("synthetic problem requires n >= 2 and d >= 2"));
        }
        if !(params.neg_eig < T::zero()) {
            return Err(contract("neg_eig must be negative"));
        }
        if !(params.pos_range.0 > T::zero()) || !(params.pos_range.1 > params.pos_range.0) {
            return Err(contract("pos_range must satisfy 0 < lo < hi"));
        }
        let mut last_err = None;
        for attempt in 0..5u64 {
            match Self::generate_once(params, attempt) {
                Ok(p) => return Ok(p),
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.unwrap_or_else(|| OptError::Construction("generation failed".into())))
    }

    fn generate_once(params: SyntheticParams<T>, attempt: u64) -> Result<Self> {
        let n = params.num_components;
        let d = params.dim;
        let mut rng: ChaCha8Rng = stream_rng(params.seed, 100 + attempt);

        // Random orthogonal basis from a Gaussian matrix.
        let mut q = DenseMat::zeros(d);
        for v in q.data.iter_mut() {
            *v = standard_normal(&mut rng);
        }
        orthonormalize_columns(&mut q)?;

        // Target spectrum of the origin Hessian 2*Abar.
        let mut targets = Vec::with_capacity(d);
        targets.push(params.neg_eig);
        let lo = params.pos_range.0.to_f64().unwrap();
        let hi = params.pos_range.1.to_f64().unwrap();
        for _ in 1..d {
            targets.push(uniform(&mut rng, lo, hi));
        }

        // Abar = Q diag(targets/2) Q^T via rank-one accumulation.
        let half = real::<T>(0.5);
        let mut abar = DenseMat::zeros(d);
        for (k, t) in targets.iter().enumerate() {
            let w = *t * half;
            for i in 0..d {
                let qi = q.at(i, k) * w;
                for j in 0..d {
                    *abar.at_mut(i, j) += qi * q.at(j, k);
                }
            }
        }
        // Exact symmetry by construction order is not guaranteed in floating
        // point; enforce it so every A_i is symmetric bit-for-bit.
        for i in 0..d {
            for j in (i + 1)..d {
                let s = (abar.at(i, j) + abar.at(j, i)) * half;
                *abar.at_mut(i, j) = s;
                *abar.at_mut(j, i) = s;
            }
        }

        // Per-component perturbations, zero-sum across components.
        let mut a = vec![T::zero(); n * d * d];
        let mut running = vec![T::zero(); d * d];
        for i in 0..n {
            let block = &mut a[i * d * d..(i + 1) * d * d];
            if i + 1 < n {
                for r in 0..d {
                    for c in r..d {
                        let e: T = uniform(&mut rng, -0.1, 0.1);
                        block[r * d + c] = e;
                        block[c * d + r] = e;
                    }
                }
                for (acc, v) in running.iter_mut().zip(block.iter()) {
                    *acc += *v;
                }
            } else {
                for (slot, acc) in block.iter_mut().zip(running.iter()) {
                    *slot = -*acc;
                }
            }
            for (slot, base) in block.iter_mut().zip(abar.data.iter()) {
                *slot += *base;
            }
        }

        // Zero-sum linear terms at small scale so the saddle stays dominant.
        let mut b = vec![T::zero(); n * d];
        let mut brun = vec![T::zero(); d];
        for i in 0..n {
            let block = &mut b[i * d..(i + 1) * d];
            if i + 1 < n {
                for slot in block.iter_mut() {
                    *slot = uniform::<T>(&mut rng, -1.0, 1.0) * real(1e-3);
                }
                for (acc, v) in brun.iter_mut().zip(block.iter()) {
                    *acc += *v;
                }
            } else {
                for (slot, acc) in block.iter_mut().zip(brun.iter()) {
                    *slot = -*acc;
                }
            }
        }

        let problem = Self::assemble(params, a, b, &mut rng)?;
        if d <= VERIFY_DIM_LIMIT {
            problem.verify_spectrum()?;
        }
        Ok(problem)
    }

    fn assemble(
        params: SyntheticParams<T>,
        a: Vec<T>,
        b: Vec<T>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        let n = params.num_components;
        let d = params.dim;
        // Recorded constants on the box |x|_inf <= BOX_RADIUS:
        //   L = 2 max_i ||A_i||_2 + 90 R^8,  M = 720 R^7.
        let seed_vec: Vec<T> = (0..d).map(|_| standard_normal(rng)).collect();
        let mut max_norm = T::zero();
        for i in 0..n {
            let m = DenseMat {
                dim: d,
                data: a[i * d * d..(i + 1) * d * d].to_vec(),
            };
            max_norm = max_norm.max(m.spectral_norm_est(30, &seed_vec));
        }
        let r = BOX_RADIUS;
        let lipschitz_grad = real::<T>(2.0) * max_norm + real(90.0 * r.powi(8));
        let lipschitz_hess = real(720.0 * r.powi(7));
        Ok(SyntheticSaddle {
            params,
            a,
            b,
            lipschitz_grad,
            lipschitz_hess,
            box_exceeded: AtomicBool::new(false),
        })
    }

    pub fn params(&self) -> &SyntheticParams<T> {
        &self.params
    }

    pub fn component_matrix(&self, i: usize) -> &[T] {
        let dd = self.params.dim * self.params.dim;
        &self.a[i * dd..(i + 1) * dd]
    }

    pub fn component_linear(&self, i: usize) -> &[T] {
        let d = self.params.dim;
        &self.b[i * d..(i + 1) * d]
    }

    /// True once any oracle evaluation saw a point outside the box on which
    /// the recorded L and M are valid.
    pub fn box_exceeded(&self) -> bool {
        self.box_exceeded.load(Ordering::Relaxed)
    }

    /// Analytic dense Hessian of the mean function at `x`:
    /// `(2/n) sum_i A_i + 90 diag(x_j^8)`.
    pub fn dense_hessian_at(&self, x: &[T]) -> DenseMat<T> {
        let d = self.params.dim;
        let n = self.params.num_components;
        let mut h = DenseMat::zeros(d);
        for i in 0..n {
            let block = self.component_matrix(i);
            for (slot, v) in h.data.iter_mut().zip(block.iter()) {
                *slot += *v;
            }
        }
        let scale = real::<T>(2.0) / real_usize::<T>(n);
        for v in h.data.iter_mut() {
            *v *= scale;
        }
        let ninety = real::<T>(90.0);
        for j in 0..d {
            let x2 = x[j] * x[j];
            let x8 = x2 * x2 * x2 * x2;
            *h.at_mut(j, j) += ninety * x8;
        }
        h
    }

    fn verify_spectrum(&self) -> Result<()> {
        let origin = vec![T::zero(); self.params.dim];
        let h = self.dense_hessian_at(&origin);
        let eig = h.sym_eigenvalues()?;
        let tol = real::<T>(SPECTRUM_TOL);
        let neg = self.params.neg_eig;
        if (eig[0] - neg).abs() > tol * T::one().max(neg.abs()) {
            return Err(OptError::Construction(format!(
                "origin Hessian min eigenvalue {} misses target {}",
                eig[0], neg
            )));
        }
        let (lo, hi) = self.params.pos_range;
        for lam in &eig[1..] {
            if *lam < lo - tol || *lam > hi + tol {
                return Err(OptError::Construction(format!(
                    "origin Hessian eigenvalue {lam} outside positive range"
                )));
            }
        }
        Ok(())
    }

    /// Seeded starting point, uniform per coordinate in `[-radius, radius]`.
    pub fn starting_point(&self, run_seed: u64, radius: f64) -> Vec<T> {
        let mut rng = stream_rng(run_seed, 200);
        (0..self.params.dim)
            .map(|_| uniform(&mut rng, -radius, radius))
            .collect()
    }

    pub fn dump(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| OptError::Io {
            path: path.display().to_string(),
            source: e,
        };
        let file = File::create(path).map_err(io)?;
        let mut w = BufWriter::new(file);
        w.write_all(MAGIC).map_err(io)?;
        write_u32(&mut w, FORMAT_VERSION).map_err(io)?;
        write_u64(&mut w, self.params.num_components as u64).map_err(io)?;
        write_u64(&mut w, self.params.dim as u64).map_err(io)?;
        write_u64(&mut w, self.params.seed).map_err(io)?;
        for v in [
            self.params.neg_eig,
            self.params.pos_range.0,
            self.params.pos_range.1,
            self.lipschitz_grad,
            self.lipschitz_hess,
        ] {
            write_f64(&mut w, v.to_f64().unwrap()).map_err(io)?;
        }
        for v in &self.a {
            write_f64(&mut w, v.to_f64().unwrap()).map_err(io)?;
        }
        for v in &self.b {
            write_f64(&mut w, v.to_f64().unwrap()).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let io = |e: std::io::Error| OptError::Io {
            path: path.display().to_string(),
            source: e,
        };
        let bad = |reason: &str| OptError::Format {
            path: path.display().to_string(),
            reason: reason.to_string(),
        };
        let file = File::open(path).map_err(io)?;
        let mut r = BufReader::new(file);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(bad("bad magic"));
        }
        if read_u32(&mut r).map_err(io)? != FORMAT_VERSION {
            return Err(bad("unsupported format version"));
        }
        let n = read_u64(&mut r).map_err(io)? as usize;
        let d = read_u64(&mut r).map_err(io)? as usize;
        let seed = read_u64(&mut r).map_err(io)?;
        let mut header = [0f64; 5];
        for h in header.iter_mut() {
            *h = read_f64(&mut r).map_err(io)?;
        }
        let mut a = Vec::with_capacity(n * d * d);
        for _ in 0..n * d * d {
            a.push(real::<T>(read_f64(&mut r).map_err(io)?));
        }
        let mut b = Vec::with_capacity(n * d);
        for _ in 0..n * d {
            b.push(real::<T>(read_f64(&mut r).map_err(io)?));
        }
        Ok(SyntheticSaddle {
            params: SyntheticParams {
                num_components: n,
                dim: d,
                seed,
                neg_eig: real(header[0]),
                pos_range: (real(header[1]), real(header[2])),
            },
            a,
            b,
            lipschitz_grad: real(header[3]),
            lipschitz_hess: real(header[4]),
            box_exceeded: AtomicBool::new(false),
        })
    }
}

const MAGIC: &[u8; 4] = b"FSSP";
const FORMAT_VERSION: u32 = 1;

fn write_u32<W: Write>(w: &mut W, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}
fn write_u64<W: Write>(w: &mut W, v: u64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}
fn write_f64<W: Write>(w: &mut W, v: f64) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}
fn read_u32<R: Read>(r: &mut R) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
fn read_u64<R: Read>(r: &mut R) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}
fn read_f64<R: Read>(r: &mut R) -> std::io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

impl<T: Scalar> Objective<T> for SyntheticSaddle<T> {
    fn spec(&self) -> ProblemSpec<T> {
        ProblemSpec {
            num_components: self.params.num_components,
            dim: self.params.dim,
            lipschitz_grad: self.lipschitz_grad,
            lipschitz_hess: self.lipschitz_hess,
            lower_bound_hint: None,
        }
    }

    fn component_value_grad(&self, i: usize, x: &[T], grad: &mut [T]) -> T {
        let d = self.params.dim;
        if norm_inf(x) > real(BOX_RADIUS) {
            self.box_exceeded.store(true, Ordering::Relaxed);
        }
        let a = self.component_matrix(i);
        let b = self.component_linear(i);
        let two = real::<T>(2.0);
        let ten = real::<T>(10.0);
        let mut val = T::zero();
        for r in 0..d {
            let row = &a[r * d..(r + 1) * d];
            let ax = crate::linalg::dot(row, x);
            val = val + x[r] * ax + b[r] * x[r];
            let x2 = x[r] * x[r];
            let x4 = x2 * x2;
            let x8 = x4 * x4;
            val = val + x8 * x2;
            grad[r] = two * ax + b[r] + ten * x8 * x[r];
        }
        val
    }

    fn component_hvp(&self, i: usize, x: &[T], v: &[T], out: &mut [T]) {
        let d = self.params.dim;
        let a = self.component_matrix(i);
        let two = real::<T>(2.0);
        let ninety = real::<T>(90.0);
        for r in 0..d {
            let row = &a[r * d..(r + 1) * d];
            let av = crate::linalg::dot(row, v);
            let x2 = x[r] * x[r];
            let x4 = x2 * x2;
            out[r] = two * av + ninety * x4 * x4 * v[r];
        }
    }
}

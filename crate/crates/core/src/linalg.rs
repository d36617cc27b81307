//! Dense vector and symmetric-matrix helpers.
//!
//! Vectors are plain `Vec<T>`/`&[T]`; reductions run in ascending index
//! order so results are bitwise reproducible across runs and match the
//! documented oracle summation contract.

use crate::error::{contract, OptError, Result};
use crate::scalar::{real, Scalar};

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b.iter()) {
        acc = acc + *x * *y;
    }
    acc
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn norm_inf<T: Scalar>(a: &[T]) -> T {
    let mut m = T::zero();
    for x in a {
        m = m.max(x.abs());
    }
    m
}

/// `y += alpha * x`
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += alpha * *xi;
    }
}

pub fn scale<T: Scalar>(alpha: T, x: &mut [T]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b.iter()).map(|(x, y)| *x - *y).collect()
}

pub fn all_finite<T: Scalar>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_finite())
}

pub fn normalize<T: Scalar>(v: &mut [T]) -> T {
    let n = norm2(v);
    if n > T::zero() {
        scale(T::one() / n, v);
    }
    n
}

/// Dense square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMat<T> {
    pub dim: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> DenseMat<T> {
    pub fn zeros(dim: usize) -> Self {
        DenseMat {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn from_rows(dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(contract("DenseMat::from_rows: data length != dim^2"));
        }
        Ok(DenseMat { dim, data })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// `out = A x` (rows dotted in ascending order).
    pub fn matvec_into(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for i in 0..self.dim {
            out[i] = dot(self.row(i), x);
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        self.matvec_into(x, &mut out);
        out
    }

    /// Largest off-diagonal asymmetry `max |a_ij - a_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.at(i, j) - self.at(j, i)).abs());
            }
        }
        worst
    }

    /// Spectral-norm estimate by power iteration (symmetric input assumed).
    pub fn spectral_norm_est(&self, iters: usize, seed_vec: &[T]) -> T {
        let mut v: Vec<T> = seed_vec.to_vec();
        normalize(&mut v);
        let mut lam = T::zero();
        let mut w = vec![T::zero(); self.dim];
        for _ in 0..iters {
            self.matvec_into(&v, &mut w);
            lam = norm2(&w);
            if lam == T::zero() {
                return T::zero();
            }
            for (vi, wi) in v.iter_mut().zip(w.iter()) {
                *vi = *wi / lam;
            }
        }
        lam
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
    /// returned in ascending order. Used as the dense ground-truth oracle
    /// for spectrum checks at small dimension.
    pub fn sym_eigenvalues(&self) -> Result<Vec<T>> {
        let d = self.dim;
        let mut a = self.data.clone();
        let idx = |i: usize, j: usize| i * d + j;
        // Quadratic convergence: a handful of sweeps suffices at d <= 500.
        let max_sweeps = 64;
        let tol = real::<T>(1e-30).max(T::epsilon() * T::epsilon());
        for _ in 0..max_sweeps {
            let mut off = T::zero();
            for i in 0..d {
                for j in (i + 1)..d {
                    off = off + a[idx(i, j)] * a[idx(i, j)];
                }
            }
            let scale_ref: T = (0..d).map(|i| a[idx(i, i)] * a[idx(i, i)]).sum::<T>() + off;
            if off <= tol * scale_ref.max(T::one()) {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let apq = a[idx(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let app = a[idx(p, p)];
                    let aqq = a[idx(q, q)];
                    let theta = (aqq - app) / (real::<T>(2.0) * apq);
                    let t = if theta >= T::zero() {
                        T::one() / (theta + (T::one() + theta * theta).sqrt())
                    } else {
                        -T::one() / (-theta + (T::one() + theta * theta).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    // Rotate rows/columns p and q.
                    for k in 0..d {
                        if k != p && k != q {
                            let akp = a[idx(k, p)];
                            let akq = a[idx(k, q)];
                            let new_kp = c * akp - s * akq;
                            let new_kq = s * akp + c * akq;
                            a[idx(k, p)] = new_kp;
                            a[idx(p, k)] = new_kp;
                            a[idx(k, q)] = new_kq;
                            a[idx(q, k)] = new_kq;
                        }
                    }
                    a[idx(p, p)] = app - t * apq;
                    a[idx(q, q)] = aqq + t * apq;
                    a[idx(p, q)] = T::zero();
                    a[idx(q, p)] = T::zero();
                }
            }
        }
        let mut eig: Vec<T> = (0..d).map(|i| a[idx(i, i)]).collect();
        if !all_finite(&eig) {
            return Err(OptError::Numeric(
                "Jacobi eigensolver produced non-finite values".into(),
            ));
        }
        eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        Ok(eig)
    }
}

/// Modified Gram-Schmidt QR of a square matrix; returns Q with orthonormal
/// columns. The input columns must be linearly independent, which holds
/// almost surely for the random Gaussian matrices this is used on.
pub fn orthonormalize_columns<T: Scalar>(m: &mut DenseMat<T>) -> Result<()> {
    let d = m.dim;
    for j in 0..d {
        for k in 0..j {
            let mut proj = T::zero();
            for i in 0..d {
                proj = proj + m.at(i, k) * m.at(i, j);
            }
            for i in 0..d {
                let v = m.at(i, j) - proj * m.at(i, k);
                *m.at_mut(i, j) = v;
            }
        }
        let mut nrm = T::zero();
        for i in 0..d {
            nrm = nrm + m.at(i, j) * m.at(i, j);
        }
        let nrm = nrm.sqrt();
        if nrm < real::<T>(1e-12) {
            return Err(OptError::Numeric(
                "rank deficiency while orthonormalizing random matrix".into(),
            ));
        }
        for i in 0..d {
            *m.at_mut(i, j) = m.at(i, j) / nrm;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jacobi_matches_known_spectrum() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        let m = DenseMat::from_rows(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let eig = m.sym_eigenvalues().unwrap();
        assert_relative_eq!(eig[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(eig[1], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn jacobi_diagonal_passthrough() {
        let m = DenseMat::from_rows(3, vec![3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.5]).unwrap();
        let eig = m.sym_eigenvalues().unwrap();
        assert_eq!(eig, vec![-1.0, 0.5, 3.0]);
    }

    #[test]
    fn mgs_produces_orthonormal_columns() {
        let mut m = DenseMat::from_rows(
            3,
            vec![1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0],
        )
        .unwrap();
        orthonormalize_columns(&mut m).unwrap();
        for j in 0..3 {
            for k in 0..=j {
                let mut p = 0.0;
                for i in 0..3 {
                    p += m.at(i, j) * m.at(i, k);
                }
                let expect = if j == k { 1.0 } else { 0.0 };
                assert_relative_eq!(p, expect, epsilon = 1e-12);
            }
        }
    }
}

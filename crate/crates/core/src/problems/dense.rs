//! Dense Hessian assembly through the oracle layer, for validation at small
//! dimension.

use crate::error::{contract, Result};
use crate::linalg::DenseMat;
use crate::oracle::CountedOracle;
use crate::scalar::{real, Scalar};

/// Guard against accidentally materializing a huge matrix.
const MAX_DENSE_DIM: usize = 500;

/// Explicit Hessian of the mean function, column `j` equal to the full HVP
/// against basis vector `e_j`.
pub struct DenseHessianOracle<T> {
    matrix: DenseMat<T>,
}

impl<T: Scalar> DenseHessianOracle<T> {
    pub fn matrix(&self) -> &DenseMat<T> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        self.matrix.sym_eigenvalues()
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eigenvalues()?[0])
    }

    pub fn multiply(&self, v: &[T]) -> Vec<T> {
        self.matrix.matvec(v)
    }
}

/// Assembles `hess f(x)` by `n * d` ISO calls and checks symmetry.
pub fn dense_hessian<T: Scalar>(
    oracle: &CountedOracle<'_, T>,
    x: &[T],
) -> Result<DenseHessianOracle<T>> {
    let d = oracle.dim();
    if d > MAX_DENSE_DIM {
        return Err(contract(format!(
            "dense Hessian assembly limited to d <= {MAX_DENSE_DIM}, got {d}"
        )));
    }
    let mut m = DenseMat::zeros(d);
    let mut basis = vec![T::zero(); d];
    for j in 0..d {
        basis[j] = T::one();
        let col = oracle.full_hvp(x, &basis)?;
        for i in 0..d {
            *m.at_mut(i, j) = col[i];
        }
        basis[j] = T::zero();
    }
    let scale = T::one().max(m.data.iter().fold(T::zero(), |a, v| a.max(v.abs())));
    if m.asymmetry() > real::<T>(1e-10) * scale {
        return Err(crate::error::OptError::Numeric(
            "assembled Hessian is not symmetric to tolerance".into(),
        ));
    }
    Ok(DenseHessianOracle { matrix: m })
}

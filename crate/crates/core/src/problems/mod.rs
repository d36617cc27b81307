//! Concrete finite-sum problems: the synthetic saddle benchmark and small
//! analytic fixtures, plus a dense-Hessian validation oracle.

mod dense;
mod synthetic;
mod toys;

pub use dense::{dense_hessian, DenseHessianOracle};
pub use synthetic::{SyntheticParams, SyntheticSaddle};
pub use toys::{
    toy_problems, ConstantObjective, QuadraticForm, SeparableQuadratic, SeparableQuartic,
    TwoDSaddle,
};

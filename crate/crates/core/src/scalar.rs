use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use ndarray::ScalarOperand;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type every algorithm in the crate is generic over.
///
/// The associated tolerances are the precision-dependent knobs: structural
/// checks (symmetry, normalization) and the relative threshold that decides
/// when a spectral value counts as zero.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + ScalarOperand
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Relative zero threshold for eigenvalues (scaled by the largest one).
    const RANK_EPS: f64;
    /// Absolute slack for symmetry and normalization checks on unit-scale data.
    const CHECK_TOL: f64;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const RANK_EPS: f64 = 1e-10;
    const CHECK_TOL: f64 = 1e-12;
}

impl Scalar for f32 {
    const RANK_EPS: f64 = 1e-5;
    const CHECK_TOL: f64 = 1e-5;
}

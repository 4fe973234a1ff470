//! Numeric traits shared by the LP engine and the exponent evaluator.
//!
//! The simplex core is written once against [`Scalar`] and instantiated with
//! `f64` for production solves and with [`BigRational`] for exact re-solves.
//! The exponent functions only need transcendental operations and are written
//! against [`ExponentFloat`] (`f32` or `f64`).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Ordered field element usable inside the simplex.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Feasibility and optimality tolerance. Zero for exact types.
    fn tolerance() -> Self;

    /// `true` when arithmetic is exact and no refactorization is needed.
    fn is_exact() -> bool;

    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("every scalar type represents small integers")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts an `f64` input. Exact types take the binary value verbatim.
    fn from_f64_lossy(v: f64) -> Self;

    fn is_pos_tol(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_neg_tol(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn is_zero_tol(&self) -> bool {
        !self.is_pos_tol() && !self.is_neg_tol()
    }

    /// Magnitude used for pivot selection during refactorization.
    fn magnitude(&self) -> f64 {
        self.abs().to_f64_lossy()
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn is_exact() -> bool {
        false
    }

    fn from_f64_lossy(v: f64) -> Self {
        v
    }
}

impl Scalar for BigRational {
    fn tolerance() -> Self {
        BigRational::from_integer(BigInt::from(0))
    }

    fn is_exact() -> bool {
        true
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_float(v).expect("finite input")
    }
}

/// Floating point type used by the rate-function evaluator.
pub trait ExponentFloat:
    num_traits::Float + FromPrimitive + Debug + Send + Sync + 'static
{
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable")
    }
}

impl ExponentFloat for f32 {}
impl ExponentFloat for f64 {}

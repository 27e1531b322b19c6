//! Scalar abstraction shared by every solver in the crate.
//!
//! The combinatorial parts (max-flow, the bipartite LP, covers, plans) only
//! need ordered field arithmetic, so they are written against [`Scalar`] and
//! run unchanged on `f32`, `f64` and exact rationals. Anything that needs
//! `sqrt`, `sin` or an SVD asks for [`Real`] instead.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, NumAssignOps, Signed, ToPrimitive};

/// Ordered field used by the combinatorial solvers.
pub trait Scalar:
    Copy
    + PartialOrd
    + Debug
    + Display
    + Num
    + Signed
    + NumAssignOps
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Absolute comparison slack. Exact types return zero so that every
    /// tolerance-guarded comparison becomes an exact one.
    fn tol(abs: f64) -> Self;

    /// `false` for NaN and infinities.
    fn is_finite_value(&self) -> bool;

    /// Conversion from a literal; panics only on non-representable input.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(|| panic!("{x} is not representable"))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

/// Floating-point scalar for the approximation and sampling code.
pub trait Real: Scalar + num_traits::Float {}

impl Scalar for f64 {
    fn tol(abs: f64) -> Self {
        abs
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn tol(abs: f64) -> Self {
        // f32 cannot resolve the f64-scale tolerances used throughout.
        (abs as f32).max(abs_floor_f32())
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

fn abs_floor_f32() -> f32 {
    8.0 * f32::EPSILON
}

impl Real for f64 {}
impl Real for f32 {}

impl Scalar for Ratio<i64> {
    fn tol(_abs: f64) -> Self {
        Ratio::from_integer(0)
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

impl Scalar for Ratio<i128> {
    fn tol(_abs: f64) -> Self {
        Ratio::from_integer(0)
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

//! Scalar abstraction for simulated time, rates, power and energy.
//!
//! All core math (ranking, slot search, EDP scores, energy accounting) is
//! written against [`Scalar`] so the same code runs on `f32` or `f64`.
//! Concrete `f64` aliases live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar used for times, rates, power and energy.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used when ingesting file data and RNG draws.
    fn from_config(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 must convert into the scalar type")
    }

    /// Lossy conversion to `f64`, used when emitting reports.
    fn to_config(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Total order for finite scalars (times in a schedule are always finite).
pub fn cmp_finite<S: Scalar>(a: &S, b: &S) -> std::cmp::Ordering {
    a.partial_cmp(b).expect("schedule times must be finite")
}

/// `true` when `a` and `b` differ by at most `tol` (absolute).
pub fn approx_eq<S: Scalar>(a: S, b: S, tol: S) -> bool {
    (a - b).abs() <= tol
}

/// Tolerance used when detecting rank/score ties.
pub fn tie_tol<S: Scalar>() -> S {
    S::from_config(1e-9)
}

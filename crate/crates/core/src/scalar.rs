//! Scalar abstraction shared by the model, the LP engine and the planners.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the whole crate is generic over.
///
/// The tolerances are per-type because a single absolute value cannot serve
/// both `f32` and `f64` arithmetic.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Slack used when deciding whether a node meets its threshold.
    fn def_tol() -> Self;
    /// Slack used when validating strategies and solver output.
    fn feas_tol() -> Self;
    /// Distance from {0,1} under which a relaxed binary counts as integral.
    fn int_tol() -> Self;
    /// Smallest pivot element the simplex accepts.
    fn pivot_tol() -> Self;
    /// Reduced-cost and primal tolerance inside the simplex.
    fn opt_tol() -> Self;

    /// Converts an `f64` literal. Panics only for non-representable values,
    /// which cannot happen for the finite constants used in this crate.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn def_tol() -> Self {
        1e-6
    }
    fn feas_tol() -> Self {
        1e-6
    }
    fn int_tol() -> Self {
        1e-6
    }
    fn pivot_tol() -> Self {
        1e-9
    }
    fn opt_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn def_tol() -> Self {
        1e-4
    }
    fn feas_tol() -> Self {
        1e-4
    }
    fn int_tol() -> Self {
        1e-4
    }
    fn pivot_tol() -> Self {
        1e-6
    }
    fn opt_tol() -> Self {
        1e-5
    }
}

//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use twofloat::TwoFloat;

/// Real floating-point scalar the state, measure and POVM code is generic over.
///
/// Implemented for `f32`, `f64` and [`twofloat::TwoFloat`] (double-double,
/// roughly 106 bits of mantissa).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Unit roundoff used for convergence and rank thresholds.
    ///
    /// `Float::epsilon` is not used because `TwoFloat` reports the smallest
    /// positive normal there.
    fn precision() -> Self;

    /// Converts an `f64` literal. Exact for `f64` and `TwoFloat`.
    ///
    /// Implemented per type because `FromPrimitive::from_f64` on `TwoFloat`
    /// truncates toward an integer.
    fn lit(x: f64) -> Self;

    /// A tolerance that never drops below the type's own resolution.
    ///
    /// Thresholds are written for `f64`; for `f32` they are widened to
    /// `64 * epsilon` so the same checks remain meaningful.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::precision() * Self::lit(64.0);
        Self::lit(x).max(floor)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    fn precision() -> Self {
        f32::EPSILON
    }

    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }
}

impl Real for f64 {
    fn precision() -> Self {
        f64::EPSILON
    }

    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
}

impl Real for TwoFloat {
    fn precision() -> Self {
        TwoFloat::from(2f64.powi(-104))
    }

    #[inline]
    fn lit(x: f64) -> Self {
        TwoFloat::from(x)
    }
}

pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// `e^{i theta}`.
#[inline]
pub(crate) fn cis<T: Real>(theta: T) -> C<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

#[inline]
pub(crate) fn norm_sqr<T: Real>(z: C<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[inline]
pub(crate) fn abs<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub(crate) fn conj<T: Real>(z: C<T>) -> C<T> {
    Complex::new(z.re, -z.im)
}

#[inline]
pub(crate) fn scale<T: Real>(z: C<T>, k: T) -> C<T> {
    Complex::new(z.re * k, z.im * k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_scales_with_type() {
        assert_eq!(<f64 as Real>::tol(1e-9), 1e-9);
        assert!(<f32 as Real>::tol(1e-9) > 1e-6);
        assert_eq!(<TwoFloat as Real>::tol(1e-9).to_f64_lossy(), 1e-9);
    }

    #[test]
    fn cis_is_unit() {
        let z = cis(0.7_f64);
        assert!((norm_sqr(z) - 1.0).abs() < 1e-15);
    }
}

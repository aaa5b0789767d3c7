//! Scalar abstraction shared by every module.

use nalgebra::{Complex, RealField};
use num_traits::{FloatConst, ToPrimitive};

/// Real scalar used throughout the crate.
///
/// Implemented for `f32` and `f64`. Default tolerances are sized for `f64`;
/// single precision callers should loosen them through [`crate::Tolerances`].
pub trait Real: RealField + Copy + FloatConst + ToPrimitive {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn two_pi<T: Real>() -> T {
    T::two_pi()
}

/// Sample angle `2πi/m`, computed so that `theta(2i, 2m) == theta(i, m)` bit for bit.
#[inline]
pub fn sample_angle<T: Real>(i: usize, m: usize) -> T {
    T::two_pi() * nalgebra::convert::<f64, T>(i as f64) / nalgebra::convert::<f64, T>(m as f64)
}

/// `e^{iφ}`.
#[inline]
pub fn cis<T: Real>(phi: T) -> Complex<T> {
    Complex::new(phi.cos(), phi.sin())
}

/// Principal argument of `z`.
#[inline]
pub fn arg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

/// Rescales `z` to unit modulus. Returns `None` when `|z|` is not positive.
#[inline]
pub fn unit<T: Real>(z: Complex<T>) -> Option<Complex<T>> {
    let r = cabs(z);
    if r > T::zero() {
        Some(z.unscale(r))
    } else {
        None
    }
}

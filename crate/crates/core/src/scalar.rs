//! Scalar abstraction.
//!
//! All numerical code is written against [`Real`], a real floating point type
//! (`f32` or `f64`). Matrix entries are `Complex<T>`; subspaces over the reals
//! simply keep the imaginary parts at zero.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point scalar usable by every routine in this crate.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Default {
    /// Default relative rank threshold for this precision.
    const DEFAULT_REL_RANK_TOL: f64;
    /// Default absolute floor below which a matrix counts as zero.
    const DEFAULT_ABS_FLOOR: f64;

    /// Lossy conversion from `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal fits the scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const DEFAULT_REL_RANK_TOL: f64 = 1e-8;
    const DEFAULT_ABS_FLOOR: f64 = 1e-12;
}

impl Real for f32 {
    const DEFAULT_REL_RANK_TOL: f64 = 1e-4;
    const DEFAULT_ABS_FLOOR: f64 = 1e-6;
}

/// Complex entry type built on a [`Real`].
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn cf64<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: &C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[inline]
pub(crate) fn modulus<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}

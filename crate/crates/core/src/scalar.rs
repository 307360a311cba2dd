//! Scalar abstraction shared by every numeric kernel in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign};
use rustfft::FftNum;

/// Floating-point type the modem can run on (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FftNum + NumAssign + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` constant.
    fn of(x: f64) -> Self;

    fn as_f64(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

#[inline]
pub(crate) fn two_pi<T: Real>() -> T {
    T::TAU()
}

/// Converts a power ratio to decibels.
#[inline]
pub fn db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Reduces a phase difference to `[-pi, pi)`.
pub fn wrap_phase(d: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    d - TAU * ((d + PI) / TAU).floor()
}

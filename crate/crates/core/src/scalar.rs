//! Scalar types that walk values can live in.
//!
//! Path functionals (running maxima, ladder epochs, local times, path
//! transformations) only need an ordered ring, so they are written once over
//! [`Scalar`] and used with `f64` for simulation and with exact rationals for
//! the enumeration oracle.

use num_rational::Rational64;
use num_traits::{Num, ToPrimitive};
use std::fmt::Debug;
use std::ops::Neg;

/// Ordered ring element usable as a walk value.
pub trait Scalar:
    Copy + PartialOrd + Num + Neg<Output = Self> + Debug + Send + Sync + 'static
{
    fn to_f64(self) -> f64;

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
}

impl Scalar for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for i64 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for Rational64 {
    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

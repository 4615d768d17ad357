//! Scalar abstractions.
//!
//! Counting-based utilities (nominal category utility) only need field
//! arithmetic, so they are generic over [`Scalar`], which includes exact
//! rationals. Anything that evaluates a Gaussian kernel needs [`Real`].

use std::fmt;

use num_rational::Ratio;
use num_traits::{Float, Num, NumCast};

/// Field-like scalar used for probabilities and utilities.
pub trait Scalar:
    Num + Copy + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Converts an instance count.
    fn from_count(n: usize) -> Self;

    fn to_f64(self) -> f64;

    /// Whether two values should be treated as equal when ranking moves.
    fn nearly_eq(self, other: Self) -> bool;
}

/// Floating point scalar: f32 or f64.
pub trait Real: Scalar + Float {
    /// Lossy conversion from an f64 literal.
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 literal representable")
    }
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            #[inline]
            fn from_count(n: usize) -> Self {
                n as $t
            }

            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }

            fn nearly_eq(self, other: Self) -> bool {
                let scale = 1.0 as $t;
                let scale = scale.max(self.abs()).max(other.abs());
                (self - other).abs() <= 64.0 * <$t>::EPSILON * scale
            }
        }

        impl Real for $t {}
    )*};
}

impl_float_scalar!(f32, f64);

impl Scalar for Ratio<i64> {
    fn from_count(n: usize) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("count fits in i64"))
    }

    fn to_f64(self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn nearly_eq(self, other: Self) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_counts_are_exact() {
        let r = Ratio::<i64>::from_count(3) / Ratio::from_count(8);
        assert_eq!(r, Ratio::new(3, 8));
        assert_eq!(r.to_f64(), 0.375);
    }

    #[test]
    fn float_ties_are_relative() {
        assert!(1.0f64.nearly_eq(1.0 + 1e-15));
        assert!(!1.0f64.nearly_eq(1.0 + 1e-9));
        assert!(1e6f64.nearly_eq(1e6 + 1e-9));
        assert!(!0.5f32.nearly_eq(0.5001));
    }
}

//! Arc weight scalars.
//!
//! Everything that touches path costs is generic over [`Weight`]. Integer
//! weights give exact comparisons (the default, see [`crate::Cost`]); floats are
//! supported for callers that do not care about bit-exact tie handling.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{Bounded, NumCast, ToPrimitive, Zero};

/// Resolution of the fixed-point representation: one natural unit is
/// `FIXED_POINT_SCALE` integer units (nano-unit resolution).
pub const FIXED_POINT_SCALE: i64 = 1_000_000_000;

/// A non-negative arc weight with an explicit infinity.
pub trait Weight:
    Copy
    + Debug
    + Display
    + PartialOrd
    + Zero
    + Bounded
    + NumCast
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// Value used for "unreachable".
    fn infinity() -> Self;

    fn is_infinite(self) -> bool;

    /// Addition that absorbs infinity and never wraps.
    fn add_or_inf(self, other: Self) -> Self;

    /// Difference `self - other`, infinity if `self` is infinite.
    fn sub_or_inf(self, other: Self) -> Self;

    /// Total order used by priority queues. NaN never occurs for valid
    /// weights.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    fn as_f64(self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            self.to_f64().unwrap_or(f64::INFINITY)
        }
    }
}

macro_rules! int_weight {
    ($($t:ty),*) => {$(
        impl Weight for $t {
            #[inline]
            fn infinity() -> Self {
                <$t>::MAX
            }
            #[inline]
            fn is_infinite(self) -> bool {
                self == <$t>::MAX
            }
            #[inline]
            fn add_or_inf(self, other: Self) -> Self {
                if self.is_infinite() || other.is_infinite() {
                    <$t>::MAX
                } else {
                    // saturating: a finite sum never reaches MAX in practice
                    self.saturating_add(other)
                }
            }
            #[inline]
            fn sub_or_inf(self, other: Self) -> Self {
                if self.is_infinite() {
                    <$t>::MAX
                } else {
                    self.saturating_sub(other)
                }
            }
        }
    )*};
}

macro_rules! float_weight {
    ($($t:ty),*) => {$(
        impl Weight for $t {
            #[inline]
            fn infinity() -> Self {
                <$t>::INFINITY
            }
            #[inline]
            fn is_infinite(self) -> bool {
                self == <$t>::INFINITY
            }
            #[inline]
            fn add_or_inf(self, other: Self) -> Self {
                self + other
            }
            #[inline]
            fn sub_or_inf(self, other: Self) -> Self {
                if self.is_infinite() {
                    <$t>::INFINITY
                } else {
                    self - other
                }
            }
            fn total_cmp(&self, other: &Self) -> Ordering {
                <$t>::total_cmp(self, other)
            }
        }
    )*};
}

int_weight!(i32, i64, u32, u64);
float_weight!(f32, f64);

/// Weights that can be hashed and compared exactly.
pub trait ExactWeight: Weight + Eq + Ord + Hash {}
impl<W: Weight + Eq + Ord + Hash> ExactWeight for W {}

/// Converts a natural-unit quantity to fixed point, rounding up.
pub fn to_fixed_ceil(value: f64) -> i64 {
    (value * FIXED_POINT_SCALE as f64).ceil() as i64
}

/// Converts a natural-unit quantity to fixed point, rounding down.
pub fn to_fixed_floor(value: f64) -> i64 {
    (value * FIXED_POINT_SCALE as f64).floor() as i64
}

pub fn from_fixed(value: i64) -> f64 {
    value as f64 / FIXED_POINT_SCALE as f64
}

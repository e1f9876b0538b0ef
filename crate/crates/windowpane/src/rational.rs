//! Exact time arithmetic. Region membership is discontinuous, so all
//! valuations and delays are big rationals; nothing in the crate touches
//! floating point.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub type Time = BigRational;

pub fn time(n: i64) -> Time {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Time {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Time {
    BigRational::zero()
}

pub fn one() -> Time {
    BigRational::one()
}

pub fn is_integral(t: &Time) -> bool {
    t.is_integer()
}

/// Integral part of a non-negative time value.
pub fn floor_u64(t: &Time) -> u64 {
    debug_assert!(!t.is_negative());
    t.floor().to_integer().to_u64().expect("time fits in u64")
}

/// Fractional part, in `[0, 1)`.
pub fn frac(t: &Time) -> Time {
    t - t.floor()
}

/// Renders as `num/den` (or just the numerator when integral), the format
/// used in run serializations.
pub fn render(t: &Time) -> String {
    if t.is_integer() {
        t.to_integer().to_string()
    } else {
        format!("{}/{}", t.numer(), t.denom())
    }
}

/// Parses the [`render`] format.
pub fn parse(s: &str) -> Option<Time> {
    match s.split_once('/') {
        None => s.trim().parse::<BigInt>().ok().map(BigRational::from_integer),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
    }
}

//! Scalar abstraction for the real-valued quantities (proportions,
//! discrepancies, bounds).
//!
//! Counting is always exact on integers; only the final ratios go through
//! [`Scalar`]. Instantiating with [`crate::Rational`] keeps everything exact,
//! while `f64`/`f32` give the cheap approximate view.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

pub trait Scalar: Num + Clone + PartialOrd + Debug {
    /// `num / den` in this scalar type. `den` must be nonzero.
    fn from_ratio(num: u128, den: u128) -> Self;

    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_ratio(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &BigRational) -> Self {
        Scalar::to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u128, den: u128) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn from_rational(r: &BigRational) -> Self {
        Scalar::to_f64(r) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: u128, den: u128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Renders `num / den` with six decimals, rounding half up, using only
/// integer arithmetic so the output is platform independent.
pub fn decimal6(num: &BigInt, den: &BigInt) -> String {
    use num_integer::Integer;
    use num_traits::{Signed, Zero};

    let negative = num.is_negative() != den.is_negative() && !num.is_zero();
    let (n, d) = (num.abs(), den.abs());
    let scaled: BigInt = n * BigInt::from(1_000_000u32) * 2 + &d;
    let rounded = scaled.div_floor(&(d * 2));
    let (int_part, frac) = rounded.div_rem(&BigInt::from(1_000_000u32));
    format!(
        "{}{}.{:06}",
        if negative { "-" } else { "" },
        int_part,
        frac.to_u64().unwrap_or(0)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering_rounds_half_up() {
        let r = |n: i64, d: i64| decimal6(&BigInt::from(n), &BigInt::from(d));
        assert_eq!(r(2, 3), "0.666667");
        assert_eq!(r(1, 3), "0.333333");
        assert_eq!(r(0, 1), "0.000000");
        assert_eq!(r(1, 1), "1.000000");
        assert_eq!(r(1, 2_000_000), "0.000001");
        assert_eq!(r(-1, 4), "-0.250000");
    }

    #[test]
    fn ratio_agrees_across_scalars() {
        let exact = BigRational::from_ratio(5, 8);
        assert_eq!(Scalar::to_f64(&exact), 0.625);
        assert_eq!(<f64 as Scalar>::from_ratio(5, 8), 0.625);
        assert_eq!(<f32 as Scalar>::from_ratio(5, 8), 0.625f32);
    }
}

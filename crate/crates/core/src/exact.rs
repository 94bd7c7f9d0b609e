//! Exact dyadic fractions for enumeration-based oracles.
//!
//! Every quantity produced by exhaustive enumeration over `{0,1}^n` is a count
//! divided by a power of two, so the oracles never touch floating point.
//! Comparisons against arbitrary rational thresholds go through
//! [`num_rational::BigRational`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// `numerator / 2^log2_denominator`, always kept in lowest terms.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Dyadic {
    numerator: u128,
    log2_denominator: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { numerator: 0, log2_denominator: 0 };
    pub const ONE: Dyadic = Dyadic { numerator: 1, log2_denominator: 0 };

    pub fn new(numerator: u128, log2_denominator: u32) -> Self {
        let mut d = Dyadic { numerator, log2_denominator };
        d.reduce();
        d
    }

    fn reduce(&mut self) {
        if self.numerator == 0 {
            self.log2_denominator = 0;
            return;
        }
        let shift = self.numerator.trailing_zeros().min(self.log2_denominator);
        self.numerator >>= shift;
        self.log2_denominator -= shift;
    }

    pub fn numerator(&self) -> u128 {
        self.numerator
    }

    pub fn log2_denominator(&self) -> u32 {
        self.log2_denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    /// Halves the value exactly.
    pub fn half(self) -> Self {
        Dyadic::new(self.numerator, self.log2_denominator + 1)
    }

    /// Numerator rescaled to denominator `2^log2`; `None` if `log2` is too small.
    pub fn numerator_at(&self, log2: u32) -> Option<u128> {
        if log2 < self.log2_denominator {
            return None;
        }
        self.numerator.checked_shl(log2 - self.log2_denominator)
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / 2f64.powi(self.log2_denominator as i32)
    }

    pub fn to_ratio(&self) -> BigRational {
        let den = BigInt::from(BigUint::one() << self.log2_denominator as usize);
        BigRational::new(BigInt::from(self.numerator), den)
    }

    /// Exact comparison against an arbitrary rational.
    pub fn cmp_ratio(&self, other: &BigRational) -> Ordering {
        self.to_ratio().cmp(other)
    }

    /// Exact comparison against the binary value of an `f64`.
    pub fn cmp_f64(&self, other: f64) -> Ordering {
        match BigRational::from_float(other) {
            Some(r) => self.cmp_ratio(&r),
            None if other.is_nan() => panic!("comparison against NaN"),
            None if other > 0.0 => Ordering::Less,
            None => Ordering::Greater,
        }
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let k = self.log2_denominator.max(other.log2_denominator);
        match (self.numerator_at(k), other.numerator_at(k)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.to_ratio().cmp(&other.to_ratio()),
        }
    }
}

impl std::ops::Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let k = self.log2_denominator.max(rhs.log2_denominator);
        let a = self.numerator_at(k).expect("dyadic overflow");
        let b = rhs.numerator_at(k).expect("dyadic overflow");
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), k)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_denominator == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/2^{}", self.numerator, self.log2_denominator)
        }
    }
}

/// Exact test of `count <= s * log2(x)` for rational `x > 0`, i.e.
/// `2^count <= x^s`.
pub fn count_le_s_log2(count: usize, s: usize, x: &BigRational) -> bool {
    if x <= &BigRational::zero() {
        return false;
    }
    let lhs = BigRational::from_integer(BigInt::one() << count);
    let mut rhs = BigRational::one();
    for _ in 0..s {
        rhs *= x;
    }
    lhs <= rhs
}

/// Exact test of `degree > log2(x)` for rational `x > 0`, i.e. `2^degree > x`.
pub fn degree_gt_log2(degree: usize, x: &BigRational) -> bool {
    BigRational::from_integer(BigInt::one() << degree) > *x
}

/// Exact rational view of an `f64` parameter.
pub fn ratio_of(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite parameter")
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_lowest_terms() {
        let d = Dyadic::new(12, 4);
        assert_eq!(d.numerator(), 3);
        assert_eq!(d.log2_denominator(), 2);
        assert_eq!(Dyadic::new(0, 9).log2_denominator(), 0);
    }

    #[test]
    fn ordering_across_denominators() {
        assert!(Dyadic::new(1, 1) > Dyadic::new(3, 3));
        assert_eq!(Dyadic::new(2, 2), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(3, 3) + Dyadic::new(1, 3), Dyadic::new(1, 1));
        assert_eq!(Dyadic::new(5, 4) + Dyadic::new(3, 2), Dyadic::new(17, 4));
    }

    #[test]
    fn rational_comparisons() {
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(Dyadic::new(1, 2).cmp_ratio(&third), Ordering::Less);
        assert_eq!(Dyadic::new(3, 3).cmp_ratio(&third), Ordering::Greater);
        assert_eq!(Dyadic::new(1, 3).cmp_f64(0.125), Ordering::Equal);
    }

    #[test]
    fn log_comparisons_are_exact() {
        // 3 <= 1 * log2(8) holds with equality
        assert!(count_le_s_log2(3, 1, &ratio_of(8.0)));
        assert!(!count_le_s_log2(4, 1, &ratio_of(8.0)));
        // degree 3 > log2(7.9) but not > log2(8)
        assert!(degree_gt_log2(3, &ratio_of(7.9)));
        assert!(!degree_gt_log2(3, &ratio_of(8.0)));
    }
}

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::CombinatoricsError;

/// An exact rational number optionally carrying the symbolic factor `(4π²/Vol)^m`.
///
/// The rational part is always kept in lowest terms with a positive denominator
/// (guaranteed by [`BigRational`]). Two values can only be added when their
/// monomial exponents agree; zero is compatible with every exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactScalar {
    coefficient: BigRational,
    monomial_exponent: i32,
}

impl ExactScalar {
    pub fn new(coefficient: BigRational, monomial_exponent: i32) -> Self {
        if coefficient.is_zero() {
            return Self::zero();
        }
        Self {
            coefficient,
            monomial_exponent,
        }
    }

    /// A plain rational, no symbolic factor.
    pub fn rational(coefficient: BigRational) -> Self {
        Self::new(coefficient, 0)
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(value: i64) -> Self {
        Self::from_ratio(value, 1)
    }

    pub fn zero() -> Self {
        Self {
            coefficient: BigRational::zero(),
            monomial_exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.coefficient
    }

    pub fn monomial_exponent(&self) -> i32 {
        self.monomial_exponent
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CombinatoricsError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.monomial_exponent != other.monomial_exponent {
            return Err(CombinatoricsError::MonomialMismatch {
                left: self.monomial_exponent,
                right: other.monomial_exponent,
            });
        }
        Ok(Self::new(
            &self.coefficient + &other.coefficient,
            self.monomial_exponent,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, CombinatoricsError> {
        self.checked_add(&-other.clone())
    }

    /// Multiplies the rational part only.
    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::new(&self.coefficient * factor, self.monomial_exponent)
    }

    /// Rational part rounded to the nearest `f64`.
    pub fn coefficient_f64(&self) -> f64 {
        ratio_to_f64(&self.coefficient)
    }

    /// Numerical value once `Vol` is substituted.
    pub fn to_f64(&self, vol: f64) -> f64 {
        let base = 4.0 * std::f64::consts::PI * std::f64::consts::PI / vol;
        self.coefficient_f64() * base.powi(self.monomial_exponent)
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;

    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.coefficient, self.monomial_exponent)
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;

    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(
            &self.coefficient * &rhs.coefficient,
            self.monomial_exponent + rhs.monomial_exponent,
        )
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomial_exponent == 0 {
            write!(f, "{}", self.coefficient)
        } else {
            write!(
                f,
                "{}*(4pi^2/Vol)^{}",
                self.coefficient, self.monomial_exponent
            )
        }
    }
}

/// Round-to-nearest conversion of an exact rational.
pub fn ratio_to_f64(value: &BigRational) -> f64 {
    if let Some(v) = value.to_f64() {
        return v;
    }
    // Fallback for magnitudes the direct conversion rejects.
    let sign = if value.is_negative() { -1.0 } else { 1.0 };
    let numer = value.numer().abs();
    let denom = value.denom().clone();
    let shift = numer.bits() as i64 - denom.bits() as i64;
    let scaled = if shift > 0 {
        BigRational::new(numer, denom << (shift as usize))
    } else {
        BigRational::new(numer << ((-shift) as usize), denom)
    };
    sign * scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

pub(crate) fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub(crate) fn rational_pow(base: &BigRational, exponent: u32) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..exponent {
        out *= base;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let x = ExactScalar::from_ratio(6, -4);
        assert_eq!(x.coefficient().numer(), &BigInt::from(-3));
        assert_eq!(x.coefficient().denom(), &BigInt::from(2));
    }

    #[test]
    fn addition_requires_matching_monomial() {
        let a = ExactScalar::new(rational(1, 2), 1);
        let b = ExactScalar::new(rational(1, 3), 2);
        assert!(matches!(
            a.checked_add(&b),
            Err(CombinatoricsError::MonomialMismatch { left: 1, right: 2 })
        ));
        let c = a.checked_add(&ExactScalar::new(rational(1, 3), 1)).unwrap();
        assert_eq!(c, ExactScalar::new(rational(5, 6), 1));
        // zero is neutral regardless of exponent
        assert_eq!(a.checked_add(&ExactScalar::zero()).unwrap(), a);
    }

    #[test]
    fn numeric_value_substitutes_volume() {
        let x = ExactScalar::new(rational(1, 25), 1);
        let vol = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        assert!((x.to_f64(vol) - 0.04).abs() < 1e-15);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(ExactScalar::new(rational(2, 175), 1).to_string(), "2/175*(4pi^2/Vol)^1");
        assert_eq!(ExactScalar::from_integer(3).to_string(), "3");
    }
}

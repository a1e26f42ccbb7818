use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Arbitrary-precision rational; always stored in lowest terms with a positive denominator.
pub type ExactScalar = BigRational;

pub fn exact_int(v: i128) -> ExactScalar {
    BigRational::from_integer(BigInt::from(v))
}

pub fn exact_ratio(num: i128, den: i128) -> ExactScalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `num/den`, or just `num` when the denominator is one.
pub fn format_exact(x: &ExactScalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn exact_to_f64(x: &ExactScalar) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator or denominator outside f64 range; scale through logs
        let n = x.numer().abs();
        let d = x.denom();
        let bits = n.bits() as i64 - d.bits() as i64;
        let shift = bits.max(0) as usize;
        let scaled = BigRational::new(n, d.clone() << shift);
        let v = scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32);
        if x.is_negative() {
            -v
        } else {
            v
        }
    })
}

/// A value computed either exactly (integer-valued inputs) or in floating point.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(ExactScalar),
    Real(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(x) => exact_to_f64(x),
            Scalar::Real(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&ExactScalar> {
        match self {
            Scalar::Exact(x) => Some(x),
            Scalar::Real(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(x) => x.is_zero(),
            Scalar::Real(x) => *x == 0.0,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(x) => f.write_str(&format_exact(x)),
            Scalar::Real(x) => f.write_str(&format_real(*x)),
        }
    }
}

/// Exact values serialize as `"num/den"` strings, reals as JSON numbers.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(x) => s.serialize_str(&format_exact(x)),
            Scalar::Real(x) => s.serialize_f64(*x),
        }
    }
}

/// Twelve significant digits, the output convention for all reports and tables.
pub fn format_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{:.11e}", x);
    // normalize "1.23400000000e5" to the shortest form that still carries 12 digits
    let v: f64 = s.parse().unwrap_or(x);
    let abs = v.abs();
    if (1e-5..1e15).contains(&abs) {
        let digits = 11 - abs.log10().floor() as i32;
        let t = format!("{:.*}", digits.max(0) as usize, v);
        if t.contains('.') {
            t.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            t
        }
    } else {
        s
    }
}

/// Generalized binomial coefficient x(x-1)...(x-j+1)/j! for integer x of any sign.
pub fn gen_binomial(x: i64, j: u32) -> ExactScalar {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..i64::from(j) {
        num *= BigInt::from(x - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn factorial_f64(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * f64::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gen_binomial_examples() {
        assert_eq!(gen_binomial(-2, 1), exact_int(-2));
        assert_eq!(gen_binomial(-2, 2), exact_int(3));
        assert_eq!(gen_binomial(17, 0), exact_int(1));
        assert_eq!(gen_binomial(-5, 0), exact_int(1));
        assert_eq!(gen_binomial(5, 7), exact_int(0));
        // (-1)^j C(m + j - 1, j) for negative arguments
        assert_eq!(gen_binomial(-4, 3), exact_int(-20));
    }

    #[test]
    fn exact_formatting() {
        assert_eq!(format_exact(&exact_ratio(6, 4)), "3/2");
        assert_eq!(format_exact(&exact_ratio(-6, 3)), "-2");
        assert_eq!(Scalar::Exact(exact_ratio(1, 3)).to_string(), "1/3");
    }

    #[test]
    fn real_formatting_keeps_twelve_digits() {
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_real(-0.125), "-0.125");
        assert_eq!(format_real(123456.0), "123456");
        assert!(format_real(1.5e-9).contains('e'));
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigRational::new(BigInt::from(10).pow(400), BigInt::from(10).pow(398));
        assert!((exact_to_f64(&big) - 100.0).abs() < 1e-9);
    }
}

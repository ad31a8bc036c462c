//! Exact complex-rational scalars.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// A Gaussian rational `a + bi` with exact `a, b ∈ Q`.
pub type Scalar = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn real(r: Rational) -> Scalar {
    Complex::new(r, Rational::zero())
}

pub fn sc(num: i64, den: i64) -> Scalar {
    real(rat(num, den))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn is_real_nonnegative(s: &Scalar) -> bool {
    s.im.is_zero() && !s.re.is_negative()
}

/// `ω^k` for `ω = e^{2πi/order}`, available when the root of unity is Gaussian rational.
pub fn root_of_unity(order: u64, k: i64) -> Result<Scalar> {
    let k = k.rem_euclid(order as i64) as u64;
    match (order, k) {
        (1, _) | (2, 0) | (4, 0) => Ok(one()),
        (2, 1) | (4, 2) => Ok(sc(-1, 1)),
        (4, 1) => Ok(Complex::new(Rational::zero(), Rational::one())),
        (4, 3) => Ok(Complex::new(Rational::zero(), -Rational::one())),
        _ => Err(Error::Unsupported(format!(
            "roots of unity of order {order} are not Gaussian rational"
        ))),
    }
}

/// `"num/den"`, or `"num"` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Real scalars print as a rational; others as `"a+bi"`.
pub fn fmt_scalar(s: &Scalar) -> String {
    if s.im.is_zero() {
        return fmt_rational(&s.re);
    }
    let im = if s.im.is_negative() {
        format!("-{}", fmt_rational(&-s.im.clone()))
    } else {
        format!("+{}", fmt_rational(&s.im))
    };
    if s.re.is_zero() {
        format!("{}i", im.trim_start_matches('+'))
    } else {
        format!("{}{}i", fmt_rational(&s.re), im)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("`{t}`: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("`{s}`: zero denominator")));
            }
            Ok(BigRational::new(parse(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse(s)?)),
    }
}

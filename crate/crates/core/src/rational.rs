//! Exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Rational = BigRational;

pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `1 / k!`
pub fn inv_factorial(k: u32) -> Rational {
    let mut f = BigInt::one();
    for i in 2..=k {
        f *= i;
    }
    Rational::new(BigInt::one(), f)
}

/// Coefficients of `s / (e^s - 1)` through `s^max`: `B_k / k!`.
pub fn bernoulli_series(max: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = vec![one()];
    for k in 1..=max {
        let c = (0..k)
            .map(|j| &b[j] * inv_factorial((k - j + 1) as u32))
            .fold(zero(), |acc, t| acc + t);
        b.push(-c);
    }
    b
}

/// Parse a rational from decimal numerator and denominator strings.
pub fn parse(num: &str, den: &str) -> Option<Rational> {
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

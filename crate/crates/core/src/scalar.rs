//! One-variable power series without constant term, such as Duflo functions.

use num_traits::{One, Zero};

use crate::error::{AlgebraError, Result};
use crate::rational::{self, Rational};

/// `Σ_{k=1}^{K} c_k s^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarSeries {
    /// `coeffs[k-1] = c_k`
    coeffs: Vec<Rational>,
}

impl ScalarSeries {
    pub fn zero(max_degree: usize) -> Self {
        ScalarSeries {
            coeffs: vec![Rational::zero(); max_degree],
        }
    }

    /// Coefficients `c_1..c_K`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        ScalarSeries { coeffs }
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> Rational {
        if k == 0 {
            return Rational::zero();
        }
        self.coeffs
            .get(k - 1)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn set_coeff(&mut self, k: usize, c: Rational) -> Result<()> {
        if k == 0 {
            return Err(AlgebraError::InvalidParameters(
                "scalar series have no constant term".into(),
            ));
        }
        if k > self.coeffs.len() {
            self.coeffs.resize(k, Rational::zero());
        }
        self.coeffs[k - 1] = c;
        Ok(())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Nonzero `(k, c_k)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i + 1, c))
    }

    pub fn truncated(&self, max_degree: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(max_degree, Rational::zero());
        ScalarSeries { coeffs: c }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        ScalarSeries {
            coeffs: (1..=n).map(|k| self.coeff(k) + other.coeff(k)).collect(),
        }
    }

    /// Even-indexed coefficients `c_2, c_4, …` up to `s^max`.
    pub fn even_part(&self, max: usize) -> Vec<Rational> {
        (2..=max).step_by(2).map(|k| self.coeff(k)).collect()
    }

    /// `log(s / (e^s - 1))` through `s^max_degree`.
    pub fn r_series(max_degree: usize) -> Self {
        let n = max_degree + 1;
        // (e^s - 1)/s = Σ s^k/(k+1)!
        let denom: Vec<Rational> = (0..n)
            .map(|k| rational::inv_factorial(k as u32 + 1))
            .collect();
        let quotient = inverse(&denom);
        let l = log_one_plus(&quotient);
        ScalarSeries {
            coeffs: l[1..].to_vec(),
        }
    }
}

/// Inverse of a power series with constant term 1, same length.
fn inverse(a: &[Rational]) -> Vec<Rational> {
    let n = a.len();
    let mut b = vec![Rational::zero(); n];
    b[0] = Rational::one() / &a[0];
    for k in 1..n {
        let mut s = Rational::zero();
        for i in 1..=k {
            s += &a[i] * &b[k - i];
        }
        b[k] = -s / &a[0];
    }
    b
}

/// `log(a)` for `a` with constant term 1, via `a' / a` integrated.
fn log_one_plus(a: &[Rational]) -> Vec<Rational> {
    let n = a.len();
    let inv = inverse(a);
    let deriv: Vec<Rational> = (1..n).map(|k| &a[k] * rational::int(k as i64)).collect();
    let mut out = vec![Rational::zero(); n];
    for k in 1..n {
        // coefficient of s^{k-1} in a'/a
        let mut s = Rational::zero();
        for i in 0..k {
            s += &deriv[i] * &inv[k - 1 - i];
        }
        out[k] = s / rational::int(k as i64);
    }
    out
}

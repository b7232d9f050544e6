//! Rational probability generating functions.
//!
//! A [`RationalPgf`] is a ratio of two real polynomials in `s`, stored as
//! coefficient vectors in ascending powers. All the generating functions of
//! the preemptive-ARQ age model are rational (geometric building blocks), so
//! closed arithmetic on this representation is exact up to floating point,
//! and the probability mass function is recovered by expanding the power
//! series of the ratio with a linear recurrence instead of a numerical
//! inverse transform.

use crate::error::{Error, Result};

/// Ratio of two real polynomials, normalized so `den[0] == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPgf {
    num: Vec<f64>,
    den: Vec<f64>,
}

fn poly_trim(p: &mut Vec<f64>) {
    while p.len() > 1 && *p.last().unwrap() == 0.0 {
        p.pop();
    }
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn poly_scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|&x| c * x).collect()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Neumaier-compensated sum; the near-cancelling coefficient sums that show
/// up when evaluating normalized PGFs at s = 1 need better than plain
/// sequential accumulation.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn poly_eval(p: &[f64], s: f64) -> f64 {
    if s == 1.0 {
        return compensated_sum(p.iter().cloned());
    }
    p.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

/// Evaluate the derivative of `p` at `s`.
fn poly_deriv_eval(p: &[f64], s: f64) -> f64 {
    if s == 1.0 {
        return compensated_sum(p.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c));
    }
    p.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (i, &c)| acc * s + i as f64 * c)
}

impl RationalPgf {
    /// Builds a rational function from raw coefficient vectors (ascending
    /// powers) and normalizes it: trailing zeros are trimmed, low-order zero
    /// coefficients shared by numerator and denominator are cancelled, and
    /// both polynomials are divided by the denominator's constant term.
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        let mut g = RationalPgf { num, den };
        g.normalize()?;
        Ok(g)
    }

    /// A polynomial (denominator 1).
    pub fn from_poly(num: Vec<f64>) -> Self {
        let mut num = num;
        poly_trim(&mut num);
        if num.is_empty() {
            num.push(0.0);
        }
        RationalPgf {
            num,
            den: vec![1.0],
        }
    }

    /// The constant function `c`.
    pub fn constant(c: f64) -> Self {
        Self::from_poly(vec![c])
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|&c| c == 0.0)
    }

    fn normalize(&mut self) -> Result<()> {
        poly_trim(&mut self.num);
        poly_trim(&mut self.den);
        if self.num.is_empty() {
            self.num.push(0.0);
        }
        if self.den.iter().all(|&c| c == 0.0) {
            return Err(Error::Arithmetic("denominator is identically zero".into()));
        }
        if self.is_zero() {
            self.num = vec![0.0];
            self.den = vec![1.0];
            return Ok(());
        }
        // Cancel a shared factor s^j (exact zeros only; these arise
        // structurally, e.g. when dividing by a PGF with G(0) = 0).
        while self.num[0] == 0.0 && self.den[0] == 0.0 && self.num.len() > 1 && self.den.len() > 1 {
            self.num.remove(0);
            self.den.remove(0);
        }
        let d0 = self.den[0];
        if d0 == 0.0 {
            return Err(Error::Arithmetic(
                "denominator has zero constant term (pole at s = 0)".into(),
            ));
        }
        if d0 != 1.0 {
            for c in &mut self.num {
                *c /= d0;
            }
            for c in &mut self.den {
                *c /= d0;
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &RationalPgf) -> Result<RationalPgf> {
        RationalPgf::new(
            poly_add(
                &poly_mul(&self.num, &other.den),
                &poly_mul(&other.num, &self.den),
            ),
            poly_mul(&self.den, &other.den),
        )
    }

    pub fn sub(&self, other: &RationalPgf) -> Result<RationalPgf> {
        self.add(&other.scale(-1.0)?)
    }

    pub fn mul(&self, other: &RationalPgf) -> Result<RationalPgf> {
        RationalPgf::new(
            poly_mul(&self.num, &other.num),
            poly_mul(&self.den, &other.den),
        )
    }

    /// Divides by `other`.
    ///
    /// Fails with an arithmetic error when `other` is identically zero, or
    /// when the quotient has a pole at `s = 0` that does not cancel.
    pub fn div(&self, other: &RationalPgf) -> Result<RationalPgf> {
        if other.is_zero() {
            return Err(Error::Arithmetic(
                "division by identically-zero function".into(),
            ));
        }
        RationalPgf::new(
            poly_mul(&self.num, &other.den),
            poly_mul(&self.den, &other.num),
        )
    }

    pub fn scale(&self, c: f64) -> Result<RationalPgf> {
        RationalPgf::new(poly_scale(&self.num, c), self.den.clone())
    }

    pub fn eval(&self, s: f64) -> f64 {
        poly_eval(&self.num, s) / poly_eval(&self.den, s)
    }

    /// Derivative d/ds evaluated at `s` (quotient rule). At `s = 1` this is
    /// the mean of the distribution the PGF represents.
    pub fn derivative_at(&self, s: f64) -> f64 {
        let n = poly_eval(&self.num, s);
        let d = poly_eval(&self.den, s);
        let np = poly_deriv_eval(&self.num, s);
        let dp = poly_deriv_eval(&self.den, s);
        (np * d - n * dp) / (d * d)
    }

    /// Power-series coefficients `c_0 ..= c_m`.
    ///
    /// With `den[0] == 1`, the coefficients satisfy the linear recurrence
    /// `c_i = num_i - sum_{j=1..deg(den)} den_j * c_{i-j}`, which expands the
    /// series exactly (to floating precision) for any truncation order.
    pub fn series(&self, m: usize) -> Vec<f64> {
        debug_assert_eq!(self.den[0], 1.0);
        let mut c = vec![0.0; m + 1];
        for i in 0..=m {
            let mut v = if i < self.num.len() { self.num[i] } else { 0.0 };
            for j in 1..self.den.len().min(i + 1) {
                v -= self.den[j] * c[i - j];
            }
            c[i] = v;
        }
        c
    }
}

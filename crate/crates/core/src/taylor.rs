//! Truncated univariate Taylor series.
//!
//! A `Taylor` of order `K` stores normalized coefficients `t[k] = f^(k)(x0) / k!`
//! for `k = 0..=K`. Elementary functions use the standard recurrences obtained
//! from `f' = phi * a'`, which keep every coefficient exact up to rounding.

use std::ops::{Add, Mul, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Taylor {
    coeffs: Vec<f64>,
}

impl Taylor {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// The independent variable expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut t = Self::constant(x0, order);
        if order >= 1 {
            t.coeffs[1] = 1.0;
        }
        t
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a Taylor series needs at least one coefficient");
        Self { coeffs }
    }

    /// Build from plain derivative values `(f, f', ..., f^(K))`.
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                d / fact
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Plain derivative values `(f, f', ..., f^(K))`.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn offset(&self, s: f64) -> Self {
        let mut t = self.clone();
        t.coeffs[0] += s;
        t
    }

    pub fn powi(&self, power: u32) -> Self {
        let mut out = Self::constant(1.0, self.order());
        for _ in 0..power {
            out = &out * self;
        }
        out
    }

    /// Series of `f(a(x))` given `f(a0)` and the series of `f'(a(x))` computed
    /// lazily from the already-known output coefficients.
    fn compose(&self, f0: f64, mut phi: impl FnMut(&[f64], usize) -> f64) -> Self {
        let order = self.order();
        let a = &self.coeffs;
        let mut out = vec![0.0; order + 1];
        out[0] = f0;
        let mut phis = Vec::with_capacity(order);
        for k in 1..=order {
            phis.push(phi(&out[..k], k - 1));
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * phis[k - j];
            }
            out[k] = acc / k as f64;
        }
        Self::from_coeffs(out)
    }

    pub fn exp(&self) -> Self {
        let e0 = self.coeffs[0].exp();
        // exp' = exp
        self.compose(e0, |f, m| f[m])
    }

    pub fn ln(&self) -> Self {
        let order = self.order();
        let a = &self.coeffs;
        let mut out = vec![0.0; order + 1];
        out[0] = a[0].ln();
        for k in 1..=order {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * out[j] * a[k - j];
            }
            out[k] = (a[k] - acc / k as f64) / a[0];
        }
        Self::from_coeffs(out)
    }

    pub fn sigmoid(&self) -> Self {
        self.compose(sigmoid(self.coeffs[0]), sigmoid_phi)
    }

    pub fn tanh(&self) -> Self {
        self.compose(self.coeffs[0].tanh(), tanh_phi)
    }

    /// `ln(1 + e^a)`, whose derivative is `sigmoid(a)`.
    pub fn softplus(&self) -> Self {
        let s = self.sigmoid();
        self.compose(softplus(self.coeffs[0]), |_, m| s.coeffs[m])
    }
}

/// `m`-th coefficient of `s - s^2` from the coefficients of `s`.
pub(crate) fn sigmoid_phi(s: &[f64], m: usize) -> f64 {
    let mut sq = 0.0;
    for i in 0..=m {
        sq += s[i] * s[m - i];
    }
    s[m] - sq
}

/// `m`-th coefficient of `1 - t^2` from the coefficients of `t`.
pub(crate) fn tanh_phi(t: &[f64], m: usize) -> f64 {
    let mut sq = 0.0;
    for i in 0..=m {
        sq += t[i] * t[m - i];
    }
    if m == 0 {
        1.0 - sq
    } else {
        -sq
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl<'a> Add<&'a Taylor> for &'a Taylor {
    type Output = Taylor;

    fn add(self, rhs: &'a Taylor) -> Taylor {
        assert_eq!(self.order(), rhs.order());
        Taylor::from_coeffs(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a Taylor> for &'a Taylor {
    type Output = Taylor;

    fn sub(self, rhs: &'a Taylor) -> Taylor {
        assert_eq!(self.order(), rhs.order());
        Taylor::from_coeffs(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect())
    }
}

impl<'a> Mul<&'a Taylor> for &'a Taylor {
    type Output = Taylor;

    fn mul(self, rhs: &'a Taylor) -> Taylor {
        assert_eq!(self.order(), rhs.order());
        let order = self.order();
        let coeffs = (0..=order)
            .map(|k| (0..=k).map(|j| self.coeffs[j] * rhs.coeffs[k - j]).sum())
            .collect();
        Taylor::from_coeffs(coeffs)
    }
}

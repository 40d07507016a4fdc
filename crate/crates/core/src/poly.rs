//! Dense real-coefficient polynomials.
//!
//! Coefficients are stored in ascending power order, so `coeffs[k]` multiplies
//! `x^k`. Every constructor and arithmetic operation trims trailing coefficients
//! that are exactly zero; the zero polynomial is stored as `[0.0]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monic linear factor `x - root`.
    pub fn linear_factor(root: f64) -> Self {
        Self::new(vec![-root, 1.0])
    }

    /// `(x - root)^power`.
    pub fn root_power(root: f64, power: u32) -> Self {
        Self::linear_factor(root).pow(power)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    /// Degree of the polynomial. The zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// The `k`-th formal derivative.
    pub fn derive(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        if k > self.degree() {
            return Self::zero();
        }
        let coeffs = (k..self.coeffs.len())
            .map(|p| {
                // p * (p-1) * ... * (p-k+1)
                let falling = ((p - k + 1)..=p).fold(1.0, |acc, m| acc * m as f64);
                self.coeffs[p] * falling
            })
            .collect();
        Self::new(coeffs)
    }

    /// Value of the `k`-th derivative at `x` without materializing it.
    pub fn eval_derivative(&self, k: usize, x: f64) -> f64 {
        if k > self.degree() {
            return 0.0;
        }
        let mut acc = 0.0;
        for p in (k..self.coeffs.len()).rev() {
            let falling = ((p - k + 1)..=p).fold(1.0, |f, m| f * m as f64);
            acc = acc * x + self.coeffs[p] * falling;
        }
        acc
    }

    /// Values `(p(x), p'(x), ..., p^(order)(x))`.
    pub fn derivatives_at(&self, x: f64, order: usize) -> Vec<f64> {
        (0..=order).map(|k| self.eval_derivative(k, x)).collect()
    }

    /// Sum of `|c_k| |x|^k` over the `k`-th derivative's coefficients; the
    /// magnitude scale against which a computed `eval_derivative` is rounding noise.
    pub fn derivative_scale(&self, k: usize, x: f64) -> f64 {
        if k > self.degree() {
            return 0.0;
        }
        let ax = x.abs();
        let mut acc = 0.0;
        for p in (k..self.coeffs.len()).rev() {
            let falling = ((p - k + 1)..=p).fold(1.0, |f, m| f * m as f64);
            acc = acc * ax + (self.coeffs[p] * falling).abs();
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, power: u32) -> Self {
        let mut result = Self::one();
        for _ in 0..power {
            result = &result * self;
        }
        result
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Default for Polynomial {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 && !(self.is_zero() && k == 0) {
                continue;
            }
            if !first {
                f.write_str(if c < 0.0 { " - " } else { " + " })?;
            } else if c < 0.0 {
                f.write_str("-")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}x")?,
                _ => write!(f, "{a}x^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let out = (0..len)
            .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + rhs.coeffs.get(k).unwrap_or(&0.0))
            .collect();
        Polynomial::new(out)
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Product of all polynomials yielded by `iter`; the empty product is one.
pub fn product<'a>(iter: impl IntoIterator<Item = &'a Polynomial>) -> Polynomial {
    iter.into_iter().fold(Polynomial::one(), |acc, p| &acc * p)
}

/// A scaled product of root powers, `scale * prod (x - root)^power`.
///
/// Construction polynomials are kept in this form for evaluation: a factor
/// whose root coincides with the evaluation point contributes exact zeros to
/// every derivative below its power, which the expanded coefficients cannot
/// reproduce in floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredPoly {
    scale: f64,
    factors: Vec<(f64, u32)>,
}

impl FactoredPoly {
    pub fn new(scale: f64, factors: Vec<(f64, u32)>) -> Self {
        Self { scale, factors }
    }

    pub fn constant(scale: f64) -> Self {
        Self::new(scale, Vec::new())
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn factors(&self) -> &[(f64, u32)] {
        &self.factors
    }

    pub fn with_scale(&self, scale: f64) -> Self {
        Self::new(scale, self.factors.clone())
    }

    pub fn times_factor(&self, root: f64, power: u32) -> Self {
        let mut factors = self.factors.clone();
        factors.push((root, power));
        Self::new(self.scale, factors)
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|&(_, p)| p as usize).sum()
    }

    pub fn expand(&self) -> Polynomial {
        let mut out = Polynomial::constant(self.scale);
        for &(root, power) in &self.factors {
            out = &out * &Polynomial::root_power(root, power);
        }
        out
    }

    /// Normalized Taylor coefficients `p^(k)(x) / k!` for `k = 0..=order`.
    pub fn taylor_at(&self, x: f64, order: usize) -> Vec<f64> {
        self.taylor_impl(x, order, false)
    }

    /// Same as `taylor_at` with every quantity replaced by its absolute value;
    /// bounds the magnitudes that cancel inside `taylor_at`.
    pub fn taylor_magnitude_at(&self, x: f64, order: usize) -> Vec<f64> {
        self.taylor_impl(x, order, true)
    }

    fn taylor_impl(&self, x: f64, order: usize, magnitude: bool) -> Vec<f64> {
        let mut acc = vec![0.0; order + 1];
        acc[0] = if magnitude { self.scale.abs() } else { self.scale };
        let mut factor = vec![0.0; order + 1];
        let mut next = vec![0.0; order + 1];
        for &(root, power) in &self.factors {
            let d = if magnitude { (x - root).abs() } else { x - root };
            // (d + h)^power = sum_k C(power, k) d^(power-k) h^k
            for (k, f) in factor.iter_mut().enumerate() {
                *f = if k as u32 > power {
                    0.0
                } else {
                    binomial(power as usize, k) * d.powi((power - k as u32) as i32)
                };
            }
            for k in 0..=order {
                next[k] = (0..=k).map(|j| acc[j] * factor[k - j]).sum();
            }
            std::mem::swap(&mut acc, &mut next);
        }
        acc
    }

    /// Plain derivative values `(p(x), p'(x), ..., p^(order)(x))`.
    pub fn derivatives_at(&self, x: f64, order: usize) -> Vec<f64> {
        let mut t = self.taylor_at(x, order);
        let mut fact = 1.0;
        for (k, c) in t.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            *c *= fact;
        }
        t
    }
}

/// Binomial coefficient as a float; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out.round()
}

//! Trial solutions `u(x) = fixed(x) + multiplier(x) * N(x)` that satisfy a set
//! of derivative conditions exactly, whatever the network `N` outputs.
//!
//! The general engine is [`build_case4`], which handles any mix of derivative
//! orders. [`build_case1`] (all values), [`build_case2`] (all top-order
//! derivatives) and [`build_case3`] (one condition per order) compute the
//! same polynomials through their own closed forms and are checked against
//! the general engine in the tests.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mlp::Jet;
use crate::poly::{binomial, FactoredPoly, Polynomial};
use crate::taylor::Taylor;
use crate::MAX_ORDER;

/// `d^order u / dx^order (point) = value`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintSpec {
    pub order: usize,
    pub point: f64,
    pub value: f64,
}

impl ConstraintSpec {
    pub fn new(order: usize, point: f64, value: f64) -> Self {
        Self { order, point, value }
    }

    /// `u(point) = value`.
    pub fn value_at(point: f64, value: f64) -> Self {
        Self::new(0, point, value)
    }
}

/// The factor `g(x - a)` multiplying the network output in a first-order trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisForm {
    /// `c (x - a)`
    Polynomial { c: f64 },
    /// `1 - e^{-(x - a)}`
    Exponential,
    /// `tanh(x - a)`
    Hyperbolic,
    /// `log_base(x + 1 - a)`
    Logarithmic { base: f64 },
    /// `sigma(x - a) - 1/2`
    Logistic,
    /// `(x - a) sigma(x - a)`
    Sigmoid,
    /// `ln(1 + e^{x - a}) - ln 2`
    Softplus,
}

impl BasisForm {
    pub const NAMES: [&'static str; 7] = [
        "polynomial",
        "exponential",
        "hyperbolic",
        "logarithmic",
        "logistic",
        "sigmoid",
        "softplus",
    ];

    /// Parse a form name, taking the polynomial coefficient and logarithm base
    /// from the arguments.
    pub fn from_name(name: &str, coefficient: f64, log_base: f64) -> Result<Self> {
        let form = match name {
            "polynomial" => BasisForm::Polynomial { c: coefficient },
            "exponential" => BasisForm::Exponential,
            "hyperbolic" => BasisForm::Hyperbolic,
            "logarithmic" | "logarithm" => BasisForm::Logarithmic { base: log_base },
            "logistic" => BasisForm::Logistic,
            "sigmoid" => BasisForm::Sigmoid,
            "softplus" => BasisForm::Softplus,
            other => return Err(Error::BadParameter(format!("unknown basis form `{other}`"))),
        };
        form.validate()?;
        Ok(form)
    }

    /// All seven forms with the given polynomial coefficient and logarithm base.
    pub fn all(coefficient: f64, log_base: f64) -> Vec<Self> {
        vec![
            BasisForm::Polynomial { c: coefficient },
            BasisForm::Exponential,
            BasisForm::Hyperbolic,
            BasisForm::Logarithmic { base: log_base },
            BasisForm::Logistic,
            BasisForm::Sigmoid,
            BasisForm::Softplus,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            BasisForm::Polynomial { .. } => "polynomial",
            BasisForm::Exponential => "exponential",
            BasisForm::Hyperbolic => "hyperbolic",
            BasisForm::Logarithmic { .. } => "logarithmic",
            BasisForm::Logistic => "logistic",
            BasisForm::Sigmoid => "sigmoid",
            BasisForm::Softplus => "softplus",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BasisForm::Polynomial { c } if c == 0.0 || !c.is_finite() => Err(Error::BadParameter(format!(
                "polynomial coefficient must be finite and nonzero, got {c}"
            ))),
            BasisForm::Logarithmic { base } if !(base > 0.0 && base != 1.0 && base.is_finite()) => Err(
                Error::BadParameter(format!("logarithm base must be positive and not 1, got {base}")),
            ),
            _ => Ok(()),
        }
    }

    /// Taylor series of `g(s)` given the series of the shift `s = x - a`.
    pub fn factor_series(&self, s: &Taylor) -> Taylor {
        match *self {
            BasisForm::Polynomial { c } => s.scale(c),
            BasisForm::Exponential => s.scale(-1.0).exp().scale(-1.0).offset(1.0),
            BasisForm::Hyperbolic => s.tanh(),
            BasisForm::Logarithmic { base } => s.offset(1.0).ln().scale(1.0 / base.ln()),
            BasisForm::Logistic => s.sigmoid().offset(-0.5),
            BasisForm::Sigmoid => s * &s.sigmoid(),
            BasisForm::Softplus => {
                let sp = s.softplus();
                let s0 = s.value();
                // ln((1 + e^s) / 2) = ln1p(expm1(s) / 2) vanishes exactly at s = 0
                let v0 = if s0 < 30.0 {
                    (s0.exp_m1() / 2.0).ln_1p()
                } else {
                    sp.value() - LN_2
                };
                let mut c = sp.coeffs().to_vec();
                c[0] = v0;
                Taylor::from_coeffs(c)
            }
        }
    }

    /// Closed-form `g'(a)`.
    pub fn slope_at_anchor(&self) -> f64 {
        match *self {
            BasisForm::Polynomial { c } => c,
            BasisForm::Exponential | BasisForm::Hyperbolic => 1.0,
            BasisForm::Logarithmic { base } => 1.0 / base.ln(),
            BasisForm::Logistic => 0.25,
            BasisForm::Sigmoid | BasisForm::Softplus => 0.5,
        }
    }
}

impl fmt::Display for BasisForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisForm::Polynomial { c } => write!(f, "polynomial(c={c})"),
            BasisForm::Logarithmic { base } => write!(f, "logarithmic(base={base})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for BasisForm {
    type Err = Error;

    /// Plain form name with default parameters (`c = 1`, natural logarithm).
    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s, 1.0, std::f64::consts::E)
    }
}

/// A constructed trial solution.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialForm {
    ode_order: usize,
    fixed_terms: Vec<FactoredPoly>,
    fixed_part: Polynomial,
    multiplier: FactoredPoly,
    multiplier_poly: Polynomial,
    basis: BasisForm,
    anchor: f64,
    multiplicity: u32,
    constraints: Vec<ConstraintSpec>,
}

impl TrialForm {
    fn polynomial(ode_order: usize, fixed_terms: Vec<FactoredPoly>, multiplier: FactoredPoly, constraints: Vec<ConstraintSpec>) -> Self {
        let fixed_part = fixed_terms.iter().fold(Polynomial::zero(), |acc, t| &acc + &t.expand());
        let multiplier_poly = multiplier.expand();
        let anchor = constraints.first().map(|c| c.point).unwrap_or(0.0);
        Self {
            ode_order,
            fixed_terms,
            fixed_part,
            multiplier,
            multiplier_poly,
            basis: BasisForm::Polynomial { c: 1.0 },
            anchor,
            multiplicity: 1,
            constraints,
        }
    }

    pub fn ode_order(&self) -> usize {
        self.ode_order
    }

    pub fn fixed_part(&self) -> &Polynomial {
        &self.fixed_part
    }

    /// Product of the construction factors; with the polynomial basis the
    /// multiplier is `c` times this.
    pub fn multiplier_poly(&self) -> &Polynomial {
        &self.multiplier_poly
    }

    pub fn basis(&self) -> BasisForm {
        self.basis
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    pub fn constraints(&self) -> &[ConstraintSpec] {
        &self.constraints
    }

    /// Scale the multiplier of a polynomial-basis trial by `c`.
    pub fn with_coefficient(mut self, c: f64) -> Result<Self> {
        let basis = BasisForm::Polynomial { c };
        basis.validate()?;
        if !matches!(self.basis, BasisForm::Polynomial { .. }) {
            return Err(Error::BadParameter(format!(
                "a coefficient only applies to the polynomial basis, not {}",
                self.basis
            )));
        }
        self.basis = basis;
        Ok(self)
    }

    /// Reject domains on which the basis factor is undefined.
    pub fn check_domain(&self, lo: f64, hi: f64) -> Result<()> {
        if let BasisForm::Logarithmic { .. } = self.basis {
            if lo + 1.0 - self.anchor <= 0.0 {
                return Err(Error::DomainViolation(format!(
                    "log(x + 1 - {a}) needs x > {}, but the domain [{lo}, {hi}] reaches {lo}",
                    self.anchor - 1.0,
                    a = self.anchor
                )));
            }
        }
        Ok(())
    }

    /// `(F, F', ..., F^(order))` of the fixed part at `x`.
    pub fn fixed_derivatives(&self, x: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; order + 1];
        for term in &self.fixed_terms {
            for (o, d) in out.iter_mut().zip(term.derivatives_at(x, order)) {
                *o += d;
            }
        }
        out
    }

    /// `(M, M', ..., M^(order))` of the full multiplier at `x`.
    pub fn multiplier_derivatives(&self, x: f64, order: usize) -> Vec<f64> {
        match self.basis {
            BasisForm::Polynomial { c } => self
                .multiplier
                .derivatives_at(x, order)
                .into_iter()
                .map(|d| c * d)
                .collect(),
            basis => {
                let mut shift = Taylor::variable(x, order);
                shift = shift.offset(-self.anchor);
                basis.factor_series(&shift).powi(self.multiplicity).derivatives()
            }
        }
    }

    /// `(u, u', ..., u^(n))` for the trial's ODE order `n`.
    pub fn eval(&self, x: f64, jet: &Jet) -> Result<Vec<f64>> {
        if jet.order() < self.ode_order {
            return Err(Error::JetTooShort {
                needed: self.ode_order,
                got: jet.order(),
            });
        }
        Ok(self.eval_to_order(x, jet, self.ode_order))
    }

    /// `(u, u', ..., u^(order))` for any `order <= jet.order()`.
    pub fn eval_to_order(&self, x: f64, jet: &Jet, order: usize) -> Vec<f64> {
        assert!(order <= jet.order(), "jet too short");
        let fixed = self.fixed_derivatives(x, order);
        let mult = self.multiplier_derivatives(x, order);
        leibniz(&fixed, &mult, &jet.values()[..=order])
    }
}

/// `u^(k) = F^(k) + sum_j C(k, j) M^(j) N^(k-j)` for `k = 0..fixed.len()`.
pub fn leibniz(fixed: &[f64], mult: &[f64], net: &[f64]) -> Vec<f64> {
    (0..fixed.len())
        .map(|k| {
            let prod: f64 = (0..=k).map(|j| binomial(k, j) * mult[j] * net[k - j]).sum();
            fixed[k] + prod
        })
        .collect()
}

fn check_common(constraints: &[ConstraintSpec], ode_order: usize) -> Result<()> {
    if ode_order == 0 {
        return Err(Error::InvalidConstraint("the ODE order must be at least 1".into()));
    }
    if ode_order > MAX_ORDER {
        return Err(Error::OrderTooHigh(ode_order));
    }
    for c in constraints {
        if !c.point.is_finite() || !c.value.is_finite() {
            return Err(Error::InvalidConstraint(format!("{c:?} is not finite")));
        }
        if c.order >= ode_order {
            return Err(Error::InvalidConstraint(format!(
                "order {} is not below the ODE order {ode_order}",
                c.order
            )));
        }
    }
    for (i, a) in constraints.iter().enumerate() {
        for b in &constraints[..i] {
            if a.order == b.order && a.point == b.point {
                return Err(Error::DuplicatePoint {
                    order: a.order,
                    point: a.point,
                });
            }
        }
    }
    Ok(())
}

/// The normalized Taylor coefficient of order `k` of `p` at `x`, scaled to the
/// plain derivative, failing if it vanishes within rounding of its magnitude.
fn denominator(p: &FactoredPoly, k: usize, x: f64, order: usize) -> Result<f64> {
    let d = p.derivatives_at(x, k)[k];
    let scale = p.taylor_magnitude_at(x, k)[k] * (1..=k).map(|m| m as f64).product::<f64>();
    if d == 0.0 || !d.is_finite() || d.abs() <= 64.0 * f64::EPSILON * scale {
        return Err(Error::DegenerateDenominator { order, point: x });
    }
    Ok(d)
}

/// Case 1: `n` value conditions at distinct points; Lagrange interpolation.
pub fn build_case1(constraints: &[ConstraintSpec]) -> Result<TrialForm> {
    let n = constraints.len();
    check_common(constraints, n)?;
    if let Some(c) = constraints.iter().find(|c| c.order != 0) {
        return Err(Error::InvalidConstraint(format!("expected value conditions only, got order {}", c.order)));
    }
    let mut terms = Vec::with_capacity(n);
    for (i, ci) in constraints.iter().enumerate() {
        let mut denom = 1.0;
        let mut factors = Vec::with_capacity(n - 1);
        for (j, cj) in constraints.iter().enumerate() {
            if j != i {
                denom *= ci.point - cj.point;
                factors.push((cj.point, 1));
            }
        }
        terms.push(FactoredPoly::new(ci.value / denom, factors));
    }
    let multiplier = FactoredPoly::new(1.0, constraints.iter().map(|c| (c.point, 1)).collect());
    Ok(TrialForm::polynomial(n, terms, multiplier, constraints.to_vec()))
}

/// Case 2: `n` conditions on the `(n-1)`-th derivative at distinct points.
pub fn build_case2(constraints: &[ConstraintSpec]) -> Result<TrialForm> {
    let n = constraints.len();
    check_common(constraints, n)?;
    if let Some(c) = constraints.iter().find(|c| c.order != n - 1) {
        return Err(Error::InvalidConstraint(format!(
            "expected conditions of order {}, got order {}",
            n - 1,
            c.order
        )));
    }
    let power = n as u32;
    let mut terms = Vec::with_capacity(n);
    for (i, ci) in constraints.iter().enumerate() {
        let m_i = FactoredPoly::new(
            1.0,
            constraints
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, cj)| (cj.point, power))
                .collect(),
        );
        let d = denominator(&m_i, n - 1, ci.point, n - 1)?;
        terms.push(m_i.with_scale(ci.value / d));
    }
    let multiplier = FactoredPoly::new(1.0, constraints.iter().map(|c| (c.point, power)).collect());
    Ok(TrialForm::polynomial(n, terms, multiplier, constraints.to_vec()))
}

/// Case 3: exactly one condition on each derivative order `0..n`.
pub fn build_case3(constraints: &[ConstraintSpec]) -> Result<TrialForm> {
    let n = constraints.len();
    check_common(constraints, n)?;
    let mut by_order: Vec<Option<ConstraintSpec>> = vec![None; n];
    for c in constraints {
        if by_order[c.order].replace(*c).is_some() {
            return Err(Error::InvalidConstraint(format!(
                "more than one condition of order {}",
                c.order
            )));
        }
    }
    let conds: Vec<ConstraintSpec> = by_order.into_iter().map(|c| c.expect("n distinct orders below n")).collect();

    // M_0 = 1, M_i = M_{i-1} (x - x_{i-1})^i
    let mut m = vec![FactoredPoly::constant(1.0)];
    for i in 1..=n {
        let prev = &m[i - 1];
        m.push(prev.times_factor(conds[i - 1].point, i as u32));
    }
    let mut coeffs: Vec<f64> = Vec::with_capacity(n);
    for (i, ci) in conds.iter().enumerate() {
        let mut rhs = ci.value;
        for (j, nj) in coeffs.iter().enumerate() {
            rhs -= m[j].derivatives_at(ci.point, i)[i] * nj;
        }
        let d = denominator(&m[i], i, ci.point, i)?;
        coeffs.push(rhs / d);
    }
    let terms = coeffs.iter().zip(&m).map(|(&c, mi)| mi.with_scale(c)).collect();
    Ok(TrialForm::polynomial(n, terms, m[n].clone(), constraints.to_vec()))
}

/// Case 4: any mix of orders `0..n` whose counts sum to `n`; points distinct
/// within each order.
pub fn build_case4(constraints: &[ConstraintSpec], ode_order: usize) -> Result<TrialForm> {
    let n = ode_order;
    check_common(constraints, n)?;
    if constraints.len() != n {
        return Err(Error::BadConditionCount {
            expected: n,
            got: constraints.len(),
        });
    }
    let groups: Vec<Vec<ConstraintSpec>> = (0..n)
        .map(|i| constraints.iter().filter(|c| c.order == i).copied().collect())
        .collect();

    // M_{i,alpha} = (x - x_{i,alpha})^{i+1}; prefix[i] holds the factors of M_0 ... M_i
    let mut prefix: Vec<Vec<(f64, u32)>> = Vec::with_capacity(n);
    let mut acc: Vec<(f64, u32)> = Vec::new();
    for (i, group) in groups.iter().enumerate() {
        acc.extend(group.iter().map(|c| (c.point, i as u32 + 1)));
        prefix.push(acc.clone());
    }

    // F_{i,alpha} = (M_0 ... M_i) / M_{i,alpha}
    let f_of = |i: usize, alpha: usize| -> FactoredPoly {
        let offset = prefix[i].len() - groups[i].len();
        let mut factors = prefix[i].clone();
        factors.remove(offset + alpha);
        FactoredPoly::new(1.0, factors)
    };

    let mut terms: Vec<(usize, FactoredPoly, f64)> = Vec::with_capacity(n);
    for (i, group) in groups.iter().enumerate() {
        for (alpha, c) in group.iter().enumerate() {
            let f = f_of(i, alpha);
            let mut rhs = c.value;
            for (_, fj, nj) in terms.iter().filter(|(j, _, _)| *j < i) {
                rhs -= nj * fj.derivatives_at(c.point, i)[i];
            }
            // Same-order terms F_{i,beta} carry (x - x_{i,alpha})^{i+1} and vanish here.
            let d = denominator(&f, i, c.point, i)?;
            terms.push((i, f, rhs / d));
        }
    }
    let fixed_terms = terms.into_iter().map(|(_, f, c)| f.with_scale(c)).collect();
    let multiplier = FactoredPoly::new(1.0, acc);
    Ok(TrialForm::polynomial(n, fixed_terms, multiplier, constraints.to_vec()))
}

/// First-order trial `A + g(x - a) N(x)` for any basis form.
pub fn build_first_order_basis(form: BasisForm, value: f64, anchor: f64) -> Result<TrialForm> {
    form.validate()?;
    let constraint = ConstraintSpec::value_at(anchor, value);
    check_common(&[constraint], 1)?;
    let mut trial = TrialForm::polynomial(
        1,
        vec![FactoredPoly::constant(value)],
        FactoredPoly::new(1.0, vec![(anchor, 1)]),
        vec![constraint],
    );
    trial.basis = form;
    trial.anchor = anchor;
    Ok(trial)
}

/// Second-order exponential trial `A + B (x - b) + (1 - e^{-(x - a)})^2 N(x)`
/// for `u(a) = A`, `u'(b) = B`. Only `b == a` satisfies both conditions.
pub fn build_second_order_exponential(value: f64, anchor: f64, slope: f64, slope_point: f64) -> Result<TrialForm> {
    if slope_point != anchor {
        return Err(Error::UnsupportedConditions(format!(
            "the squared exponential factor only preserves u'({slope_point}) when both conditions sit at \
             the same point, got u({anchor}) and u'({slope_point})"
        )));
    }
    let constraints = vec![
        ConstraintSpec::value_at(anchor, value),
        ConstraintSpec::new(1, slope_point, slope),
    ];
    check_common(&constraints, 2)?;
    let mut trial = TrialForm::polynomial(
        2,
        vec![
            FactoredPoly::constant(value),
            FactoredPoly::new(slope, vec![(slope_point, 1)]),
        ],
        FactoredPoly::new(1.0, vec![(anchor, 2)]),
        constraints,
    );
    trial.basis = BasisForm::Exponential;
    trial.anchor = anchor;
    trial.multiplicity = 2;
    Ok(trial)
}

/// Pick the construction for an order-`n` component with the given basis.
///
/// The polynomial basis works for every condition layout through the general
/// engine. Other forms cover first-order problems and the second-order
/// exponential variant with both conditions at one point.
pub fn build_trial(constraints: &[ConstraintSpec], ode_order: usize, basis: BasisForm) -> Result<TrialForm> {
    basis.validate()?;
    match basis {
        BasisForm::Polynomial { c } => build_case4(constraints, ode_order)?.with_coefficient(c),
        _ if ode_order == 1 => match constraints {
            [c] if c.order == 0 => build_first_order_basis(basis, c.value, c.point),
            _ => Err(Error::BadConditionCount {
                expected: 1,
                got: constraints.len(),
            }),
        },
        BasisForm::Exponential if ode_order == 2 => {
            let value = constraints.iter().find(|c| c.order == 0);
            let slope = constraints.iter().find(|c| c.order == 1);
            match (value, slope, constraints.len()) {
                (Some(v), Some(s), 2) => build_second_order_exponential(v.value, v.point, s.value, s.point),
                _ => Err(Error::UnsupportedConditions(
                    "the second-order exponential form needs one value and one slope condition".into(),
                )),
            }
        }
        _ => Err(Error::UnsupportedConditions(format!(
            "the {} form is only available for first-order problems",
            basis.name()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(order: usize, point: f64, value: f64) -> ConstraintSpec {
        ConstraintSpec::new(order, point, value)
    }

    #[test]
    fn case1_single_condition_is_first_order_form() {
        let t = build_case1(&[c(0, 0.0, 1.0)]).unwrap();
        assert_eq!(t.fixed_part(), &Polynomial::constant(1.0));
        assert_eq!(t.multiplier_poly(), &Polynomial::new(vec![0.0, 1.0]));
    }

    #[test]
    fn case1_lagrange_values() {
        let t = build_case1(&[c(0, 0.0, 1.0), c(0, 1.0, 3.0)]).unwrap();
        assert_relative_eq!(t.fixed_part().eval(2.0), 5.0, epsilon = 1e-14);
        let t = build_case1(&[c(0, 0.0, 0.0), c(0, 1.0, 1.0)]).unwrap();
        assert_relative_eq!(t.fixed_part().eval(0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn case1_rejects_duplicates() {
        assert!(matches!(
            build_case1(&[c(0, 0.5, 1.0), c(0, 0.5, 2.0)]),
            Err(Error::DuplicatePoint { order: 0, .. })
        ));
    }

    #[test]
    fn case2_second_order_slopes() {
        // -(x-1)^2 + 2x^2 has slope 2 at 0 and 4 at 1
        let t = build_case2(&[c(1, 0.0, 2.0), c(1, 1.0, 4.0)]).unwrap();
        let expected = Polynomial::new(vec![-1.0, 2.0, 1.0]);
        for (a, b) in t.fixed_part().coeffs().iter().zip(expected.coeffs()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-14);
        }
        assert_relative_eq!(t.fixed_part().eval(0.5), 0.25, epsilon = 1e-14);
        assert_eq!(t.multiplier_poly(), &Polynomial::new(vec![0.0, 0.0, 1.0, -2.0, 1.0]));
    }

    #[test]
    fn case2_matches_two_slope_closed_form() {
        // A (x-b)^2 / (2(a-b)) + B (x-a)^2 / (2(b-a)) with a = 0, b = 1
        let (a_val, b_val) = (-1.5, 0.75);
        let t = build_case2(&[c(1, 0.0, a_val), c(1, 1.0, b_val)]).unwrap();
        for &x in &[-0.3, 0.2, 0.9, 1.6] {
            let closed = a_val * (x - 1.0f64).powi(2) / -2.0 + b_val * x * x / 2.0;
            assert_relative_eq!(t.fixed_part().eval(x), closed, epsilon = 1e-13);
        }
        let zero = build_case2(&[c(1, 0.0, 0.0), c(1, 1.0, 0.0)]).unwrap();
        assert!(zero.fixed_part().is_zero());
    }

    #[test]
    fn case3_value_and_slope() {
        // u(0) = A, u'(1) = B gives A + B x with multiplier x (x-1)^2
        let (a_val, b_val) = (0.7, -2.5);
        let t = build_case3(&[c(0, 0.0, a_val), c(1, 1.0, b_val)]).unwrap();
        let fixed = t.fixed_part().coeffs();
        assert_relative_eq!(fixed[0], a_val);
        assert_relative_eq!(fixed[1], b_val);
        assert_eq!(fixed.len(), 2);
        assert_eq!(t.multiplier_poly(), &Polynomial::new(vec![0.0, 1.0, -2.0, 1.0]));

        let t = build_case3(&[c(0, 0.0, 1.0), c(1, 1.0, 2.0)]).unwrap();
        assert_relative_eq!(t.fixed_part().eval(3.0), 7.0);

        let t = build_case3(&[c(0, 2.5, -4.0)]).unwrap();
        assert_eq!(t.fixed_part(), &Polynomial::constant(-4.0));
        assert_eq!(t.multiplier_poly(), &Polynomial::linear_factor(2.5));
    }

    #[test]
    fn case3_degenerate_recursion() {
        // three conditions at one point: M_2 = (x - p)^3 has a vanishing second derivative there
        let err = build_case3(&[c(0, 0.0, 1.0), c(1, 0.0, 1.0), c(2, 0.0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::DegenerateDenominator { order: 2, .. }));
    }

    #[test]
    fn case4_zero_data() {
        let t = build_case4(&[c(0, 0.0, 0.0), c(0, 1.0, 0.0)], 2).unwrap();
        assert!(t.fixed_part().is_zero());
        assert_eq!(t.multiplier_poly(), &Polynomial::new(vec![0.0, -1.0, 1.0]));
    }

    #[test]
    fn case4_condition_count() {
        assert!(matches!(
            build_case4(&[c(0, 0.0, 1.0)], 2),
            Err(Error::BadConditionCount { expected: 2, got: 1 })
        ));
        assert!(matches!(
            build_case4(&[c(0, 0.0, 1.0), c(2, 1.0, 1.0)], 2),
            Err(Error::InvalidConstraint(_))
        ));
    }

    #[test]
    fn case4_coincident_points_across_orders() {
        let t = build_case4(&[c(0, 0.0, 1.0 / 3.0), c(1, 0.0, 10.0)], 2).unwrap();
        let fixed = t.fixed_part().coeffs();
        assert_relative_eq!(fixed[0], 1.0 / 3.0);
        assert_relative_eq!(fixed[1], 10.0);
        assert_eq!(t.multiplier_poly(), &Polynomial::new(vec![0.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn exponential_first_order() {
        let t = build_first_order_basis(BasisForm::Exponential, 100.0, 0.0).unwrap();
        let wild = Jet::new(vec![123.0, -4.0]);
        assert_eq!(t.eval(0.0, &wild).unwrap()[0], 100.0);
        let one = Jet::new(vec![1.0, 0.0]);
        assert_relative_eq!(t.eval(1.0, &one).unwrap()[0], 100.0 + 1.0 - (-1.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(t.eval(1.0, &one).unwrap()[0], 100.6321, epsilon = 1e-4);
    }

    #[test]
    fn polynomial_basis_with_unit_coefficient_is_plain_linear_form() {
        let t = build_first_order_basis(BasisForm::Polynomial { c: 1.0 }, 2.0, 0.5).unwrap();
        let jet = Jet::new(vec![0.3, 0.7]);
        for &x in &[0.0, 0.5, 1.7] {
            let u = t.eval(x, &jet).unwrap();
            assert_relative_eq!(u[0], 2.0 + (x - 0.5) * 0.3, epsilon = 1e-15);
            assert_relative_eq!(u[1], 0.3 + (x - 0.5) * 0.7, epsilon = 1e-15);
        }
    }

    #[test]
    fn basis_parameter_validation() {
        assert!(matches!(
            build_first_order_basis(BasisForm::Polynomial { c: 0.0 }, 1.0, 0.0),
            Err(Error::BadParameter(_))
        ));
        for base in [1.0, 0.0, -2.0] {
            assert!(matches!(
                build_first_order_basis(BasisForm::Logarithmic { base }, 1.0, 0.0),
                Err(Error::BadParameter(_))
            ));
        }
    }

    #[test]
    fn logarithmic_domain() {
        let t = build_first_order_basis(BasisForm::Logarithmic { base: 2.0 }, 1.0, 0.0).unwrap();
        assert!(t.check_domain(0.0, 10.0).is_ok());
        assert!(t.check_domain(-0.5, 10.0).is_ok());
        assert!(matches!(t.check_domain(-1.0, 10.0), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn second_order_exponential() {
        let t = build_second_order_exponential(1.0, 0.0, 2.0, 0.0).unwrap();
        for jet in [Jet::new(vec![5.0, -3.0, 8.0]), Jet::new(vec![-0.1, 0.2, 0.3])] {
            let u = t.eval(0.0, &jet).unwrap();
            assert_eq!(u[0], 1.0);
            assert_eq!(u[1], 2.0);
        }
        let zero = build_second_order_exponential(0.0, 0.0, 0.0, 0.0).unwrap();
        for &x in &[0.0, 0.4, 1.0] {
            assert_eq!(zero.eval(x, &Jet::zero(2)).unwrap(), vec![0.0, 0.0, 0.0]);
        }
        let t = build_second_order_exponential(0.0, 0.0, 2.0, 0.0).unwrap();
        let u1 = t.eval(1.0, &Jet::new(vec![1.0, 0.0, 0.0])).unwrap()[0];
        assert_relative_eq!(u1, 2.0 + (1.0 - (-1.0f64).exp()).powi(2), epsilon = 1e-14);
        assert_relative_eq!(u1, 2.3996, epsilon = 1e-4);
    }

    #[test]
    fn second_order_exponential_needs_shared_point() {
        assert!(matches!(
            build_second_order_exponential(1.0, 0.0, 2.0, 1.0),
            Err(Error::UnsupportedConditions(_))
        ));
    }

    #[test]
    fn trial_eval_examples() {
        let t = build_case3(&[c(0, 0.0, 1.0), c(1, 1.0, 2.0)]).unwrap();
        let u = t.eval(3.0, &Jet::zero(2)).unwrap();
        assert_relative_eq!(u[0], 7.0, epsilon = 1e-14);
        assert_relative_eq!(u[1], 2.0, epsilon = 1e-14);
        assert_eq!(u[2], 0.0);

        // u = A + x N with N = 1, N' = 0 has u' = 1
        let t = build_case1(&[c(0, 0.0, 4.0)]).unwrap();
        let u = t.eval(0.8, &Jet::new(vec![1.0, 0.0])).unwrap();
        assert_relative_eq!(u[1], 1.0);
        assert_eq!(t.eval(0.0, &Jet::new(vec![9.0, 9.0])).unwrap()[0], 4.0);
    }

    #[test]
    fn jet_too_short() {
        let t = build_case3(&[c(0, 0.0, 1.0), c(1, 1.0, 2.0)]).unwrap();
        assert!(matches!(
            t.eval(0.0, &Jet::zero(1)),
            Err(Error::JetTooShort { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn basis_factors_vanish_with_closed_form_slopes() {
        let a = 0.75;
        for form in BasisForm::all(3.5, 4.0) {
            let g = form.factor_series(&Taylor::variable(a, 1).offset(-a));
            assert_eq!(g.coeffs()[0], 0.0, "{form}");
            assert_eq!(g.coeffs()[1], form.slope_at_anchor(), "{form}");
        }
        let expected = [3.5, 1.0, 1.0, 1.0 / 4f64.ln(), 0.25, 0.5, 0.5];
        for (form, e) in BasisForm::all(3.5, 4.0).iter().zip(expected) {
            assert_eq!(form.slope_at_anchor(), e);
        }
    }

    #[test]
    fn dispatch() {
        let cond = [c(0, 0.0, 1.0 / 3.0), c(1, 0.0, 10.0)];
        assert!(build_trial(&cond, 2, BasisForm::Polynomial { c: 10.0 }).is_ok());
        assert!(build_trial(&cond, 2, BasisForm::Exponential).is_ok());
        assert!(matches!(
            build_trial(&cond, 2, BasisForm::Hyperbolic),
            Err(Error::UnsupportedConditions(_))
        ));
        let t = build_trial(&[c(0, 0.0, 45.0)], 1, BasisForm::Softplus).unwrap();
        assert_eq!(t.basis(), BasisForm::Softplus);
    }

    #[test]
    fn form_names_roundtrip() {
        for name in BasisForm::NAMES {
            let form: BasisForm = name.parse().unwrap();
            assert_eq!(form.name(), name);
        }
        assert!("cubic".parse::<BasisForm>().is_err());
    }
}

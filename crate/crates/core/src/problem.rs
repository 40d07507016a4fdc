//! ODE problem description shared by the trainer and the reference integrator.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::trial::ConstraintSpec;

/// Right-hand side `f(x, S_0, ..., S_{n-1})` of `u^(n) = f`.
///
/// `states` is laid out derivative-major: entry `i * dim + k` is the `i`-th
/// derivative of component `k`. The Jacobian is written row-major into a
/// `dim x (order * dim)` buffer, `jac[c * order * dim + i * dim + k] =
/// d f_c / d (S_i)_k`.
pub trait Rhs: Send + Sync + fmt::Debug {
    fn eval(&self, x: f64, states: &[f64], out: &mut [f64]);

    fn jacobian(&self, x: f64, states: &[f64], jac: &mut [f64]);
}

/// `f(x, S) = A S + b` with constant coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRhs {
    /// Row-major `dim x (order * dim)`.
    pub matrix: Vec<f64>,
    pub offset: Vec<f64>,
}

impl Rhs for LinearRhs {
    fn eval(&self, _x: f64, states: &[f64], out: &mut [f64]) {
        let cols = states.len();
        for (c, o) in out.iter_mut().enumerate() {
            let row = &self.matrix[c * cols..(c + 1) * cols];
            *o = row.iter().zip(states).map(|(a, s)| a * s).sum::<f64>() + self.offset[c];
        }
    }

    fn jacobian(&self, _x: f64, _states: &[f64], jac: &mut [f64]) {
        jac.copy_from_slice(&self.matrix);
    }
}

#[derive(Clone, Debug)]
pub struct OdeProblem {
    pub name: String,
    pub order: usize,
    pub dim: usize,
    pub rhs: Arc<dyn Rhs>,
    /// One list of `order` conditions per component.
    pub constraints: Vec<Vec<ConstraintSpec>>,
    pub domain: (f64, f64),
    pub params: BTreeMap<String, f64>,
}

impl OdeProblem {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::BadParameter(format!("empty domain [{lo}, {hi}]")));
        }
        if self.order == 0 || self.dim == 0 {
            return Err(Error::BadParameter("order and dimension must be positive".into()));
        }
        if self.constraints.len() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "{} constraint lists for {} components",
                self.constraints.len(),
                self.dim
            )));
        }
        for (k, list) in self.constraints.iter().enumerate() {
            if list.len() != self.order {
                return Err(Error::BadConditionCount {
                    expected: self.order,
                    got: list.len(),
                });
            }
            if let Some(c) = list.iter().find(|c| c.point < lo || c.point > hi) {
                return Err(Error::DomainViolation(format!(
                    "component {k} has a condition at {} outside [{lo}, {hi}]",
                    c.point
                )));
            }
        }
        Ok(())
    }

    pub fn eval_rhs(&self, x: f64, states: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.rhs.eval(x, states, &mut out);
        out
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    /// Initial state `(S_0, ..., S_{n-1})` when every condition is an initial
    /// condition at one common point, one per derivative order.
    pub fn initial_state(&self) -> Result<(f64, Vec<f64>)> {
        let t0 = self
            .constraints
            .first()
            .and_then(|l| l.first())
            .map(|c| c.point)
            .ok_or_else(|| Error::UnsupportedConditions("problem has no conditions".into()))?;
        let mut state = vec![f64::NAN; self.order * self.dim];
        for (k, list) in self.constraints.iter().enumerate() {
            for c in list {
                if c.point != t0 {
                    return Err(Error::UnsupportedConditions(format!(
                        "conditions at {} and {t0} do not form an initial-value problem",
                        c.point
                    )));
                }
                state[c.order * self.dim + k] = c.value;
            }
        }
        if state.iter().any(|s| s.is_nan()) {
            return Err(Error::UnsupportedConditions(
                "initial-value problems need one condition per derivative order".into(),
            ));
        }
        Ok((t0, state))
    }

    /// The equivalent first-order system in `order * dim` unknowns.
    pub fn reduce_to_first_order(&self) -> Result<OdeProblem> {
        let (t0, state) = self.initial_state()?;
        if self.order == 1 {
            return Ok(self.clone());
        }
        let dim = self.order * self.dim;
        let constraints = state.iter().map(|&v| vec![ConstraintSpec::value_at(t0, v)]).collect();
        Ok(OdeProblem {
            name: format!("{} (first-order form)", self.name),
            order: 1,
            dim,
            rhs: Arc::new(ReducedRhs {
                inner: self.rhs.clone(),
                order: self.order,
                dim: self.dim,
            }),
            constraints,
            domain: self.domain,
            params: self.params.clone(),
        })
    }
}

/// `y = (S_0, ..., S_{n-1})`, `y' = (S_1, ..., S_{n-1}, f(x, y))`.
#[derive(Debug)]
struct ReducedRhs {
    inner: Arc<dyn Rhs>,
    order: usize,
    dim: usize,
}

impl Rhs for ReducedRhs {
    fn eval(&self, x: f64, states: &[f64], out: &mut [f64]) {
        let shift = (self.order - 1) * self.dim;
        out[..shift].copy_from_slice(&states[self.dim..]);
        self.inner.eval(x, states, &mut out[shift..]);
    }

    fn jacobian(&self, x: f64, states: &[f64], jac: &mut [f64]) {
        let n = states.len();
        jac.iter_mut().for_each(|j| *j = 0.0);
        let shift = (self.order - 1) * self.dim;
        for r in 0..shift {
            jac[r * n + r + self.dim] = 1.0;
        }
        self.inner.jacobian(x, states, &mut jac[shift * n..]);
    }
}

//! Benchmark problems and a fixed-step RK4 reference integrator.
//!
//! Units are documentation only: cooling in °C and hours, suspension in feet
//! and seconds, home heating in °F and hours.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::{OdeProblem, Rhs};
use crate::trial::ConstraintSpec;

/// `dT/dt = r (T_env - T)`.
#[derive(Clone, Debug)]
pub struct CoolingRhs {
    pub r: f64,
    pub t_env: f64,
}

impl Rhs for CoolingRhs {
    fn eval(&self, _t: f64, s: &[f64], out: &mut [f64]) {
        out[0] = self.r * (self.t_env - s[0]);
    }

    fn jacobian(&self, _t: f64, _s: &[f64], jac: &mut [f64]) {
        jac[0] = -self.r;
    }
}

pub fn newton_cooling_problem() -> OdeProblem {
    let rhs = CoolingRhs { r: 0.5, t_env: 10.0 };
    let params = BTreeMap::from([("r".to_string(), rhs.r), ("T_env".to_string(), rhs.t_env)]);
    OdeProblem {
        name: "cooling".into(),
        order: 1,
        dim: 1,
        rhs: Arc::new(rhs),
        constraints: vec![vec![ConstraintSpec::value_at(0.0, 100.0)]],
        domain: (0.0, 10.0),
        params,
    }
}

pub fn newton_cooling_analytic(t: f64) -> f64 {
    10.0 + 90.0 * (-0.5 * t).exp()
}

/// `m x'' + c x' + k x = 0` solved for `x''`.
#[derive(Clone, Debug)]
pub struct SuspensionRhs {
    pub m: f64,
    pub c: f64,
    pub k: f64,
}

impl Rhs for SuspensionRhs {
    fn eval(&self, _t: f64, s: &[f64], out: &mut [f64]) {
        out[0] = -(self.c * s[1] + self.k * s[0]) / self.m;
    }

    fn jacobian(&self, _t: f64, _s: &[f64], jac: &mut [f64]) {
        jac[0] = -self.k / self.m;
        jac[1] = -self.c / self.m;
    }
}

pub fn suspension_problem() -> OdeProblem {
    let rhs = SuspensionRhs {
        m: 12.0,
        c: 240.0,
        k: 1152.0,
    };
    let params = BTreeMap::from([
        ("m".to_string(), rhs.m),
        ("c".to_string(), rhs.c),
        ("k".to_string(), rhs.k),
    ]);
    OdeProblem {
        name: "suspension".into(),
        order: 2,
        dim: 1,
        rhs: Arc::new(rhs),
        constraints: vec![vec![
            ConstraintSpec::value_at(0.0, 1.0 / 3.0),
            ConstraintSpec::new(1, 0.0, 10.0),
        ]],
        domain: (0.0, 1.0),
        params,
    }
}

pub fn suspension_analytic(t: f64) -> f64 {
    3.5 * (-8.0 * t).exp() - 19.0 / 6.0 * (-12.0 * t).exp()
}

pub fn suspension_analytic_velocity(t: f64) -> f64 {
    -28.0 * (-8.0 * t).exp() + 38.0 * (-12.0 * t).exp()
}

/// Basement `x`, living area `y` and attic `z` temperatures.
///
/// The `k2 (T_out - x)` term appears in both the `y` and `z` equations and
/// `k4` is carried but unused.
#[derive(Clone, Debug)]
pub struct HeatingRhs {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub t_earth: f64,
    pub t_out: f64,
    pub q_heater: f64,
}

impl Rhs for HeatingRhs {
    fn eval(&self, _t: f64, s: &[f64], out: &mut [f64]) {
        let (x, y, z) = (s[0], s[1], s[2]);
        out[0] = self.k0 * (self.t_earth - x) + self.k1 * (y - x);
        out[1] = self.k1 * (x - y) + self.k2 * (self.t_out - x) + self.k3 * (z - y) + self.q_heater;
        out[2] = self.k3 * (y - z) + self.k2 * (self.t_out - x);
    }

    fn jacobian(&self, _t: f64, _s: &[f64], jac: &mut [f64]) {
        let (k0, k1, k2, k3) = (self.k0, self.k1, self.k2, self.k3);
        jac.copy_from_slice(&[
            -k0 - k1,
            k1,
            0.0,
            k1 - k2,
            -k1 - k3,
            k3,
            -k2,
            k3,
            -k3,
        ]);
    }
}

pub fn home_heating_problem() -> OdeProblem {
    let rhs = HeatingRhs {
        k0: 0.5,
        k1: 0.5,
        k2: 0.25,
        k3: 0.25,
        k4: 0.75,
        t_earth: 45.0,
        t_out: 35.0,
        q_heater: 20.0,
    };
    let params = BTreeMap::from([
        ("k0".to_string(), rhs.k0),
        ("k1".to_string(), rhs.k1),
        ("k2".to_string(), rhs.k2),
        ("k3".to_string(), rhs.k3),
        ("k4".to_string(), rhs.k4),
        ("T_earth".to_string(), rhs.t_earth),
        ("T_out".to_string(), rhs.t_out),
        ("Q_heater".to_string(), rhs.q_heater),
    ]);
    OdeProblem {
        name: "heating".into(),
        order: 1,
        dim: 3,
        rhs: Arc::new(rhs),
        constraints: vec![
            vec![ConstraintSpec::value_at(0.0, 45.0)],
            vec![ConstraintSpec::value_at(0.0, 35.0)],
            vec![ConstraintSpec::value_at(0.0, 35.0)],
        ],
        domain: (0.0, 10.0),
        params,
    }
}

/// Sampled solution of a first-order system.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    /// State at `t`, linearly interpolated between steps.
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let idx = self.times.partition_point(|&s| s < t);
        if idx == 0 {
            return self.states[0].clone();
        }
        if idx == self.times.len() {
            return self.states[idx - 1].clone();
        }
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        if t1 == t {
            return self.states[idx].clone();
        }
        let w = (t - t0) / (t1 - t0);
        self.states[idx - 1]
            .iter()
            .zip(&self.states[idx])
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Classical fourth-order Runge-Kutta from the problem's initial state to
/// `t_end`, on the grid `t0 + i h` with a shortened final step if needed.
pub fn rk4_integrate(problem: &OdeProblem, h: f64, t_end: f64) -> Result<Trajectory> {
    if problem.order != 1 {
        return Err(Error::UnsupportedConditions(format!(
            "RK4 integrates first-order systems; reduce the order-{} problem first",
            problem.order
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::BadStep(format!("step must be positive, got {h}")));
    }
    let (t0, y0) = problem.initial_state()?;
    if t_end.is_nan() || t_end < t0 {
        return Err(Error::BadStep(format!("end time {t_end} precedes the start {t0}")));
    }
    let dim = y0.len();
    let rhs = &problem.rhs;
    let steps = ((t_end - t0) / h - 1e-9).ceil().max(0.0) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(t0);
    states.push(y0.clone());

    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    let mut tmp = vec![0.0; dim];
    let mut y = y0;
    let mut t = t0;
    for i in 1..=steps {
        let t_next = if i == steps { t_end } else { t0 + i as f64 * h };
        let dt = t_next - t;
        rhs.eval(t, &y, &mut k1);
        for j in 0..dim {
            tmp[j] = y[j] + 0.5 * dt * k1[j];
        }
        rhs.eval(t + 0.5 * dt, &tmp, &mut k2);
        for j in 0..dim {
            tmp[j] = y[j] + 0.5 * dt * k2[j];
        }
        rhs.eval(t + 0.5 * dt, &tmp, &mut k3);
        for j in 0..dim {
            tmp[j] = y[j] + dt * k3[j];
        }
        rhs.eval(t + dt, &tmp, &mut k4);
        for j in 0..dim {
            y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        t = t_next;
        times.push(t);
        states.push(y.clone());
    }
    Ok(Trajectory { times, states })
}

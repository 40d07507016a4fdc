//! Collocation, residual loss and the training loop.

use crate::error::{Error, Result};
use crate::mlp::{Activation, Mlp, ParamGradient};
use crate::optim::{Optimizer, OptimizerKind};
use crate::poly::binomial;
use crate::problem::OdeProblem;
use crate::trial::{build_trial, leibniz, BasisForm, TrialForm};

/// Uniform grid over `[lo, hi]` including both endpoints.
pub fn collocate(domain: (f64, f64), count: usize) -> Result<Vec<f64>> {
    let (lo, hi) = domain;
    if count < 2 || lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::BadCount { count, lo, hi });
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i == count - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub collocation_count: usize,
    pub basis: BasisForm,
    pub seed: u64,
    pub record_every: usize,
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20_000,
            learning_rate: 1e-2,
            optimizer: OptimizerKind::Adam,
            collocation_count: 32,
            basis: BasisForm::Exponential,
            seed: 42,
            record_every: 1,
            layer_sizes: vec![1, 10, 1],
            activation: Activation::Sigmoid,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::BadParameter("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::BadParameter(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.collocation_count < 2 {
            return Err(Error::BadParameter("need at least two collocation points".into()));
        }
        if self.record_every == 0 {
            return Err(Error::BadParameter("record_every must be at least 1".into()));
        }
        self.basis.validate()
    }
}

#[derive(Clone, Debug)]
pub struct TrainingTrace {
    /// `(epoch, loss)` where epoch `e` is the loss after `e` updates. Epoch 0,
    /// the untrained loss, is kept only when every epoch is recorded.
    pub losses: Vec<(usize, f64)>,
    pub final_mlps: Vec<Mlp>,
    pub final_trials: Vec<TrialForm>,
}

impl TrainingTrace {
    pub fn final_loss(&self) -> Option<f64> {
        self.losses.last().map(|&(_, l)| l)
    }

    pub fn initial_loss(&self) -> Option<f64> {
        self.losses.first().map(|&(_, l)| l)
    }

    /// `u_k^(0..=order)` of every component at `x`.
    pub fn solution(&self, x: f64, order: usize) -> Result<Vec<Vec<f64>>> {
        self.final_trials
            .iter()
            .zip(&self.final_mlps)
            .map(|(trial, mlp)| {
                let jet = mlp.forward_jet(x, order)?;
                Ok(trial.eval_to_order(x, &jet, order))
            })
            .collect()
    }

    /// `u_k(x)` of every component.
    pub fn values(&self, x: f64) -> Result<Vec<f64>> {
        Ok(self.solution(x, 0)?.into_iter().map(|u| u[0]).collect())
    }
}

/// Mean of the `k` smallest recorded losses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowestAverage {
    pub mean: f64,
    /// Number of losses actually averaged.
    pub used: usize,
    /// Fewer than `k` losses were recorded.
    pub short: bool,
}

pub fn lowest_k_average(trace: &TrainingTrace, k: usize) -> Result<LowestAverage> {
    lowest_k_of(trace.losses.iter().map(|&(_, l)| l), k)
}

pub fn lowest_k_of(losses: impl IntoIterator<Item = f64>, k: usize) -> Result<LowestAverage> {
    if k == 0 {
        return Err(Error::BadParameter("k must be at least 1".into()));
    }
    let mut sorted: Vec<f64> = losses.into_iter().collect();
    if sorted.is_empty() {
        return Err(Error::EmptyTrace);
    }
    sorted.sort_by(f64::total_cmp);
    let used = k.min(sorted.len());
    let mean = sorted[..used].iter().sum::<f64>() / used as f64;
    Ok(LowestAverage {
        mean,
        used,
        short: used < k,
    })
}

/// Collocation points with the network-independent parts of every trial
/// precomputed.
#[derive(Clone, Debug)]
pub struct LossContext<'a> {
    problem: &'a OdeProblem,
    points: Vec<f64>,
    /// `[point][component]` derivative vectors of length `order + 1`.
    fixed: Vec<Vec<Vec<f64>>>,
    mult: Vec<Vec<Vec<f64>>>,
}

impl<'a> LossContext<'a> {
    pub fn new(problem: &'a OdeProblem, trials: &[TrialForm], points: &[f64]) -> Result<Self> {
        if trials.len() != problem.dim {
            return Err(Error::ShapeMismatch(format!(
                "{} trials for {} components",
                trials.len(),
                problem.dim
            )));
        }
        if let Some(t) = trials.iter().find(|t| t.ode_order() != problem.order) {
            return Err(Error::ShapeMismatch(format!(
                "trial of order {} for an order-{} problem",
                t.ode_order(),
                problem.order
            )));
        }
        let n = problem.order;
        let fixed = points
            .iter()
            .map(|&x| trials.iter().map(|t| t.fixed_derivatives(x, n)).collect())
            .collect();
        let mult = points
            .iter()
            .map(|&x| trials.iter().map(|t| t.multiplier_derivatives(x, n)).collect())
            .collect();
        Ok(Self {
            problem,
            points: points.to_vec(),
            fixed,
            mult,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    fn check_mlps(&self, mlps: &[Mlp]) -> Result<()> {
        if mlps.len() != self.problem.dim {
            return Err(Error::ShapeMismatch(format!(
                "{} networks for {} components",
                mlps.len(),
                self.problem.dim
            )));
        }
        Ok(())
    }

    pub fn loss(&self, mlps: &[Mlp]) -> Result<f64> {
        self.check_mlps(mlps)?;
        self.evaluate(mlps, None)
    }

    /// Loss and its gradient with respect to every network's parameters;
    /// `grads` is overwritten.
    pub fn loss_and_gradient(&self, mlps: &[Mlp], grads: &mut [ParamGradient]) -> Result<f64> {
        self.check_mlps(mlps)?;
        if grads.len() != mlps.len() {
            return Err(Error::ShapeMismatch("one gradient per network".into()));
        }
        grads.iter_mut().for_each(ParamGradient::fill_zero);
        self.evaluate(mlps, Some(grads))
    }

    fn evaluate(&self, mlps: &[Mlp], mut grads: Option<&mut [ParamGradient]>) -> Result<f64> {
        let n = self.problem.order;
        let dim = self.problem.dim;
        let mut states = vec![0.0; n * dim];
        let mut rhs = vec![0.0; dim];
        let mut jac = vec![0.0; dim * n * dim];
        let mut residual = vec![0.0; dim];
        let mut loss = 0.0;
        for (p, &x) in self.points.iter().enumerate() {
            let mut passes = Vec::with_capacity(dim);
            let mut us = Vec::with_capacity(dim);
            for (k, mlp) in mlps.iter().enumerate() {
                let pass = mlp.forward_pass(x, n)?;
                let jet = pass.jet();
                let u = leibniz(&self.fixed[p][k], &self.mult[p][k], jet.values());
                for i in 0..n {
                    states[i * dim + k] = u[i];
                }
                us.push(u);
                passes.push(pass);
            }
            self.problem.rhs.eval(x, &states, &mut rhs);
            for k in 0..dim {
                residual[k] = us[k][n] - rhs[k];
                loss += residual[k] * residual[k];
            }
            let Some(grads) = grads.as_deref_mut() else {
                continue;
            };
            self.problem.rhs.jacobian(x, &states, &mut jac);
            for k in 0..dim {
                // adjoints of u_k^(j)
                let mut u_adj = vec![0.0; n + 1];
                u_adj[n] = 2.0 * residual[k];
                for (j, a) in u_adj.iter_mut().enumerate().take(n) {
                    for c in 0..dim {
                        *a -= 2.0 * residual[c] * jac[c * n * dim + j * dim + k];
                    }
                }
                // u^(j) = F^(j) + sum_m C(j, m) M^(j-m) N^(m)
                let mult = &self.mult[p][k];
                let net_adj: Vec<f64> = (0..=n)
                    .map(|m| (m..=n).map(|j| u_adj[j] * binomial(j, m) * mult[j - m]).sum())
                    .collect();
                passes[k].backprop_into(&mlps[k], &net_adj, &mut grads[k])?;
            }
        }
        Ok(loss)
    }
}

/// Sum over collocation points and components of the squared residual
/// `u_k^(n)(x) - f_k(x, S_0, ..., S_{n-1})`.
pub fn residual_loss(problem: &OdeProblem, trials: &[TrialForm], mlps: &[Mlp], points: &[f64]) -> Result<f64> {
    LossContext::new(problem, trials, points)?.loss(mlps)
}

/// Build one trial per component with the configured basis.
pub fn build_trials(problem: &OdeProblem, basis: BasisForm) -> Result<Vec<TrialForm>> {
    problem.validate()?;
    problem
        .constraints
        .iter()
        .map(|list| {
            let trial = build_trial(list, problem.order, basis)?;
            trial.check_domain(problem.domain.0, problem.domain.1)?;
            Ok(trial)
        })
        .collect()
}

/// Seed of the `k`-th network of a run.
pub fn network_seed(seed: u64, component: usize) -> u64 {
    seed.wrapping_add(component as u64)
}

pub fn init_networks(problem: &OdeProblem, config: &TrainConfig) -> Result<Vec<Mlp>> {
    (0..problem.dim)
        .map(|k| Mlp::new(&config.layer_sizes, config.activation, network_seed(config.seed, k)))
        .collect()
}

/// Full-batch training of one network per component on a joint loss.
pub fn train(problem: &OdeProblem, config: &TrainConfig) -> Result<TrainingTrace> {
    config.validate()?;
    let trials = build_trials(problem, config.basis)?;
    let points = collocate(problem.domain, config.collocation_count)?;
    let ctx = LossContext::new(problem, &trials, &points)?;
    let mut mlps = init_networks(problem, config)?;
    let mut optimizers: Vec<Optimizer> = mlps
        .iter()
        .map(|m| Optimizer::new(config.optimizer, config.learning_rate, m.params().len()))
        .collect();
    let mut grads: Vec<ParamGradient> = mlps.iter().map(ParamGradient::zeros_like).collect();
    let mut losses = Vec::with_capacity(config.epochs / config.record_every + 2);

    // after `epoch` updates; epoch 0 is the untrained network
    for epoch in 0..=config.epochs {
        let loss = if epoch < config.epochs {
            ctx.loss_and_gradient(&mlps, &mut grads)?
        } else {
            ctx.loss(&mlps)?
        };
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch,
                trace: Box::new(TrainingTrace {
                    losses,
                    final_mlps: mlps,
                    final_trials: trials,
                }),
            });
        }
        let record = if epoch == 0 {
            config.record_every == 1
        } else {
            epoch % config.record_every == 0 || epoch == config.epochs
        };
        if record {
            losses.push((epoch, loss));
        }
        if epoch < config.epochs {
            for ((mlp, opt), grad) in mlps.iter_mut().zip(&mut optimizers).zip(&grads) {
                opt.step(mlp.params_mut(), grad.values());
            }
        }
    }

    Ok(TrainingTrace {
        losses,
        final_mlps: mlps,
        final_trials: trials,
    })
}

//! Solve ordinary differential equations with a small neural network placed
//! inside a trial solution that meets every initial or boundary condition by
//! construction.
//!
//! A trial has the shape `u(x) = F(x) + M(x) N(x)` where `F` carries the
//! conditions, `M` vanishes to the right order at each condition point and
//! `N` is an MLP. Training minimizes the squared ODE residual at collocation
//! points.

pub mod error;
pub mod mlp;
pub mod models;
pub mod optim;
pub mod poly;
pub mod problem;
pub mod taylor;
pub mod train;
pub mod trial;

/// Highest derivative order the network jets support.
pub const MAX_ORDER: usize = 8;

pub use error::{Error, Result};
pub use mlp::{Activation, Jet, Mlp, ParamGradient};
pub use models::{home_heating_problem, newton_cooling_problem, rk4_integrate, suspension_problem, Trajectory};
pub use optim::OptimizerKind;
pub use poly::{FactoredPoly, Polynomial};
pub use problem::{OdeProblem, Rhs};
pub use train::{collocate, lowest_k_average, residual_loss, train, TrainConfig, TrainingTrace};
pub use trial::{build_trial, BasisForm, ConstraintSpec, TrialForm};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use odenet::models::{
    home_heating_problem, newton_cooling_analytic, newton_cooling_problem, rk4_integrate, suspension_analytic,
    suspension_problem,
};
use odenet::train::{lowest_k_of, LowestAverage};
use odenet::{collocate, BasisForm, OdeProblem, TrainConfig, TrainingTrace};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{status_tag, CliError};
use crate::output::{cell, loss_curve_csv, solution_csv, write_atomic, RunManifest};
use crate::settings::Settings;

/// Size of the lowest-loss average reported by benchmarks and sweeps.
pub const LOWEST_K: usize = 100;
/// Points on the solution grid.
pub const GRID_POINTS: usize = 101;
/// Step of the RK4 reference.
pub const REFERENCE_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Cooling,
    Suspension,
    Heating,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Cooling => "cooling",
            Model::Suspension => "suspension",
            Model::Heating => "heating",
        }
    }

    pub fn problem(&self) -> OdeProblem {
        match self {
            Model::Cooling => newton_cooling_problem(),
            Model::Suspension => suspension_problem(),
            Model::Heating => home_heating_problem(),
        }
    }

    /// Reference solution on `grid`: analytic where one exists, RK4 otherwise.
    pub fn reference(&self, grid: &[f64]) -> Result<Vec<Vec<f64>>, CliError> {
        Ok(match self {
            Model::Cooling => grid.iter().map(|&t| vec![newton_cooling_analytic(t)]).collect(),
            Model::Suspension => grid.iter().map(|&t| vec![suspension_analytic(t)]).collect(),
            Model::Heating => {
                let problem = self.problem();
                let traj = rk4_integrate(&problem, REFERENCE_STEP, problem.domain.1)?;
                grid.iter().map(|&t| traj.sample(t)).collect()
            }
        })
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cooling" => Ok(Model::Cooling),
            "suspension" => Ok(Model::Suspension),
            "heating" => Ok(Model::Heating),
            other => Err(format!("unknown model `{other}` (expected cooling, suspension or heating)")),
        }
    }
}

pub fn parse_form(name: &str, s: &Settings) -> Result<BasisForm, CliError> {
    Ok(BasisForm::from_name(name, s.coefficient, s.log_base)?)
}

pub fn train_config(s: &Settings, basis: BasisForm, seed: u64) -> TrainConfig {
    TrainConfig {
        epochs: s.epochs,
        learning_rate: s.lr,
        optimizer: s.optimizer,
        collocation_count: s.points,
        basis,
        seed,
        record_every: s.record_every,
        ..TrainConfig::default()
    }
}

/// Recorded losses after at least one update.
pub fn trained_losses(trace: &TrainingTrace) -> Vec<(usize, f64)> {
    trace.losses.iter().copied().filter(|&(e, _)| e >= 1).collect()
}

fn lowest(losses: &[(usize, f64)]) -> Option<LowestAverage> {
    lowest_k_of(losses.iter().map(|&(_, l)| l), LOWEST_K).ok()
}

pub struct SolveReport {
    pub trace: TrainingTrace,
    pub grid: Vec<f64>,
    pub u_nn: Vec<Vec<f64>>,
    pub u_ref: Vec<Vec<f64>>,
    /// Per component.
    pub max_abs_err: Vec<f64>,
    pub loss_curve: PathBuf,
    pub solution: PathBuf,
    pub manifest: PathBuf,
}

pub fn solve(model: Model, form: &str, s: &Settings) -> Result<SolveReport, CliError> {
    let started = Instant::now();
    let basis = parse_form(form, s)?;
    let problem = model.problem();
    let trace = odenet::train(&problem, &train_config(s, basis, s.seed))?;

    let grid = collocate(problem.domain, GRID_POINTS)?;
    let u_nn = grid.iter().map(|&t| trace.values(t)).collect::<Result<Vec<_>, _>>()?;
    let u_ref = model.reference(&grid)?;
    let mut max_abs_err = vec![0.0f64; problem.dim];
    for (nn, reference) in u_nn.iter().zip(&u_ref) {
        for k in 0..problem.dim {
            max_abs_err[k] = max_abs_err[k].max((nn[k] - reference[k]).abs());
        }
    }

    let loss_curve = write_atomic(&s.out_dir, "loss_curve.csv", &loss_curve_csv(&trained_losses(&trace)))?;
    let solution = write_atomic(&s.out_dir, "solution.csv", &solution_csv(&grid, &u_nn, &u_ref))?;
    let manifest = RunManifest {
        command: "solve".into(),
        model: model.name().into(),
        settings: s.clone(),
        sweep: json!({ "form": basis.to_string() }),
        outputs: vec![loss_curve.clone(), solution.clone()],
        duration_seconds: started.elapsed().as_secs_f64(),
    }
    .write(&s.out_dir)?;

    Ok(SolveReport {
        trace,
        grid,
        u_nn,
        u_ref,
        max_abs_err,
        loss_curve,
        solution,
        manifest,
    })
}

/// Summary of one training run in a benchmark or sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RowResult {
    pub avg_lowest: Option<f64>,
    pub final_loss: Option<f64>,
    pub status: String,
}

fn run_row(problem: &OdeProblem, config: Result<TrainConfig, odenet::Error>) -> RowResult {
    let outcome = config.and_then(|c| odenet::train(problem, &c));
    let (losses, status) = match outcome {
        Ok(trace) => {
            let losses = trained_losses(&trace);
            let status = match lowest(&losses) {
                Some(avg) if avg.short => "short_trace",
                _ => "ok",
            };
            (losses, status.to_string())
        }
        Err(odenet::Error::NonFiniteLoss { trace, .. }) => (trained_losses(&trace), "diverged".to_string()),
        Err(e) => (Vec::new(), status_tag(&e).to_string()),
    };
    RowResult {
        avg_lowest: lowest(&losses).map(|a| a.mean),
        final_loss: losses.last().map(|&(_, l)| l),
        status,
    }
}

pub struct TableReport {
    pub rows: Vec<RowResult>,
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

pub fn benchmark(model: Model, forms: &[String], seeds: &[u64], s: &Settings) -> Result<TableReport, CliError> {
    let started = Instant::now();
    if forms.is_empty() {
        return Err(CliError::Usage("--forms must name at least one form".into()));
    }
    if seeds.is_empty() {
        return Err(CliError::Usage("--seeds must list at least one seed".into()));
    }
    // unknown names are a usage error; parameter problems become rows
    for f in forms {
        if !BasisForm::NAMES.contains(&f.as_str()) && f != "logarithm" {
            return Err(CliError::Usage(format!(
                "unknown form `{f}` (expected one of {})",
                BasisForm::NAMES.join(", ")
            )));
        }
    }
    let problem = model.problem();
    let jobs: Vec<(&String, u64)> = forms.iter().flat_map(|f| seeds.iter().map(move |&seed| (f, seed))).collect();
    let rows: Vec<RowResult> = jobs
        .par_iter()
        .map(|&(form, seed)| {
            let config = BasisForm::from_name(form, s.coefficient, s.log_base).map(|b| train_config(s, b, seed));
            run_row(&problem, config)
        })
        .collect();

    let mut out = String::from("form,seed,avg_lowest_100,final_loss,epochs,status\n");
    for ((form, seed), row) in jobs.iter().zip(&rows) {
        out.push_str(&format!(
            "{form},{seed},{},{},{},{}\n",
            cell(row.avg_lowest),
            cell(row.final_loss),
            s.epochs,
            row.status
        ));
    }
    let csv = write_atomic(&s.out_dir, "benchmark.csv", &out)?;
    let manifest = RunManifest {
        command: "benchmark".into(),
        model: model.name().into(),
        settings: s.clone(),
        sweep: json!({ "forms": forms, "seeds": seeds }),
        outputs: vec![csv.clone()],
        duration_seconds: started.elapsed().as_secs_f64(),
    }
    .write(&s.out_dir)?;
    Ok(TableReport { rows, csv, manifest })
}

pub fn sweep_coeff(model: Model, coefficients: &[f64], s: &Settings) -> Result<TableReport, CliError> {
    let started = Instant::now();
    if coefficients.is_empty() {
        return Err(CliError::Usage("--coefficients must list at least one value".into()));
    }
    let problem = model.problem();
    let rows: Vec<RowResult> = coefficients
        .par_iter()
        .map(|&c| {
            let basis = BasisForm::Polynomial { c };
            let config = basis.validate().map(|_| train_config(s, basis, s.seed));
            run_row(&problem, config)
        })
        .collect();

    let mut out = String::from("coefficient,avg_lowest_100,final_loss,status\n");
    for (c, row) in coefficients.iter().zip(&rows) {
        out.push_str(&format!(
            "{c},{},{},{}\n",
            cell(row.avg_lowest),
            cell(row.final_loss),
            row.status
        ));
    }
    let csv = write_atomic(&s.out_dir, "sweep_coeff.csv", &out)?;
    let manifest = RunManifest {
        command: "sweep-coeff".into(),
        model: model.name().into(),
        settings: s.clone(),
        sweep: json!({ "coefficients": coefficients }),
        outputs: vec![csv.clone()],
        duration_seconds: started.elapsed().as_secs_f64(),
    }
    .write(&s.out_dir)?;
    Ok(TableReport { rows, csv, manifest })
}

pub fn sweep_logbase(model: Model, bases: &[f64], s: &Settings) -> Result<TableReport, CliError> {
    let started = Instant::now();
    if bases.is_empty() {
        return Err(CliError::Usage("--bases must list at least one base".into()));
    }
    let problem = model.problem();
    // every base and the model's domain are checked before any training
    for &base in bases {
        let basis = BasisForm::Logarithmic { base };
        basis.validate()?;
        odenet::train::build_trials(&problem, basis)?;
    }
    let rows: Vec<RowResult> = bases
        .par_iter()
        .map(|&base| run_row(&problem, Ok(train_config(s, BasisForm::Logarithmic { base }, s.seed))))
        .collect();

    let mut out = String::from("base,avg_lowest_100,final_loss,status\n");
    for (b, row) in bases.iter().zip(&rows) {
        out.push_str(&format!(
            "{b},{},{},{}\n",
            cell(row.avg_lowest),
            cell(row.final_loss),
            row.status
        ));
    }
    let csv = write_atomic(&s.out_dir, "sweep_logbase.csv", &out)?;
    let manifest = RunManifest {
        command: "sweep-logbase".into(),
        model: model.name().into(),
        settings: s.clone(),
        sweep: json!({ "bases": bases }),
        outputs: vec![csv.clone()],
        duration_seconds: started.elapsed().as_secs_f64(),
    }
    .write(&s.out_dir)?;
    Ok(TableReport { rows, csv, manifest })
}

//! Command-line experiments for the `odenet` solver: single solves, form
//! benchmarks and parameter sweeps, all written as CSV.

pub mod commands;
pub mod error;
pub mod output;
pub mod settings;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use odenet::{BasisForm, OptimizerKind};

use crate::commands::Model;
use crate::error::CliError;
use crate::settings::{parse_base, parse_f64, parse_list, parse_u64, ConfigFile, Overrides, Settings};

#[derive(Debug, Parser)]
#[command(name = "odenet", version, about = "Train constraint-exact neural ODE solutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one model with one trial form and write its loss curve and solution.
    Solve {
        model: Model,
        form: String,
        #[command(flatten)]
        common: Common,
    },
    /// Train several forms over several seeds.
    Benchmark {
        model: Model,
        /// Comma-separated form names; all seven by default.
        #[arg(long)]
        forms: Option<String>,
        /// Comma-separated seeds; `--seed` alone by default.
        #[arg(long)]
        seeds: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Train the polynomial form with each coefficient.
    SweepCoeff {
        model: Model,
        #[arg(long)]
        coefficients: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Train the logarithmic form with each base (`e` allowed).
    SweepLogbase {
        model: Model,
        #[arg(long)]
        bases: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// adam or sgd.
    #[arg(long)]
    pub optimizer: Option<OptimizerKind>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of collocation points.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Polynomial form coefficient.
    #[arg(long)]
    pub coefficient: Option<f64>,
    /// Logarithmic form base.
    #[arg(long, value_parser = parse_base)]
    pub log_base: Option<f64>,
    /// Flat `key = value` file; flags win over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<(Settings, ConfigFile), CliError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let flags = Overrides {
            epochs: self.epochs,
            lr: self.lr,
            optimizer: self.optimizer,
            seed: self.seed,
            points: self.points,
            record_every: self.record_every,
            out_dir: self.out_dir.clone(),
            coefficient: self.coefficient,
            log_base: self.log_base,
        };
        Ok((Settings::resolve(&flags, &file)?, file))
    }
}

/// The flag if given, else the config-file entry, else `default`.
fn list_arg<T>(
    flag: &Option<String>,
    file: &ConfigFile,
    key: &str,
    item: impl Fn(&str) -> Result<T, String>,
    default: Vec<T>,
) -> Result<Vec<T>, CliError> {
    match flag.as_deref().or(file.get(key)) {
        Some(text) => parse_list(text, item).map_err(|e| CliError::Usage(format!("--{key}: {e}"))),
        None => Ok(default),
    }
}

pub fn execute(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Solve { model, form, common } => {
            let (s, _) = common.resolve()?;
            let report = commands::solve(*model, form, &s)?;
            let errs: Vec<String> = report.max_abs_err.iter().map(|e| format!("{e:e}")).collect();
            Ok(format!(
                "final loss {:e}, max abs error {}; wrote {}",
                report.trace.final_loss().unwrap_or(f64::NAN),
                errs.join(" "),
                s.out_dir.display()
            ))
        }
        Command::Benchmark { model, forms, seeds, common } => {
            let (s, file) = common.resolve()?;
            let all: Vec<String> = BasisForm::NAMES.iter().map(|n| n.to_string()).collect();
            let forms = list_arg(forms, &file, "forms", |f| Ok(f.to_string()), all)?;
            let seeds = list_arg(seeds, &file, "seeds", parse_u64, vec![s.seed])?;
            let report = commands::benchmark(*model, &forms, &seeds, &s)?;
            Ok(format!("{} rows; wrote {}", report.rows.len(), report.csv.display()))
        }
        Command::SweepCoeff { model, coefficients, common } => {
            let (s, file) = common.resolve()?;
            let coefficients = list_arg(coefficients, &file, "coefficients", parse_f64, vec![1.0, 5.0, 10.0, 30.0, 100.0])?;
            let report = commands::sweep_coeff(*model, &coefficients, &s)?;
            Ok(format!("{} rows; wrote {}", report.rows.len(), report.csv.display()))
        }
        Command::SweepLogbase { model, bases, common } => {
            let (s, file) = common.resolve()?;
            let bases = list_arg(bases, &file, "bases", parse_base, vec![2.0, std::f64::consts::E, 4.0, 10.0])?;
            let report = commands::sweep_logbase(*model, &bases, &s)?;
            Ok(format!("{} rows; wrote {}", report.rows.len(), report.csv.display()))
        }
    }
}

/// Parse `args` (program name first), run, and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

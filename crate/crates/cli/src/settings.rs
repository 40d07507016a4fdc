//! Flag and config-file resolution.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use odenet::OptimizerKind;
use serde::Serialize;

use crate::error::CliError;

/// Values given on the command line; `None` falls back to the config file,
/// then to the built-in default.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub epochs: Option<usize>,
    pub lr: Option<f64>,
    pub optimizer: Option<OptimizerKind>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub record_every: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub coefficient: Option<f64>,
    pub log_base: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub epochs: usize,
    pub lr: f64,
    #[serde(serialize_with = "as_display")]
    pub optimizer: OptimizerKind,
    pub seed: u64,
    pub points: usize,
    pub record_every: usize,
    pub out_dir: PathBuf,
    pub coefficient: f64,
    pub log_base: f64,
}

fn as_display<S: serde::Serializer>(v: &OptimizerKind, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            epochs: 20_000,
            lr: 1e-2,
            optimizer: OptimizerKind::Adam,
            seed: 42,
            points: 32,
            record_every: 1,
            out_dir: PathBuf::from("out"),
            coefficient: 1.0,
            log_base: std::f64::consts::E,
        }
    }
}

/// Flat `key = value` file. Blank lines and `#` comments are skipped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

const KEYS: &[&str] = &[
    "epochs",
    "lr",
    "optimizer",
    "seed",
    "points",
    "record_every",
    "out_dir",
    "coefficient",
    "log_base",
    "forms",
    "seeds",
    "coefficients",
    "bases",
];

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", i + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key `{key}`", i + 1)));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parsed<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| parse(v).map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))))
            .transpose()
    }
}

fn from_str<T: std::str::FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

/// A logarithm base; `e` names the natural logarithm.
pub fn parse_base(s: &str) -> Result<f64, String> {
    match s.trim() {
        "e" => Ok(std::f64::consts::E),
        other => other.parse::<f64>().map_err(|e| format!("bad base `{other}`: {e}")),
    }
}

pub fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(item).collect()
}

pub fn parse_f64(s: &str) -> Result<f64, String> {
    from_str(s)
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    from_str(s)
}

impl Settings {
    pub fn resolve(flags: &Overrides, file: &ConfigFile) -> Result<Self, CliError> {
        let d = Settings::default();
        let s = Settings {
            epochs: pick(flags.epochs, file.parsed("epochs", from_str)?, d.epochs),
            lr: pick(flags.lr, file.parsed("lr", from_str)?, d.lr),
            optimizer: pick(flags.optimizer, file.parsed("optimizer", from_str)?, d.optimizer),
            seed: pick(flags.seed, file.parsed("seed", from_str)?, d.seed),
            points: pick(flags.points, file.parsed("points", from_str)?, d.points),
            record_every: pick(flags.record_every, file.parsed("record_every", from_str)?, d.record_every),
            out_dir: pick(flags.out_dir.clone(), file.get("out_dir").map(PathBuf::from), d.out_dir),
            coefficient: pick(flags.coefficient, file.parsed("coefficient", from_str)?, d.coefficient),
            log_base: pick(flags.log_base, file.parsed("log_base", parse_base)?, d.log_base),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.epochs == 0 {
            return Err(CliError::Usage("--epochs must be at least 1".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(CliError::Usage(format!("--lr must be positive, got {}", self.lr)));
        }
        if self.points < 2 {
            return Err(CliError::Usage("--points must be at least 2".into()));
        }
        if self.record_every == 0 {
            return Err(CliError::Usage("--record-every must be at least 1".into()));
        }
        Ok(())
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

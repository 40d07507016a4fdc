//! CSV rendering, atomic file writes and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;
use crate::settings::Settings;

/// Write `contents` to `dir/name` through a temporary file in the same
/// directory so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(&path).map_err(|e| CliError::Io(e.error))?;
    Ok(path)
}

/// Plain `{}` formatting of a possibly missing number.
pub fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn loss_curve_csv(losses: &[(usize, f64)]) -> String {
    let mut out = String::from("epoch,loss\n");
    for (epoch, loss) in losses {
        writeln!(out, "{epoch},{loss}").unwrap();
    }
    out
}

/// `t,u_nn,u_ref,abs_err` for one component; `_k` suffixes otherwise.
pub fn solution_header(dim: usize) -> String {
    let cols = |prefix: &str| -> Vec<String> {
        if dim == 1 {
            vec![prefix.to_string()]
        } else {
            (0..dim).map(|k| format!("{prefix}_{k}")).collect()
        }
    };
    let mut names = vec!["t".to_string()];
    names.extend(cols("u_nn"));
    names.extend(cols("u_ref"));
    names.extend(cols("abs_err"));
    names.join(",")
}

pub fn solution_csv(grid: &[f64], u_nn: &[Vec<f64>], u_ref: &[Vec<f64>]) -> String {
    let dim = u_nn.first().map_or(0, Vec::len);
    let mut out = solution_header(dim);
    out.push('\n');
    for ((t, nn), reference) in grid.iter().zip(u_nn).zip(u_ref) {
        let mut row = vec![t.to_string()];
        row.extend(nn.iter().map(f64::to_string));
        row.extend(reference.iter().map(f64::to_string));
        row.extend(nn.iter().zip(reference).map(|(a, b)| (a - b).abs().to_string()));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub model: String,
    pub settings: Settings,
    /// Forms, seeds, coefficients or bases the command iterated over.
    pub sweep: serde_json::Value,
    pub outputs: Vec<PathBuf>,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let mut json = serde_json::to_string_pretty(self).map_err(|e| CliError::Usage(e.to_string()))?;
        json.push('\n');
        write_atomic(dir, "manifest.json", &json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headers() {
        assert_eq!(solution_header(1), "t,u_nn,u_ref,abs_err");
        assert_eq!(
            solution_header(2),
            "t,u_nn_0,u_nn_1,u_ref_0,u_ref_1,abs_err_0,abs_err_1"
        );
    }

    #[test]
    fn rows() {
        let csv = solution_csv(&[0.0, 0.5], &[vec![1.0], vec![2.5]], &[vec![1.0], vec![2.0]]);
        assert_eq!(csv, "t,u_nn,u_ref,abs_err\n0,1,1,0\n0.5,2.5,2,0.5\n");
        assert_eq!(loss_curve_csv(&[(1, 0.25), (2, 1e-9)]), "epoch,loss\n1,0.25\n2,0.000000001\n");
        assert_eq!(cell(None), "");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_atomic(dir.path(), "a.csv", "x\n").unwrap();
        write_atomic(dir.path(), "a.csv", "y\n").unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "y\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}

//! CSV and JSON emission. Numbers are written with 17 significant digits so
//! every f64 round-trips; identical runs produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kdvflat_core::genfun::GeneratingTable;
use serde::Serialize;

use crate::CliError;

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("cannot write {}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: &[Vec<f64>],
) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut buf = String::with_capacity(rows.len() * 32 + header.len() + 1);
    buf.push_str(header);
    buf.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                buf.push(',');
            }
            buf.push_str(&num(*v));
            first = false;
        }
        buf.push('\n');
    }
    let mut f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
    f.write_all(buf.as_bytes()).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("cannot serialize {name}: {e}")))?;
    fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
    Ok(path)
}

/// Serialized generating-function table: drift, sizes, and per-index
/// coefficient rows.
#[derive(Serialize)]
pub struct GenTableDump {
    pub a: f64,
    pub i_max: usize,
    pub n_terms: usize,
    pub coeffs: Vec<Vec<f64>>,
}

impl GenTableDump {
    pub fn from_table(t: &GeneratingTable) -> Self {
        Self {
            a: t.a(),
            i_max: t.i_max(),
            n_terms: t.n_terms(),
            coeffs: (0..=t.i_max()).map(|i| t.coeffs(i).to_vec()).collect(),
        }
    }
}

/// Long-form field snapshots, one row per (t, x) pair.
pub fn snapshot_rows(
    t_grid: &[f64],
    x_grid: &[f64],
    field_row: impl Fn(usize) -> Vec<f64>,
    n_slices: usize,
) -> Vec<Vec<f64>> {
    let n_t = t_grid.len();
    let mut rows = Vec::new();
    let slices = n_slices.min(n_t).max(2);
    for k in 0..slices {
        let idx = k * (n_t - 1) / (slices - 1);
        let y = field_row(idx);
        for (j, x) in x_grid.iter().enumerate() {
            rows.push(vec![t_grid[idx], *x, y[j]]);
        }
    }
    rows
}

//! Reachability pipeline: resolve the target into coefficients against the
//! generating functions, ramp the flat output from rest to the target jets
//! over [tau, T], then drive an independent solve from zero data and
//! compare its final state against the assembled target.

use std::path::Path;

use kdvflat_core::flatout::{extract_b, ReachOutput};
use kdvflat_core::genfun::{default_n_terms, GeneratingTable};
use kdvflat_core::pde::Solver;
use kdvflat_core::synth::synthesize_control;
use serde::Serialize;

use crate::artifacts::{ensure_dir, write_csv, write_json, GenTableDump};
use crate::config::{RunConfig, TargetSpec};
use crate::{CliError, SCHEMA_VERSION};

#[derive(Serialize)]
struct ReachReport {
    schema_version: u32,
    command: &'static str,
    config: RunConfig,
    n_trunc: usize,
    b: Vec<f64>,
    /// max_x |y(x, T) - y1(x)| over the solver grid.
    max_final_error: f64,
    /// Max coefficient defect of extracting b back from `sum b_i g_i`.
    roundtrip_defect: f64,
    /// Target boundary value y1(-1).
    target_left_value: f64,
    tail_bound: f64,
    max_control: f64,
    files: Vec<String>,
}

fn degree_levels(c: &[f64]) -> usize {
    let deg = c.iter().rposition(|v| *v != 0.0).unwrap_or(0);
    deg.saturating_sub(2) / 3
}

fn resolve_b(spec: &TargetSpec, a: f64) -> Result<Vec<f64>, CliError> {
    match spec {
        TargetSpec::Named { name } => match name.as_str() {
            "x2" => extract_b(&[0.0, 0.0, 1.0], a, 0).map_err(CliError::from_core),
            "x5" => extract_b(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0], a, 1).map_err(CliError::from_core),
            "fig1" => Ok((0..=6).map(|n| if n % 2 == 0 { 3.0 } else { -3.0 }).collect()),
            other => Err(CliError::Config(format!(
                "unknown target '{other}' (expected x2, x5, or fig1)"
            ))),
        },
        TargetSpec::Coeffs { b } => {
            if b.is_empty() {
                return Err(CliError::Config("empty target coefficient list".into()));
            }
            Ok(b.clone())
        }
        TargetSpec::Poly { c } => {
            extract_b(c, a, degree_levels(c)).map_err(CliError::from_core)
        }
    }
}

/// Power coefficients of `sum_i b_i g_i`.
fn assemble_target_coeffs(table: &GeneratingTable, b: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0; table.n_terms()];
    for (i, bi) in b.iter().enumerate() {
        for (k, c) in table.coeffs(i).iter().enumerate() {
            acc[k] += bi * c;
        }
    }
    acc
}

pub fn run(cfg: &RunConfig, out: &Path, quiet: bool) -> Result<(), CliError> {
    ensure_dir(out)?;
    let spec = cfg
        .target
        .as_ref()
        .ok_or_else(|| CliError::Config("reach needs a target".into()))?;
    let b = resolve_b(spec, cfg.a)?;
    let n_trunc = cfg.n_trunc.unwrap_or(b.len() + 4);
    if n_trunc < b.len() {
        return Err(CliError::Config(
            "truncation order must cover the target coefficients".into(),
        ));
    }

    let table = GeneratingTable::build(cfg.a, n_trunc, default_n_terms(n_trunc))
        .map_err(CliError::from_core)?;
    let z = ReachOutput::new(b.clone(), cfg.tau, cfg.t_final).map_err(CliError::from_core)?;

    let solver = Solver::new(cfg.a, cfg.discretization.build()?).map_err(CliError::from_core)?;
    let times: Vec<f64> = {
        let n_t = cfg.discretization.n_t;
        (0..=n_t)
            .map(|k| cfg.t_final * k as f64 / n_t as f64)
            .collect()
    };
    let signal = synthesize_control(&table, &z, &times, n_trunc).map_err(CliError::from_core)?;
    let y0 = vec![0.0; solver.x_grid().len()];
    let traj = solver
        .solve(&y0, &signal.values, cfg.t_final)
        .map_err(CliError::from_core)?;

    let last = traj.t_grid.len() - 1;
    let y_final = traj.field.row(last);
    let mut max_final_error = 0.0f64;
    let mut state_rows = Vec::with_capacity(y_final.len());
    for (j, x) in traj.x_grid.iter().enumerate() {
        let y1: f64 = b
            .iter()
            .enumerate()
            .map(|(i, bi)| bi * table.eval(i, *x, 0).unwrap_or(0.0))
            .sum();
        max_final_error = max_final_error.max((y_final[j] - y1).abs());
        state_rows.push(vec![*x, y_final[j], y1]);
    }

    let assembled = assemble_target_coeffs(&table, &b);
    let back = extract_b(&assembled, cfg.a, b.len() - 1).map_err(CliError::from_core)?;
    let roundtrip_defect = b
        .iter()
        .zip(back.iter())
        .fold(0.0f64, |m, (l, r)| m.max((l - r).abs()));

    let target_left_value: f64 = b
        .iter()
        .enumerate()
        .map(|(i, bi)| bi * table.boundary_value(i).unwrap_or(0.0))
        .sum();

    let u_rows: Vec<Vec<f64>> = times
        .iter()
        .zip(signal.values.iter())
        .map(|(t, u)| vec![*t, *u])
        .collect();
    let mut files = Vec::new();
    files.push(write_csv(out, "u.csv", "t,u", &u_rows)?.display().to_string());
    files.push(
        write_csv(out, "final_state.csv", "x,y,y_target", &state_rows)?
            .display()
            .to_string(),
    );
    files.push(
        write_json(out, "gentable.json", &GenTableDump::from_table(&table))?
            .display()
            .to_string(),
    );

    let report = ReachReport {
        schema_version: SCHEMA_VERSION,
        command: "reach",
        config: cfg.clone(),
        n_trunc,
        b: b.clone(),
        max_final_error,
        roundtrip_defect,
        target_left_value,
        tail_bound: signal.tail_bound,
        max_control: signal.max_abs(),
        files: files.clone(),
    };
    write_json(out, "report.json", &report)?;
    if !quiet {
        println!(
            "reach: final max error {max_final_error:.3e}, roundtrip defect {roundtrip_defect:.3e}, report in {}",
            out.display()
        );
    }
    Ok(())
}

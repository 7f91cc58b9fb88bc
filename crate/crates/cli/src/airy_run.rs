//! Airy-kernel study: sample the fundamental solution, check the mass
//! normalization with its oscillatory tail correction, and fit the Gevrey
//! order of line-solution spatial derivatives.

use std::path::Path;

use kdvflat_core::airy::{
    deriv_envelope_ratio, fundamental_solution, line_solution_deriv, mass_check, AiryTable,
};
use kdvflat_core::flatout::gevrey_fit_at;
use serde::Serialize;

use crate::artifacts::{ensure_dir, write_csv, write_json};
use crate::config::RunConfig;
use crate::{CliError, SCHEMA_VERSION};

const TABLE_N_MAX: usize = 140;
const TABLE_X_MAX: f64 = 9.0;
const MASS_WINDOW: f64 = 8.0;
const N_QUAD: usize = 240;
/// Compactly supported pulse (L^2 - s^2)^4 / L^8 on [-L, L], L = 1/2.
const PULSE_HALF_WIDTH: f64 = 0.5;

fn pulse(s: f64) -> f64 {
    let l2 = PULSE_HALF_WIDTH * PULSE_HALF_WIDTH;
    let r = (l2 - s * s) / l2;
    r * r * r * r
}

#[derive(Serialize)]
struct EnvelopePoint {
    r: f64,
    max_ratio: f64,
    argmax_order: usize,
}

#[derive(Serialize)]
struct AiryReport {
    schema_version: u32,
    command: &'static str,
    config: RunConfig,
    ai_zero: f64,
    /// E(0, 1/3); the kernel scale is 1 there, so this equals Ai(0).
    kernel_origin: f64,
    mass_windowed: f64,
    mass_tail_correction: f64,
    mass_defect: f64,
    line_orders: Vec<usize>,
    line_magnitudes: Vec<f64>,
    /// Fitted Gevrey order of the line-derivative growth.
    line_s_est: f64,
    envelope: Vec<EnvelopePoint>,
    files: Vec<String>,
}

pub fn run(cfg: &RunConfig, out: &Path, quiet: bool) -> Result<(), CliError> {
    ensure_dir(out)?;
    let table = AiryTable::build(TABLE_N_MAX, TABLE_X_MAX).map_err(CliError::from_core)?;

    let mut kernel_rows = Vec::new();
    for t in [0.1, 1.0 / 3.0, 1.0] {
        for j in 0..=60 {
            let x = -4.0 + 6.0 * j as f64 / 60.0;
            let e = fundamental_solution(&table, x, t).map_err(CliError::from_core)?;
            kernel_rows.push(vec![t, x, e]);
        }
    }

    let mass = mass_check(&table, MASS_WINDOW, N_QUAD).map_err(CliError::from_core)?;

    let support = (-PULSE_HALF_WIDTH, PULSE_HALF_WIDTH);
    let line_orders: Vec<usize> = (0..=10).map(|k| 3 * k).collect();
    let mut line_magnitudes = Vec::with_capacity(line_orders.len());
    for &p in &line_orders {
        let v = line_solution_deriv(&table, 0.0, 1.0 / 3.0, p, pulse, support, N_QUAD)
            .map_err(CliError::from_core)?;
        line_magnitudes.push(v.abs());
    }
    let fit = gevrey_fit_at(&line_orders, &line_magnitudes).map_err(CliError::from_core)?;

    let mut envelope = Vec::new();
    for r in [0.5, 0.9] {
        let (max_ratio, argmax_order) =
            deriv_envelope_ratio(&table, r).map_err(CliError::from_core)?;
        envelope.push(EnvelopePoint {
            r,
            max_ratio,
            argmax_order,
        });
    }

    let mut files = Vec::new();
    files.push(
        write_csv(out, "kernel.csv", "t,x,e", &kernel_rows)?
            .display()
            .to_string(),
    );

    let report = AiryReport {
        schema_version: SCHEMA_VERSION,
        command: "airy",
        config: cfg.clone(),
        ai_zero: table.deriv_at_zero(0),
        kernel_origin: fundamental_solution(&table, 0.0, 1.0 / 3.0)
            .map_err(CliError::from_core)?,
        mass_windowed: mass.windowed,
        mass_tail_correction: mass.tail_correction,
        mass_defect: mass.defect,
        line_orders,
        line_magnitudes,
        line_s_est: fit.s_est,
        envelope,
        files: files.clone(),
    };
    write_json(out, "report.json", &report)?;
    if !quiet {
        println!(
            "airy: mass defect {:.3e}, line-derivative order fit {:.4}, report in {}",
            mass.defect,
            fit.s_est,
            out.display()
        );
    }
    Ok(())
}

//! Series synthesis: state and boundary control assembled from a flat
//! output and a generating-function table, with a certified truncation
//! tail bound and a telescoping residual check.

use alloc::vec::Vec;

use crate::flatout::{Envelope, FlatOutput};
use crate::genfun::GeneratingTable;
use crate::jet::Jet;
use crate::linalg::Mat;
use crate::{Error, Result};

/// How a trajectory was produced; consumers comparing the two routes key
/// off this tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Series,
    PdeSolver,
}

/// Sampled boundary control u(t) = y(-1, t).
#[derive(Debug, Clone)]
pub struct ControlSignal {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Series truncation order the samples were assembled at.
    pub depth: usize,
    /// Certified bound on the dropped tail, uniform in t.
    pub tail_bound: f64,
}

impl ControlSignal {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)))
    }
}

/// Space-time field y(x, t) on a grid, rows indexed by time.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub field: Mat,
    pub provenance: Provenance,
}

/// Jet of z at t to the requested depth, zero-padding past the output's
/// certified cap. The padding error is exactly what the truncation and
/// final-state diagnostics measure.
fn padded_jet(z: &dyn FlatOutput, t: f64, depth: usize) -> Result<Jet> {
    let serve = match z.depth_cap() {
        Some(cap) if cap < depth => cap,
        _ => depth,
    };
    let jet = z.jet_at(t, serve)?;
    if serve == depth {
        return Ok(jet);
    }
    let mut coeffs = jet.coeffs().to_vec();
    coeffs.resize(depth + 1, 0.0);
    Jet::new(t, coeffs)
}

/// State profile y(x, t) = sum_{i<=N} g_i(x) z^(i)(t) on the given
/// x values.
pub fn assemble_state(
    table: &GeneratingTable,
    z: &dyn FlatOutput,
    t: f64,
    n_trunc: usize,
    xs: &[f64],
) -> Result<Vec<f64>> {
    if n_trunc > table.i_max() {
        return Err(Error::InvalidArgument("truncation order exceeds the table"));
    }
    let jet = padded_jet(z, t, n_trunc)?;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut y = 0.0;
        for i in 0..=n_trunc {
            y += table.eval(i, x, 0)? * jet.derivative(i);
        }
        out.push(y);
    }
    Ok(out)
}

/// Boundary control u(t) = sum_{i<=N} g_i(-1) z^(i)(t). During a declared
/// free phase the samples are exact zeros, not summed cancellations.
pub fn synthesize_control(
    table: &GeneratingTable,
    z: &dyn FlatOutput,
    times: &[f64],
    n_trunc: usize,
) -> Result<ControlSignal> {
    if n_trunc > table.i_max() {
        return Err(Error::InvalidArgument("truncation order exceeds the table"));
    }
    let mut gb = Vec::with_capacity(n_trunc + 1);
    for i in 0..=n_trunc {
        gb.push(table.boundary_value(i)?);
    }
    let tail_bound = truncation_bound(&z.envelope(), n_trunc, z.max_order())?;
    let free = z.free_until();
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        if matches!(free, Some(tf) if t <= tf) {
            values.push(0.0);
            continue;
        }
        let jet = padded_jet(z, t, n_trunc)?;
        let mut u = 0.0;
        for (i, &g) in gb.iter().enumerate() {
            u += g * jet.derivative(i);
        }
        values.push(u);
    }
    Ok(ControlSignal {
        times: times.to_vec(),
        values,
        depth: n_trunc,
        tail_bound,
    })
}

/// Full series trajectory on a space-time grid.
pub fn assemble_trajectory(
    table: &GeneratingTable,
    z: &dyn FlatOutput,
    t_grid: &[f64],
    x_grid: &[f64],
    n_trunc: usize,
) -> Result<Trajectory> {
    let mut field = Mat::zeros(t_grid.len(), x_grid.len());
    for (row, &t) in t_grid.iter().enumerate() {
        let profile = assemble_state(table, z, t, n_trunc, x_grid)?;
        for (col, &v) in profile.iter().enumerate() {
            field.set(row, col, v);
        }
    }
    Ok(Trajectory {
        x_grid: x_grid.to_vec(),
        t_grid: t_grid.to_vec(),
        field,
        provenance: Provenance::Series,
    })
}

/// Upper bound on the dropped series tail `sum_{i>N} |g_i(-1)| |z^(i)|`,
/// using |g_i(x)| <= |x|^{3i+2}/(3i+2)! and the output's envelope
/// |z^(i)| <= M (i!)^s / R^i. Summed in log space with a geometric
/// closure once the term ratio certifiably decays.
pub fn truncation_bound(
    env: &Envelope,
    n_trunc: usize,
    max_order: Option<usize>,
) -> Result<f64> {
    if let Some(d) = max_order {
        if n_trunc >= d {
            return Ok(0.0);
        }
    }
    if env.m_env == 0.0 {
        return Ok(0.0);
    }
    if env.s_env > 3.0 || (env.s_env >= 3.0 && env.r_env <= 1.0) {
        return Err(Error::DivergenceRisk(
            "derivative growth outside the convergent range",
        ));
    }
    let ln_m = libm::log(env.m_env);
    let ln_r = libm::log(env.r_env);
    let log_term = |i: f64| {
        ln_m + env.s_env * libm::lgamma(i + 1.0) - i * ln_r - libm::lgamma(3.0 * i + 3.0)
    };
    let mut lt = log_term((n_trunc + 1) as f64);
    let mut sum = 0.0f64;
    for k in 0..600 {
        if lt > 700.0 {
            return Err(Error::DivergenceRisk("tail term overflows"));
        }
        sum += libm::exp(lt);
        let next = log_term((n_trunc + 2 + k) as f64);
        let dl = next - lt;
        if dl < -0.7 {
            // ratios only shrink past this point, so a geometric series
            // with the current ratio majorizes the remainder
            let q = libm::exp(dl);
            return Ok(sum + libm::exp(next) / (1.0 - q));
        }
        lt = next;
    }
    Err(Error::DivergenceRisk("tail terms decay too slowly to certify"))
}

/// Pointwise defect of the truncated series against the evolution law.
#[derive(Debug, Clone, Copy)]
pub struct ResidualReport {
    pub max_defect: f64,
    /// Largest absolute-value sum among the defect's constituent terms;
    /// the cancellation scale the defect should be compared against.
    pub scale: f64,
    pub n_trunc: usize,
}

/// Checks that y_N = sum_{i<=N} g_i z^(i) satisfies
/// `d/dt y_N + P y_N = g_N z^(N+1)` to rounding on the sample grid. This
/// telescoping identity is exact in real arithmetic for every N, so any
/// defect beyond rounding flags a wrong table or jet.
pub fn residual_check(
    table: &GeneratingTable,
    z: &dyn FlatOutput,
    ts: &[f64],
    xs: &[f64],
    n_trunc: usize,
) -> Result<ResidualReport> {
    if n_trunc > table.i_max() {
        return Err(Error::InvalidArgument("truncation order exceeds the table"));
    }
    let a = table.a();
    let mut max_defect = 0.0f64;
    let mut scale = 0.0f64;
    for &t in ts {
        let jet = padded_jet(z, t, n_trunc + 1)?;
        for &x in xs {
            let mut dt_y = 0.0;
            let mut p_y = 0.0;
            let mut abs_dt = 0.0;
            let mut abs_p = 0.0;
            for i in 0..=n_trunc {
                let g = table.eval(i, x, 0)?;
                let pg = table.eval(i, x, 3)? + a * table.eval(i, x, 1)?;
                let term_dt = g * jet.derivative(i + 1);
                let term_p = pg * jet.derivative(i);
                dt_y += term_dt;
                p_y += term_p;
                abs_dt += libm::fabs(term_dt);
                abs_p += libm::fabs(term_p);
            }
            let closure = table.eval(n_trunc, x, 0)? * jet.derivative(n_trunc + 1);
            let defect = libm::fabs(dt_y + p_y - closure);
            max_defect = max_defect.max(defect);
            scale = scale.max(abs_dt).max(abs_p).max(libm::fabs(closure));
        }
    }
    Ok(ResidualReport {
        max_defect,
        scale,
        n_trunc,
    })
}

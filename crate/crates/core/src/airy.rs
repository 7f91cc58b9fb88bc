//! Airy kernel for the third-order smoothing semigroup.
//!
//! `E(x, t) = (3t)^{-1/3} Ai(x (3t)^{-1/3})` is the fundamental solution of
//! `y_t + y_xxx = 0`; convolving it against compactly supported data gives
//! line solutions whose spatial derivatives of every order stay bounded for
//! `t > 0`. `Ai` is entire, so a Taylor table about 0 built from
//! `Ai'' = x Ai` evaluates any derivative order on a bounded window. Mass
//! normalization `int Ai = 1` is checked with an explicit oscillatory tail
//! correction on the left.

use alloc::vec;
use alloc::vec::Vec;

use crate::quad::gauss_legendre;
use crate::{Error, Result};

const PI: f64 = core::f64::consts::PI;

/// Tail terms kept beyond the highest derivative order served by `eval`.
const EVAL_MARGIN: usize = 40;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Gamma function, Lanczos g = 7 with reflection for the left half line.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // sin(pi x) vanishes at the poles; the division reports them as inf.
        return PI / (libm::sin(PI * x) * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    libm::sqrt(2.0 * PI) * libm::pow(t, x + 0.5) * libm::exp(-t) * acc
}

/// Taylor table of `Ai` derivatives at 0, valid on `|x| <= x_max`.
#[derive(Debug, Clone)]
pub struct AiryTable {
    derivs: Vec<f64>,
    x_max: f64,
}

impl AiryTable {
    /// Seeds `Ai(0)`, `Ai'(0)` from gamma values and extends by
    /// `d_{k+3} = (k+1) d_k`, the derivative chain of `Ai'' = x Ai`.
    pub fn build(n_max: usize, x_max: f64) -> Result<Self> {
        if n_max < 2 * EVAL_MARGIN {
            return Err(Error::InvalidArgument("airy table needs n_max >= 80"));
        }
        if !(x_max > 0.0) {
            return Err(Error::InvalidArgument("airy window must be positive"));
        }
        let mut derivs = vec![0.0; n_max + 1];
        derivs[0] = 1.0 / (libm::pow(3.0, 2.0 / 3.0) * gamma(2.0 / 3.0));
        derivs[1] = -1.0 / (libm::pow(3.0, 1.0 / 3.0) * gamma(1.0 / 3.0));
        for k in 0..n_max.saturating_sub(2) {
            derivs[k + 3] = (k as f64 + 1.0) * derivs[k];
        }
        Ok(Self { derivs, x_max })
    }

    pub fn n_max(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn deriv_at_zero(&self, n: usize) -> f64 {
        self.derivs[n]
    }

    /// `Ai^{(d)}(x)` by Taylor summation. The series is entire with terms
    /// `~ x^k / (k!)^{2/3}`, so the fixed table length covers the window
    /// with margin; orders within `EVAL_MARGIN` of the table end are refused
    /// rather than served with a truncated tail.
    pub fn eval(&self, x: f64, d: usize) -> Result<f64> {
        if libm::fabs(x) > self.x_max {
            return Err(Error::Domain("point outside airy table window"));
        }
        if d + EVAL_MARGIN > self.n_max() {
            return Err(Error::DepthExceeded(
                "derivative order too close to airy table end",
            ));
        }
        let mut acc = 0.0;
        let mut term = 1.0; // x^k / k!
        for k in 0..=(self.n_max() - d) {
            if k > 0 {
                term *= x / k as f64;
            }
            acc += self.derivs[d + k] * term;
        }
        Ok(acc)
    }
}

/// Max residual of `Ai'' = x Ai` over a uniform grid on `[-half, half]`.
pub fn ode_defect(table: &AiryTable, half: f64, n_grid: usize) -> Result<f64> {
    if n_grid < 2 {
        return Err(Error::InvalidArgument("defect grid needs >= 2 points"));
    }
    let mut worst = 0.0f64;
    for j in 0..n_grid {
        let x = -half + 2.0 * half * j as f64 / (n_grid - 1) as f64;
        let r = table.eval(x, 2)? - x * table.eval(x, 0)?;
        worst = worst.max(libm::fabs(r));
    }
    Ok(worst)
}

/// `E(x, t) = (3t)^{-1/3} Ai(x (3t)^{-1/3})`.
pub fn fundamental_solution(table: &AiryTable, x: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain("fundamental solution needs t > 0"));
    }
    let c = libm::cbrt(3.0 * t);
    Ok(table.eval(x / c, 0)? / c)
}

/// Max of `|dt E + dx^3 E|` over the grid points whose scaled argument
/// stays inside the table window; `dt E` is expanded in closed form as
/// `-(3t)^{-4/3} (Ai + xi Ai')` so the check exercises the third-derivative
/// column of the table against the first two.
pub fn fundamental_defect(table: &AiryTable, ts: &[f64], xs: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut seen = false;
    for &t in ts {
        if !(t > 0.0) {
            return Err(Error::Domain("fundamental defect needs t > 0"));
        }
        let c = libm::cbrt(3.0 * t);
        let scale = libm::pow(c, -4.0);
        for &x in xs {
            let xi = x / c;
            if libm::fabs(xi) > table.x_max {
                continue;
            }
            seen = true;
            let dt_e = -scale * (table.eval(xi, 0)? + xi * table.eval(xi, 1)?);
            let dx3_e = scale * table.eval(xi, 3)?;
            worst = worst.max(libm::fabs(dt_e + dx3_e));
        }
    }
    if !seen {
        return Err(Error::Domain("no grid point inside airy table window"));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy)]
pub struct MassReport {
    /// Gauss-Legendre value of `int_{-W}^{W} Ai`.
    pub windowed: f64,
    /// Asymptotic estimate of the mass outside the window.
    pub tail_correction: f64,
    /// `|windowed + tail_correction - 1|`.
    pub defect: f64,
}

/// Oscillatory left-tail mass `int_{-inf}^{-W} Ai`, three-term asymptotic
/// in `z = (2/3) W^{3/2}`. The right tail is super-exponentially small and
/// folded into the same estimate's error.
fn tail_mass(window: f64) -> f64 {
    let z = 2.0 / 3.0 * libm::pow(window, 1.5);
    let zt = z + PI / 4.0;
    let (c, s) = (libm::cos(zt), libm::sin(zt));
    let pref = 1.0 / (libm::sqrt(PI) * libm::sqrt(1.5));
    pref * (c / libm::sqrt(z) + (41.0 / 72.0) * s / libm::pow(z, 1.5)
        - 0.8170 * c / libm::pow(z, 2.5))
}

/// Checks `int Ai = 1` as windowed quadrature plus tail correction.
pub fn mass_check(table: &AiryTable, window: f64, n_quad: usize) -> Result<MassReport> {
    if !(window > 0.0) || window > table.x_max {
        return Err(Error::Domain("mass window must fit the table"));
    }
    let (xs, ws) = gauss_legendre(n_quad, -window, window);
    let mut windowed = 0.0;
    for (x, w) in xs.iter().zip(ws.iter()) {
        windowed += w * table.eval(*x, 0)?;
    }
    let tail_correction = tail_mass(window);
    Ok(MassReport {
        windowed,
        tail_correction,
        defect: libm::fabs(windowed + tail_correction - 1.0),
    })
}

/// `p`-th spatial derivative of the line solution `int E(x - s, t) y0(s) ds`
/// for data supported on `[support.0, support.1]`. Nodes whose scaled
/// argument leaves the table window are skipped: there the kernel factor is
/// below the quadrature's own error for the windows used here.
pub fn line_solution_deriv<F>(
    table: &AiryTable,
    x: f64,
    t: f64,
    p: usize,
    y0: F,
    support: (f64, f64),
    n_quad: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(t > 0.0) {
        return Err(Error::Domain("line solution needs t > 0"));
    }
    if !(support.0 < support.1) {
        return Err(Error::InvalidArgument("empty support interval"));
    }
    let c = libm::cbrt(3.0 * t);
    let (ss, ws) = gauss_legendre(n_quad, support.0, support.1);
    let mut acc = 0.0;
    for (s, w) in ss.iter().zip(ws.iter()) {
        let xi = (x - s) / c;
        if libm::fabs(xi) > table.x_max {
            continue;
        }
        acc += w * y0(*s) * table.eval(xi, p)?;
    }
    Ok(acc / libm::pow(c, (p + 1) as f64))
}

pub fn line_solution<F>(
    table: &AiryTable,
    x: f64,
    t: f64,
    y0: F,
    support: (f64, f64),
    n_quad: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    line_solution_deriv(table, x, t, 0, y0, support, n_quad)
}

/// Max over `n` of `|Ai^{(n)}(0)| r^n / (n!)^{1/3}` and its argmax,
/// accumulated in log space. Boundedness of this ratio is what makes the
/// derivative-at-zero sequence Gevrey of order 1/3.
pub fn deriv_envelope_ratio(table: &AiryTable, r: f64) -> Result<(f64, usize)> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("envelope radius must be positive"));
    }
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for (n, d) in table.derivs.iter().enumerate() {
        if *d == 0.0 {
            continue;
        }
        let ln_ratio =
            libm::log(libm::fabs(*d)) + n as f64 * libm::log(r) - libm::lgamma(n as f64 + 1.0) / 3.0;
        if ln_ratio > best {
            best = ln_ratio;
            arg = n;
        }
    }
    Ok((libm::exp(best), arg))
}

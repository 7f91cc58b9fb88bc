//! Generating functions `g_i` on [-1, 0] for the flatness series.
//!
//! `g_0` solves `g_0''' + a g_0' = 0` with `g_0(0) = g_0'(0) = 0`,
//! `g_0''(0) = 1`; each `g_i` for `i >= 1` solves the same operator with
//! right-hand side `-g_{i-1}` and zero Cauchy data at 0. All `g_i` are
//! entire, so a single Taylor series about `x = 0` represents each of them
//! with factorially decaying coefficients; derivative evaluation of any
//! order is exact on that representation.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct GeneratingTable {
    a: f64,
    i_max: usize,
    n_terms: usize,
    coeffs: Vec<Vec<f64>>,
}

/// Series length that resolves `g_0..g_{i_max}` on [-1, 0] to roundoff.
pub fn default_n_terms(i_max: usize) -> usize {
    3 * i_max + 40
}

impl GeneratingTable {
    /// Build the table by the exact Taylor recurrence
    /// `(k+3)(k+2)(k+1) c_{k+3} + a (k+1) c_{k+1} = -p_k`
    /// where `p` are the coefficients of the previous function.
    pub fn build(a: f64, i_max: usize, n_terms: usize) -> Result<Self> {
        if !(a >= 0.0) {
            return Err(Error::InvalidArgument("drift coefficient must be >= 0"));
        }
        if n_terms < 3 * i_max + 3 {
            return Err(Error::InvalidArgument("n_terms must be at least 3*i_max + 3"));
        }
        let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(i_max + 1);
        for i in 0..=i_max {
            let mut c = vec![0.0; n_terms];
            if i == 0 {
                c[2] = 0.5;
            }
            for k in 0..n_terms.saturating_sub(3) {
                let kf = k as f64;
                let mut rhs = -a * (kf + 1.0) * c[k + 1];
                if i > 0 {
                    rhs -= coeffs[i - 1][k];
                }
                c[k + 3] = rhs / ((kf + 3.0) * (kf + 2.0) * (kf + 1.0));
            }
            let tail = c[n_terms - 3..]
                .iter()
                .fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
            if tail >= 1e-18 {
                return Err(Error::InsufficientResolution(
                    "generating-function series tail has not decayed",
                ));
            }
            coeffs.push(c);
        }
        Ok(GeneratingTable {
            a,
            i_max,
            n_terms,
            coeffs,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn i_max(&self) -> usize {
        self.i_max
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn coeffs(&self, i: usize) -> &[f64] {
        &self.coeffs[i]
    }

    /// `d`-th spatial derivative of `g_i` at `x` by differentiated Horner
    /// evaluation of the stored series.
    pub fn eval(&self, i: usize, x: f64, d: usize) -> Result<f64> {
        if i > self.i_max {
            return Err(Error::InvalidArgument("generating-function index above table"));
        }
        if !(-1.0..=0.0).contains(&x) {
            return Err(Error::Domain("generating functions certified on [-1,0] only"));
        }
        if d >= self.n_terms {
            return Err(Error::InvalidArgument("derivative order above series length"));
        }
        let c = &self.coeffs[i];
        let mut acc = 0.0;
        for j in (0..self.n_terms - d).rev() {
            // falling factorial (j+d)! / j!
            let mut fall = 1.0;
            for m in 1..=d {
                fall *= (j + m) as f64;
            }
            acc = acc * x + c[j + d] * fall;
        }
        Ok(acc)
    }

    /// `g_i(-1)`, the series weight of `z^(i)` in the control signal.
    pub fn boundary_value(&self, i: usize) -> Result<f64> {
        self.eval(i, -1.0, 0)
    }
}

/// Outcome of sweeping the factorial envelope `|g_i(x)| <= |x|^{3i+2}/(3i+2)!`.
#[derive(Debug, Clone)]
pub struct BoundReport {
    /// Max over the grid of `|g_i(x)| (3i+2)! / |x|^{3i+2}`, per index i.
    pub max_ratio_per_i: Vec<f64>,
    pub max_ratio: f64,
    /// Indices whose ratio exceeds 1 + 1e-10.
    pub violations: Vec<usize>,
}

/// Sweep the envelope on a grid of [-1, 0].
///
/// The series of `g_i` starts exactly at degree 3i+2, so the ratio equals
/// the shifted polynomial `|sum_j c_{3i+2+j} (3i+2)! x^j|`; scaling each
/// coefficient in log space sidesteps the under/overflow of forming
/// `|x|^{3i+2}` and `(3i+2)!` separately.
pub fn check_majorant(table: &GeneratingTable, grid: &[f64]) -> Result<BoundReport> {
    let mut max_ratio_per_i = Vec::with_capacity(table.i_max + 1);
    let mut violations = Vec::new();
    let mut max_ratio = 0.0f64;
    for i in 0..=table.i_max {
        let base = 3 * i + 2;
        let lg_fact = libm::lgamma(base as f64 + 1.0);
        let c = &table.coeffs[i];
        let shifted: Vec<f64> = (base..table.n_terms)
            .map(|k| {
                let v = c[k];
                if v == 0.0 {
                    0.0
                } else {
                    let mag = libm::exp(libm::log(libm::fabs(v)) + lg_fact);
                    if v < 0.0 {
                        -mag
                    } else {
                        mag
                    }
                }
            })
            .collect();
        let mut ratio_i = 0.0f64;
        for &x in grid {
            if !(-1.0..=0.0).contains(&x) {
                return Err(Error::Domain("envelope grid must lie in [-1,0]"));
            }
            let mut acc = 0.0;
            for &s in shifted.iter().rev() {
                acc = acc * x + s;
            }
            ratio_i = ratio_i.max(libm::fabs(acc));
        }
        if ratio_i > 1.0 + 1e-10 {
            violations.push(i);
        }
        max_ratio = max_ratio.max(ratio_i);
        max_ratio_per_i.push(ratio_i);
    }
    Ok(BoundReport {
        max_ratio_per_i,
        max_ratio,
        violations,
    })
}

/// Coefficients of `P f = f''' + a f'` from power-basis coefficients of `f`;
/// an exact linear map, applied `n` times.
pub fn apply_p(coeffs: &[f64], a: f64, n: usize) -> Vec<f64> {
    let mut cur = coeffs.to_vec();
    for _ in 0..n {
        if cur.len() <= 1 {
            cur = vec![0.0];
            continue;
        }
        let m = cur.len() - 1;
        let mut next = vec![0.0; m];
        for (k, nk) in next.iter_mut().enumerate() {
            let kf = k as f64;
            let mut v = 0.0;
            if k + 3 <= m {
                v += (kf + 1.0) * (kf + 2.0) * (kf + 3.0) * cur[k + 3];
            }
            v += a * (kf + 1.0) * cur[k + 1];
            *nk = v;
        }
        cur = next;
    }
    cur
}

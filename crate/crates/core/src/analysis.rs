//! Norm inequalities for the drift operator `P = d^3/dx^3 + a d/dx` on
//! polynomials over [-1, 0].
//!
//! Differentiation and `P` act exactly on coefficients, so the checks here
//! isolate the inequalities themselves from any discretization error: the
//! only approximate step is the L^p quadrature, and both sides of every
//! comparison go through the same norm code. The Sobolev norm used
//! throughout is the plain sum `sum_{i<=n} ||d^i f||_p`.

use alloc::vec;
use alloc::vec::Vec;

use crate::genfun::apply_p;
use crate::quad::adaptive_simpson;
use crate::rng::SplitMix64;
use crate::{Error, Result};

const QUAD_REL_TOL: f64 = 1e-9;
const INF_GRID: usize = 2001;
/// Relative slack in the pass predicate, safely above the quadrature
/// tolerance; genuine violations of these inequalities are O(1) relative.
const CHECK_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormP {
    One,
    Two,
    Inf,
}

/// Polynomial on [-1, 0], power-basis coefficients in ascending order.
#[derive(Debug, Clone)]
pub struct PolyFn {
    c: Vec<f64>,
}

impl PolyFn {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs coefficients"));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("polynomial coefficients must be finite"));
        }
        Ok(Self { c })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Index of the highest stored coefficient; trailing zeros count.
    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, v| acc * x + v)
    }

    pub fn derivative(&self) -> PolyFn {
        if self.c.len() == 1 {
            return PolyFn { c: vec![0.0] };
        }
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| k as f64 * v)
            .collect();
        PolyFn { c }
    }

    /// `f''' + a f'` by exact coefficient arithmetic.
    pub fn apply_drift(&self, a: f64) -> PolyFn {
        PolyFn {
            c: apply_p(&self.c, a, 1),
        }
    }
}

/// Uniform coefficients in [-1, 1] up to `max_degree`.
pub fn random_poly(rng: &mut SplitMix64, max_degree: usize) -> PolyFn {
    let c = (0..=max_degree).map(|_| rng.next_sym()).collect();
    PolyFn { c }
}

fn lp_norm(f: &PolyFn, p: NormP) -> f64 {
    // Coefficient magnitude anchors an absolute quadrature tolerance;
    // iterates of P inflate coefficients by orders of magnitude and a fixed
    // absolute tolerance would force needlessly deep refinement on them.
    let scale = f
        .c
        .iter()
        .fold(0.0f64, |m, v| m.max(libm::fabs(*v)))
        .max(1e-300);
    match p {
        NormP::Inf => {
            let mut worst = 0.0f64;
            for j in 0..INF_GRID {
                let x = -1.0 + j as f64 / (INF_GRID - 1) as f64;
                worst = worst.max(libm::fabs(f.eval(x)));
            }
            worst
        }
        NormP::One => adaptive_simpson(|x| libm::fabs(f.eval(x)), -1.0, 0.0, QUAD_REL_TOL * scale),
        NormP::Two => {
            let q = adaptive_simpson(
                |x| {
                    let v = f.eval(x);
                    v * v
                },
                -1.0,
                0.0,
                QUAD_REL_TOL * scale * scale,
            );
            libm::sqrt(q.max(0.0))
        }
    }
}

/// `sum_{i<=n} ||d^i f||_{L^p(-1,0)}`.
pub fn sobolev_norm(f: &PolyFn, n: usize, p: NormP) -> f64 {
    let mut cur = f.clone();
    let mut acc = lp_norm(&cur, p);
    for _ in 0..n {
        cur = cur.derivative();
        acc += lp_norm(&cur, p);
    }
    acc
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOutcome {
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; nonnegative when the inequality holds.
    pub margin: f64,
}

fn outcome(lhs: f64, rhs: f64) -> CheckOutcome {
    CheckOutcome {
        pass: lhs <= rhs * (1.0 + CHECK_SLACK),
        lhs,
        rhs,
        margin: rhs - lhs,
    }
}

/// Checks `||P^n f||_p <= (1+a)^n ||f||_{3n,p}`: each application of the
/// drift operator costs at most a factor `1 + a` against three more
/// derivative orders.
pub fn power_bound_check(f: &PolyFn, a: f64, n: usize, p: NormP) -> Result<CheckOutcome> {
    if !(a >= 0.0) {
        return Err(Error::InvalidArgument("drift coefficient must be >= 0"));
    }
    let pf = PolyFn {
        c: apply_p(&f.c, a, n),
    };
    let lhs = lp_norm(&pf, p);
    let rhs = libm::pow(1.0 + a, n as f64) * sobolev_norm(f, 3 * n, p);
    Ok(outcome(lhs, rhs))
}

/// Checks `(1 + 1/a)^{-1} (1+a)^{-n} sum_{i<=n} ||P^i f||_p <= ||f||_{3n,p}`,
/// the explicit-constant lower equivalence between the iterate sum and the
/// Sobolev norm. Needs `a > 0`: the constant degenerates at `a = 0`.
pub fn iterate_bound_check(f: &PolyFn, a: f64, n: usize, p: NormP) -> Result<CheckOutcome> {
    if !(a > 0.0) {
        return Err(Error::InvalidArgument("iterate bound needs a > 0"));
    }
    let mut sum = 0.0;
    let mut cur = f.c.clone();
    for i in 0..=n {
        if i > 0 {
            cur = apply_p(&cur, a, 1);
        }
        sum += lp_norm(&PolyFn { c: cur.clone() }, p);
    }
    let lhs = sum / ((1.0 + 1.0 / a) * libm::pow(1.0 + a, n as f64));
    let rhs = sobolev_norm(f, 3 * n, p);
    Ok(outcome(lhs, rhs))
}

/// Smallest constant over the sample with
/// `||f||_{3,p} <= C (||f||_p + ||P f||_p)`. The constant is existential,
/// so it is reported rather than compared against a target; enlarging the
/// sample can only increase it.
pub fn graph_constant_fit(fs: &[PolyFn], a: f64, p: NormP) -> Result<f64> {
    if fs.is_empty() {
        return Err(Error::InvalidArgument("graph constant needs a nonempty sample"));
    }
    if !(a >= 0.0) {
        return Err(Error::InvalidArgument("drift coefficient must be >= 0"));
    }
    let mut worst = 0.0f64;
    for f in fs {
        let graph = lp_norm(f, p) + lp_norm(&f.apply_drift(a), p);
        if graph == 0.0 {
            continue; // zero polynomial constrains nothing
        }
        worst = worst.max(sobolev_norm(f, 3, p) / graph);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL_P: [NormP; 3] = [NormP::One, NormP::Two, NormP::Inf];

    #[test]
    fn sobolev_norm_closed_forms() {
        let x = PolyFn::new(vec![0.0, 1.0]).unwrap();
        assert!((sobolev_norm(&x, 0, NormP::Inf) - 1.0).abs() < 1e-12);
        assert!((sobolev_norm(&x, 1, NormP::Inf) - 2.0).abs() < 1e-12);
        let x2 = PolyFn::new(vec![0.0, 0.0, 1.0]).unwrap();
        assert!((sobolev_norm(&x2, 0, NormP::Two) - 1.0 / libm::sqrt(5.0)).abs() < 1e-9);
        // ||x||_1 = 1/2, ||x||_2 = 1/sqrt(3)
        assert!((sobolev_norm(&x, 0, NormP::One) - 0.5).abs() < 1e-9);
        assert!((sobolev_norm(&x, 0, NormP::Two) - 1.0 / libm::sqrt(3.0)).abs() < 1e-9);
    }

    #[test]
    fn drift_application_is_exact() {
        let x5 = PolyFn::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let pf = x5.apply_drift(2.0);
        // P x^5 = 60 x^2 + 10 x^4
        assert_eq!(pf.coeffs(), &[0.0, 0.0, 60.0, 0.0, 10.0]);
        assert!(pf.degree() <= x5.degree() - 1);
    }

    #[test]
    fn power_bound_trivial_order_is_equality() {
        let f = PolyFn::new(vec![0.3, -1.0, 0.5, 2.0]).unwrap();
        for p in ALL_P {
            let out = power_bound_check(&f, 1.0, 0, p).unwrap();
            assert!(out.pass);
            assert!((out.lhs - out.rhs).abs() <= 1e-12 * out.rhs);
        }
    }

    #[test]
    fn power_bound_on_monomial() {
        let x5 = PolyFn::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        for p in ALL_P {
            let out = power_bound_check(&x5, 1.0, 1, p).unwrap();
            assert!(out.pass && out.margin > 0.0);
        }
    }

    #[test]
    fn iterate_bound_basics() {
        assert!(matches!(
            iterate_bound_check(&PolyFn::new(vec![1.0]).unwrap(), 0.0, 1, NormP::Two),
            Err(Error::InvalidArgument(_))
        ));
        let f = PolyFn::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let out = iterate_bound_check(&f, 1.0, 1, NormP::Two).unwrap();
        assert!(out.pass && out.margin > 0.0);
        // n = 0 reduces to a strict contraction of the plain norm
        let out0 = iterate_bound_check(&f, 2.0, 0, NormP::One).unwrap();
        assert!(out0.pass);
        assert!((out0.lhs - out0.rhs / 1.5).abs() < 1e-9 * out0.rhs);
    }

    #[test]
    fn random_sweep_has_no_failures() {
        let mut rng = SplitMix64::new(0x5eed_a41);
        for trial in 0..150 {
            let f = random_poly(&mut rng, 9);
            let a = [0.5, 1.0, 4.0][trial % 3];
            let n = trial % 4;
            for p in ALL_P {
                assert!(power_bound_check(&f, a, n, p).unwrap().pass);
                assert!(iterate_bound_check(&f, a, n, p).unwrap().pass);
            }
        }
    }

    #[test]
    fn graph_constant_monotone_in_sample() {
        let x2 = PolyFn::new(vec![0.0, 0.0, 1.0]).unwrap();
        let x5 = PolyFn::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let small = graph_constant_fit(&[x2.clone()], 1.0, NormP::Two).unwrap();
        let large = graph_constant_fit(&[x2, x5], 1.0, NormP::Two).unwrap();
        assert!(small.is_finite() && small > 0.0);
        assert!(large >= small);
        assert!(matches!(
            graph_constant_fit(&[], 1.0, NormP::Two),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn random_poly_is_seed_deterministic() {
        let a = random_poly(&mut SplitMix64::new(7), 6);
        let b = random_poly(&mut SplitMix64::new(7), 6);
        assert_eq!(a.coeffs(), b.coeffs());
    }
}

//! Quadrature: Gauss-Legendre rules (nodes by Newton iteration on the
//! Legendre recurrence) and adaptive Simpson integration.

use alloc::vec::Vec;
use core::f64::consts::PI;

/// Legendre polynomial value and derivative at `x` by the three-term
/// recurrence.
fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre nodes and weights on [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, d) = legendre_pd(n, x);
            let dx = p / d;
            x -= dx;
            if libm::fabs(dx) < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_pd(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        xs.push(0.5 * (b - a) * x + 0.5 * (a + b));
        ws.push(0.5 * (b - a) * w);
    }
    xs.reverse();
    ws.reverse();
    (xs, ws)
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || libm::fabs(delta) <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson integral of `f` over [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    adaptive_step(&mut f, a, b, fa, fm, fb, whole, tol, 30)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_exact_on_high_degree() {
        let (xs, ws) = gauss_legendre(8, -1.0, 1.0);
        // degree 15 is exact for an 8-point rule
        for deg in 0..=15usize {
            let exact = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            let q: f64 = xs
                .iter()
                .zip(ws.iter())
                .map(|(&x, &w)| libm::pow(x, deg as f64) * w)
                .sum();
            assert_relative_eq!(q, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn gauss_legendre_mapped_interval() {
        let (xs, ws) = gauss_legendre(16, 0.0, 2.0);
        let q: f64 = xs
            .iter()
            .zip(ws.iter())
            .map(|(&x, &w)| libm::exp(x) * w)
            .sum();
        assert_relative_eq!(q, libm::exp(2.0) - 1.0, max_relative = 1e-13);
    }

    #[test]
    fn adaptive_simpson_oscillatory() {
        let q = adaptive_simpson(|x| libm::sin(10.0 * x), 0.0, PI, 1e-12);
        let exact = (1.0 - libm::cos(10.0 * PI)) / 10.0;
        assert_relative_eq!(q, exact, epsilon = 1e-10);
    }
}

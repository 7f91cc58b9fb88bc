//! Chebyshev-Gauss-Lobatto machinery on the reference interval [-1, 1]:
//! nodes, the dense differentiation matrix, value-to-coefficient transform,
//! coefficient-space differentiation, and Clenshaw-Curtis weights.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::Mat;

/// Gauss-Lobatto nodes `xi_j = cos(j pi / n)`, ordered from +1 down to -1.
pub fn nodes(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![1.0];
    }
    (0..=n).map(|j| libm::cos(PI * j as f64 / n as f64)).collect()
}

/// First-derivative collocation matrix on the Gauss-Lobatto nodes.
/// Diagonal entries use the negative-sum trick, which keeps the matrix
/// exact on constants.
pub fn diff_matrix(n: usize) -> Mat {
    let xi = nodes(n);
    let mut d = Mat::zeros(n + 1, n + 1);
    if n == 0 {
        return d;
    }
    let c = |j: usize| -> f64 {
        let base = if j == 0 || j == n { 2.0 } else { 1.0 };
        if j % 2 == 0 {
            base
        } else {
            -base
        }
    };
    for i in 0..=n {
        let mut row_sum = 0.0;
        for j in 0..=n {
            if i == j {
                continue;
            }
            let v = c(i) / c(j) / (xi[i] - xi[j]);
            d.set(i, j, v);
            row_sum += v;
        }
        d.set(i, i, -row_sum);
    }
    d
}

/// Matrix mapping values at the Gauss-Lobatto nodes to coefficients `a_k`
/// of `f = sum_k a_k T_k` (no halving convention on `a_0`).
pub fn transform_matrix(n: usize) -> Mat {
    let mut a = Mat::zeros(n + 1, n + 1);
    if n == 0 {
        a.set(0, 0, 1.0);
        return a;
    }
    let nf = n as f64;
    for k in 0..=n {
        for j in 0..=n {
            let wj = if j == 0 || j == n { 0.5 } else { 1.0 };
            let mut v = (2.0 / nf) * wj * libm::cos(PI * (k * j) as f64 / nf);
            if k == 0 || k == n {
                v *= 0.5;
            }
            a.set(k, j, v);
        }
    }
    a
}

/// Chebyshev coefficients of `f'` from those of `f`, both with respect to
/// the reference variable `xi`.
pub fn deriv_coeffs(a: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let mut b = vec![0.0; n + 3];
    if n == 0 {
        return vec![0.0];
    }
    for k in (1..n).rev() {
        b[k] = b[k + 2] + 2.0 * (k + 1) as f64 * a[k + 1];
    }
    b[0] = b[2] / 2.0 + a[1];
    b.truncate(n + 1);
    b
}

/// Clenshaw-Curtis quadrature weights on [-1, 1] for the Gauss-Lobatto
/// nodes; exact for polynomials of degree `n` (degree `n+1` for odd `n`).
pub fn cc_weights(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![2.0];
    }
    let nf = n as f64;
    let theta: Vec<f64> = (0..=n).map(|j| PI * j as f64 / nf).collect();
    let mut w = vec![0.0; n + 1];
    let mut v = vec![1.0; n - 1];
    if n % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
        for k in 1..n / 2 {
            let kf = k as f64;
            for (vi, th) in v.iter_mut().zip(theta[1..n].iter()) {
                *vi -= 2.0 * libm::cos(2.0 * kf * th) / (4.0 * kf * kf - 1.0);
            }
        }
        for (vi, th) in v.iter_mut().zip(theta[1..n].iter()) {
            *vi -= libm::cos(nf * th) / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            let kf = k as f64;
            for (vi, th) in v.iter_mut().zip(theta[1..n].iter()) {
                *vi -= 2.0 * libm::cos(2.0 * kf * th) / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for j in 1..n {
        w[j] = 2.0 * v[j - 1] / nf;
    }
    w
}

/// Clenshaw evaluation of `sum_k a_k T_k(xi)`.
pub fn eval_series(a: &[f64], xi: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ak in a.iter().rev() {
        let b0 = 2.0 * xi * b1 - b2 + ak;
        b2 = b1;
        b1 = b0;
    }
    // Clenshaw tail: f = b1 - xi*b2 corrects the doubled T_0 contribution
    b1 - xi * b2
}

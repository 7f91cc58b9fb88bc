//! Truncated Taylor (jet) arithmetic.
//!
//! A jet stores scaled coefficients `coeffs[k] = f^(k)(t0) / k!`, so series
//! with factorially growing derivatives stay in range; raw derivatives are
//! materialized on demand. All recurrences are the standard power-series
//! ones (Cauchy product, recursive division, exp/log convolutions).

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    t0: f64,
    coeffs: Vec<f64>,
}

impl Jet {
    /// Build from raw scaled coefficients; all entries must be finite.
    pub fn new(t0: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("jet needs at least a constant term"));
        }
        if !t0.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("jet coefficients must be finite"));
        }
        Ok(Jet { t0, coeffs })
    }

    /// Jet of the identity map f(t) = t.
    pub fn var(t0: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = t0;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { t0, coeffs }
    }

    pub fn constant(t0: f64, value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { t0, coeffs }
    }

    pub fn zero(t0: f64, order: usize) -> Self {
        Jet {
            t0,
            coeffs: vec![0.0; order + 1],
        }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Raw derivative f^(k)(t0) = coeffs[k] * k!.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for j in 1..=k {
            fact *= j as f64;
        }
        self.coeff(k) * fact
    }

    fn check_compatible(&self, other: &Jet) -> Result<()> {
        if self.t0 != other.t0 {
            return Err(Error::InvalidArgument("jet expansion points differ"));
        }
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::InvalidArgument("jet orders differ"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet { t0: self.t0, coeffs })
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(Jet { t0: self.t0, coeffs })
    }

    pub fn neg(&self) -> Jet {
        Jet {
            t0: self.t0,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            t0: self.t0,
            coeffs: self.coeffs.iter().map(|c| s * c).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for k in 0..n {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.coeffs[j] * other.coeffs[k - j];
            }
            coeffs[k] = acc;
        }
        Ok(Jet { t0: self.t0, coeffs })
    }

    /// Recursive division; the divisor needs a nonzero constant term.
    pub fn div(&self, other: &Jet) -> Result<Jet> {
        self.check_compatible(other)?;
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return Err(Error::SingularJet);
        }
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * coeffs[k - j];
            }
            coeffs[k] = acc / b0;
        }
        Ok(Jet { t0: self.t0, coeffs })
    }

    /// Jet of exp(f). When exp of the constant term underflows to zero the
    /// whole jet is exactly zero in double precision, and the recurrence is
    /// short-circuited to avoid 0 * inf products deep in plateau regions.
    pub fn exp(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        let e0 = libm::exp(a0);
        if e0.is_infinite() {
            return Err(Error::Overflow("exp of jet constant term"));
        }
        let n = self.coeffs.len();
        if e0 == 0.0 {
            return Ok(Jet::zero(self.t0, n - 1));
        }
        let mut coeffs = vec![0.0; n];
        coeffs[0] = e0;
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.coeffs[j] * coeffs[k - j];
            }
            coeffs[k] = acc / k as f64;
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Overflow("exp jet coefficients"));
        }
        Ok(Jet { t0: self.t0, coeffs })
    }

    /// Jet of ln(f); requires a positive constant term.
    pub fn ln(&self) -> Result<Jet> {
        let a0 = self.coeffs[0];
        if a0 <= 0.0 {
            return Err(Error::Domain("log of jet with non-positive constant term"));
        }
        let n = self.coeffs.len();
        let mut coeffs = vec![0.0; n];
        coeffs[0] = libm::log(a0);
        for k in 1..n {
            let mut acc = k as f64 * self.coeffs[k];
            for j in 1..k {
                acc -= j as f64 * coeffs[j] * self.coeffs[k - j];
            }
            coeffs[k] = acc / (k as f64 * a0);
        }
        Ok(Jet { t0: self.t0, coeffs })
    }

    /// Jet of f^sigma for real sigma, via exp(sigma * ln f).
    pub fn powf(&self, sigma: f64) -> Result<Jet> {
        self.ln()?.scale(sigma).exp()
    }

    /// Jet of t -> f(alpha t + beta) at the pulled-back expansion point:
    /// coefficient k scales by alpha^k.
    pub fn compose_affine(&self, alpha: f64, beta: f64) -> Result<Jet> {
        if alpha == 0.0 {
            return Err(Error::InvalidArgument(
                "affine reparameterization needs nonzero slope",
            ));
        }
        let t0 = (self.t0 - beta) / alpha;
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut scale = 1.0;
        for &c in &self.coeffs {
            coeffs.push(c * scale);
            scale *= alpha;
        }
        Ok(Jet { t0, coeffs })
    }

    /// Change the recorded expansion point without touching coefficients.
    /// Used when a jet computed in a scaled variable is reinterpreted on the
    /// original time axis.
    pub fn with_t0(mut self, t0: f64) -> Jet {
        self.t0 = t0;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn var_examples() {
        assert_eq!(Jet::var(0.0, 2).coeffs(), &[0.0, 1.0, 0.0]);
        assert_eq!(Jet::var(3.0, 1).coeffs(), &[3.0, 1.0]);
        assert_eq!(Jet::var(0.0, 0).coeffs(), &[0.0]);
    }

    #[test]
    fn mul_of_var_is_square() {
        let t = Jet::var(0.0, 2);
        let sq = t.mul(&t).unwrap();
        assert_eq!(sq.coeffs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn add_and_div_by_constant() {
        let a = Jet::new(0.0, vec![1.0, 0.0]).unwrap();
        let b = Jet::new(0.0, vec![0.0, 1.0]).unwrap();
        assert_eq!(a.add(&b).unwrap().coeffs(), &[1.0, 1.0]);
        let c = Jet::new(0.0, vec![1.0, 1.0, 0.5]).unwrap();
        let one = Jet::constant(0.0, 1.0, 2);
        assert_eq!(c.div(&one).unwrap().coeffs(), c.coeffs());
    }

    #[test]
    fn div_by_zero_constant_rejected() {
        let a = Jet::var(0.0, 2);
        let z = Jet::zero(0.0, 2);
        assert_eq!(a.div(&z), Err(Error::SingularJet));
    }

    #[test]
    fn exp_of_var_is_e_series() {
        let e = Jet::var(0.0, 2).exp().unwrap();
        assert_eq!(e.coeffs(), &[1.0, 1.0, 0.5]);
        let z = Jet::zero(0.0, 2).exp().unwrap();
        assert_eq!(z.coeffs(), &[1.0, 0.0, 0.0]);
        let shifted = Jet::var(1.0, 1).exp().unwrap();
        assert_relative_eq!(shifted.coeff(0), libm::exp(1.0), max_relative = 1e-15);
        assert_relative_eq!(shifted.coeff(1), libm::exp(1.0), max_relative = 1e-15);
    }

    #[test]
    fn exp_underflow_shortcut_is_zero_jet() {
        let deep = Jet::new(0.0, vec![-1.0e5, 3.0, -2.0]).unwrap();
        let e = deep.exp().unwrap();
        assert_eq!(e.coeffs(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn powf_examples() {
        let c = Jet::constant(0.0, 1.0, 2).powf(2.5).unwrap();
        assert_eq!(c.coeffs(), &[1.0, 0.0, 0.0]);
        let r = Jet::constant(0.0, 4.0, 1).powf(0.5).unwrap();
        assert_relative_eq!(r.coeff(0), 2.0, max_relative = 1e-15);
        assert_relative_eq!(r.coeff(1), 0.0);
        let a = Jet::new(0.0, vec![1.0, 1.0, 0.0]).unwrap();
        let sq = a.powf(2.0).unwrap();
        let ref_sq = a.mul(&a).unwrap();
        for k in 0..=2 {
            assert_relative_eq!(sq.coeff(k), ref_sq.coeff(k), epsilon = 1e-14);
        }
    }

    #[test]
    fn compose_affine_chain_rule() {
        let a = Jet::var(0.0, 1).compose_affine(2.0, 0.0).unwrap();
        assert_eq!(a.coeffs(), &[0.0, 2.0]);
        let b = Jet::new(1.0, vec![1.0, 1.0, 1.0]).unwrap();
        let id = b.compose_affine(1.0, 0.0).unwrap();
        assert_eq!(id.coeffs(), b.coeffs());
        let scaled = Jet::new(0.5, vec![0.0, 1.0, 0.0]).unwrap()
            .compose_affine(0.25, 0.0)
            .unwrap();
        assert_relative_eq!(scaled.coeff(1), 0.25);
        assert_relative_eq!(scaled.t0(), 2.0);
    }

    #[test]
    fn sin_jets_match_analytic_derivatives_to_order_20() {
        // jets of sin built via exp-free closed form vs d/dt cycle
        for &t0 in &[0.3, -1.2, 2.0] {
            let order = 20;
            let mut coeffs = vec![0.0; order + 1];
            let mut fact = 1.0;
            for (k, c) in coeffs.iter_mut().enumerate() {
                if k > 0 {
                    fact *= k as f64;
                }
                let d = match k % 4 {
                    0 => libm::sin(t0),
                    1 => libm::cos(t0),
                    2 => -libm::sin(t0),
                    _ => -libm::cos(t0),
                };
                *c = d / fact;
            }
            let j = Jet::new(t0, coeffs).unwrap();
            for k in 0..=order {
                let expect = match k % 4 {
                    0 => libm::sin(t0),
                    1 => libm::cos(t0),
                    2 => -libm::sin(t0),
                    _ => -libm::cos(t0),
                };
                let got = j.derivative(k);
                assert_relative_eq!(got, expect, max_relative = 1e-10, epsilon = 1e-10);
            }
        }
    }

    fn arb_jet(order: usize) -> impl Strategy<Value = Jet> {
        proptest::collection::vec(-2.0..2.0f64, order + 1)
            .prop_map(|c| Jet::new(0.0, c).unwrap())
    }

    proptest! {
        #[test]
        fn mul_commutes(a in arb_jet(8), b in arb_jet(8)) {
            let ab = a.mul(&b).unwrap();
            let ba = b.mul(&a).unwrap();
            for k in 0..=8 {
                prop_assert!((ab.coeff(k) - ba.coeff(k)).abs() <= 1e-12 * (1.0 + ab.coeff(k).abs()));
            }
        }

        #[test]
        fn exp_ln_roundtrip(a in arb_jet(8)) {
            let shifted = a.add_scalar(5.0); // constant term in [3,7]
            let back = shifted.ln().unwrap().exp().unwrap();
            for k in 0..=8 {
                prop_assert!((back.coeff(k) - shifted.coeff(k)).abs()
                    <= 1e-12 * (1.0 + shifted.coeff(k).abs()));
            }
        }

        #[test]
        fn div_mul_roundtrip(a in arb_jet(6), b in arb_jet(6)) {
            let divisor = b.add_scalar(3.0);
            let q = a.div(&divisor).unwrap();
            let back = q.mul(&divisor).unwrap();
            for k in 0..=6 {
                prop_assert!((back.coeff(k) - a.coeff(k)).abs() <= 1e-10);
            }
        }
    }
}

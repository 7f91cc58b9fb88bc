//! Flat outputs z(t) driving the series synthesis: the smooth step
//! function `phi_s` with exact plateaus, the bump `1 - phi_2`, the
//! finite-jet reachability interpolant, and the trace-modulated
//! null-control output. Each output hands out jets of z at requested
//! times and carries a fitted derivative-growth envelope.

use alloc::vec;
use alloc::vec::Vec;

use crate::jet::Jet;
use crate::linalg::{lstsq, Mat};
use crate::{Error, Result};

/// Band around the plateau edges inside which the step function is snapped
/// to the plateau jet; `M / rho^sigma` overflows the exponential range well
/// before `rho` reaches this size.
const PLATEAU_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct StepParams {
    s: f64,
    m: f64,
    tau: f64,
    t_final: f64,
}

impl StepParams {
    pub fn new(s: f64, m: f64, tau: f64, t_final: f64) -> Result<Self> {
        if !(s > 1.0) || !s.is_finite() {
            return Err(Error::InvalidArgument("step order s must exceed 1"));
        }
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::InvalidArgument("step shape constant M must be positive"));
        }
        if !(0.0 < tau && tau < t_final) || !t_final.is_finite() {
            return Err(Error::InvalidArgument("need 0 < tau < T"));
        }
        Ok(StepParams { s, m, tau, t_final })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Exponent sigma = 1/(s-1), always derived, never stored.
    pub fn sigma(&self) -> f64 {
        1.0 / (self.s - 1.0)
    }
}

/// Jet of the step function at `rho` in the step variable.
///
/// phi = 1 on rho <= 0, phi = 0 on rho >= 1, and in between
/// `e^{-M/(1-rho)^sigma} / (e^{-M/rho^sigma} + e^{-M/(1-rho)^sigma})`.
/// Plateau jets are exact constants.
pub fn step_phi(params: &StepParams, rho: f64, depth: usize) -> Result<Jet> {
    if rho <= PLATEAU_CLAMP {
        return Ok(Jet::constant(rho, 1.0, depth));
    }
    if rho >= 1.0 - PLATEAU_CLAMP {
        return Ok(Jet::constant(rho, 0.0, depth));
    }
    let sigma = params.sigma();
    let r = Jet::var(rho, depth);
    let one_minus_r = r.neg().add_scalar(1.0);
    let e1 = one_minus_r.powf(-sigma)?.scale(-params.m).exp()?;
    let e0 = r.powf(-sigma)?.scale(-params.m).exp()?;
    let den = e0.add(&e1)?;
    e1.div(&den)
}

/// Jet in t of `phi_s((t - tau)/(T - tau))`.
pub fn step_phi_time(params: &StepParams, t: f64, depth: usize) -> Result<Jet> {
    let span = params.t_final - params.tau;
    let rho = (t - params.tau) / span;
    let phi = step_phi(params, rho, depth)?;
    // chain rule for the affine reparameterization: coefficient k picks up
    // span^-k, and the expansion point moves back to t
    Ok(phi.compose_affine(1.0 / span, -params.tau / span)?.with_t0(t))
}

/// Jet in t of the bump `g(t) = 1 - phi_2((t - tau)/(T - tau))`:
/// identically 0 up to tau, value 1 with all derivatives 0 at T.
pub fn bump_jet(tau: f64, t_final: f64, t: f64, depth: usize) -> Result<Jet> {
    let params = StepParams::new(2.0, 1.0, tau, t_final)?;
    let phi = step_phi_time(&params, t, depth)?;
    Jet::constant(t, 1.0, depth).sub(&phi)
}

/// Claimed derivative-growth envelope `|z^(i)| <= M_env (i!)^s_env / R_env^i`.
#[derive(Debug, Clone, Copy)]
pub struct Envelope {
    pub m_env: f64,
    pub r_env: f64,
    pub s_env: f64,
}

/// Source of jets of the boundary trace w(t) = y_xx(0, t), implemented by
/// the PDE module for solver trajectories.
pub trait TraceSource {
    fn w_jet(&self, t: f64, depth: usize) -> Result<Jet>;
    /// Time interval the source can serve.
    fn span(&self) -> (f64, f64);
    /// Highest certified jet depth.
    fn depth_cap(&self) -> usize;
}

/// A time-parameterized source of jets of the flat output z.
pub trait FlatOutput {
    fn jet_at(&self, t: f64, depth: usize) -> Result<Jet>;
    fn envelope(&self) -> Envelope;
    /// Time horizon [0, T] the output is defined on.
    fn horizon(&self) -> f64;
    /// The control is identically zero up to this time (null-control free
    /// phase); `None` when no such phase exists.
    fn free_until(&self) -> Option<f64> {
        None
    }
    /// Highest order with a nonzero derivative, for finite-support outputs.
    fn max_order(&self) -> Option<usize> {
        None
    }
    /// Highest certified jet depth; requests beyond it are served by
    /// zero-padding on the caller's side.
    fn depth_cap(&self) -> Option<usize> {
        None
    }
}

/// Reachability output z = g(t) f(t) with f the finite-jet interpolant
/// `sum_i b_i (t-T)^i / i!`: all jets vanish at 0, jets at T equal b.
#[derive(Debug, Clone)]
pub struct ReachOutput {
    b: Vec<f64>,
    tau: f64,
    t_final: f64,
    envelope: Envelope,
}

impl ReachOutput {
    pub fn new(b: Vec<f64>, tau: f64, t_final: f64) -> Result<Self> {
        if b.is_empty() || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("target jet list must be finite, nonempty"));
        }
        if !(0.0 < tau && tau < t_final) {
            return Err(Error::InvalidArgument("need 0 < tau < T"));
        }
        let mut out = ReachOutput {
            b,
            tau,
            t_final,
            envelope: Envelope {
                m_env: 0.0,
                r_env: 1.0,
                s_env: 2.0,
            },
        };
        out.envelope = out.fit_envelope()?;
        Ok(out)
    }

    fn f_jet(&self, t: f64, depth: usize) -> Jet {
        let dt = t - self.t_final;
        let n = self.b.len();
        let mut coeffs = vec![0.0; depth + 1];
        let mut j_fact = 1.0;
        for (j, cj) in coeffs.iter_mut().enumerate() {
            if j > 0 {
                j_fact *= j as f64;
            }
            if j >= n {
                break;
            }
            let mut acc = 0.0;
            let mut dt_pow = 1.0;
            let mut rem_fact = 1.0;
            for i in j..n {
                if i > j {
                    dt_pow *= dt;
                    rem_fact *= (i - j) as f64;
                }
                acc += self.b[i] * dt_pow / rem_fact;
            }
            *cj = acc / j_fact;
        }
        Jet::new(t, coeffs).expect("finite by construction")
    }

    /// Measured sup |z^(i)| over the horizon, fitted at s = 2 (the bump's
    /// Gevrey order; f is polynomial and does not raise it).
    fn fit_envelope(&self) -> Result<Envelope> {
        let depth = self.b.len() + 8;
        let samples = 41;
        let mut mags = vec![0.0f64; depth + 1];
        for k in 0..=samples {
            let t = self.t_final * k as f64 / samples as f64;
            let jet = self.jet_raw(t, depth)?;
            let mut fact = 1.0;
            for i in 0..=depth {
                if i > 0 {
                    fact *= i as f64;
                }
                mags[i] = mags[i].max(libm::fabs(jet.coeff(i)) * fact);
            }
        }
        let (m_env, r_env) = fit_fixed_order(&mags, 2.0)?;
        Ok(Envelope {
            m_env,
            r_env,
            s_env: 2.0,
        })
    }

    fn jet_raw(&self, t: f64, depth: usize) -> Result<Jet> {
        let g = bump_jet(self.tau, self.t_final, t, depth)?;
        g.mul(&self.f_jet(t, depth))
    }
}

impl FlatOutput for ReachOutput {
    fn jet_at(&self, t: f64, depth: usize) -> Result<Jet> {
        if depth < self.b.len() {
            return Err(Error::InvalidArgument(
                "jet depth below the prescribed target jet count",
            ));
        }
        self.jet_raw(t, depth)
    }

    fn envelope(&self) -> Envelope {
        self.envelope
    }

    fn horizon(&self) -> f64 {
        self.t_final
    }
}

/// Null-control output z(t) = phi_s((t-tau)/(T-tau)) w(t): coincides with
/// the trace w up to tau and vanishes with all derivatives at T.
pub struct NullControlOutput<S: TraceSource> {
    params: StepParams,
    source: S,
    envelope: Envelope,
}

impl<S: TraceSource> NullControlOutput<S> {
    pub fn new(params: StepParams, source: S) -> Result<Self> {
        if !(1.5..3.0).contains(&params.s()) {
            return Err(Error::InvalidArgument("null control needs s in [3/2, 3)"));
        }
        let (lo, hi) = source.span();
        if lo > params.tau() || hi < params.t_final() {
            return Err(Error::InvalidArgument(
                "trace source does not cover the modulation window [tau, T]",
            ));
        }
        let mut out = NullControlOutput {
            params,
            source,
            envelope: Envelope {
                m_env: 0.0,
                r_env: 1.0,
                s_env: 1.5,
            },
        };
        out.envelope = out.fit_envelope()?;
        Ok(out)
    }

    /// Sup of |z^(i)| sampled over the modulation window, fitted at the
    /// analytic trace regularity s = 3/2.
    fn fit_envelope(&self) -> Result<Envelope> {
        let depth = self.source.depth_cap();
        let (lo, _) = self.source.span();
        let start = lo.max(self.params.tau() * 0.5);
        let samples = 24;
        let mut mags = vec![0.0f64; depth + 1];
        for k in 0..=samples {
            let t = start
                + (self.params.t_final() - start) * k as f64 / samples as f64;
            let jet = self.jet_inner(t, depth)?;
            let mut fact = 1.0;
            for i in 0..=depth {
                if i > 0 {
                    fact *= i as f64;
                }
                mags[i] = mags[i].max(libm::fabs(jet.coeff(i)) * fact);
            }
        }
        let (m_env, r_env) = fit_fixed_order(&mags, 1.5)?;
        Ok(Envelope {
            m_env,
            r_env,
            s_env: 1.5,
        })
    }

    fn jet_inner(&self, t: f64, depth: usize) -> Result<Jet> {
        let span = self.params.t_final() - self.params.tau();
        let rho = (t - self.params.tau()) / span;
        if rho >= 1.0 - PLATEAU_CLAMP {
            return Ok(Jet::zero(t, depth));
        }
        let w = self.source.w_jet(t, depth)?;
        if rho <= PLATEAU_CLAMP {
            return Ok(w);
        }
        let phi = step_phi_time(&self.params, t, depth)?;
        phi.mul(&w)
    }
}

impl<S: TraceSource> FlatOutput for NullControlOutput<S> {
    fn jet_at(&self, t: f64, depth: usize) -> Result<Jet> {
        if depth > self.source.depth_cap() {
            return Err(Error::DepthExceeded("beyond the trace source depth cap"));
        }
        self.jet_inner(t, depth)
    }

    fn envelope(&self) -> Envelope {
        self.envelope
    }

    fn horizon(&self) -> f64 {
        self.params.t_final()
    }

    fn free_until(&self) -> Option<f64> {
        Some(self.params.tau())
    }

    fn depth_cap(&self) -> Option<usize> {
        Some(self.source.depth_cap())
    }
}

/// Polynomial flat output `z(t) = sum_k c_k t^k`; its series state is an
/// exact PDE solution once the truncation passes the degree, which makes it
/// the manufactured-solution driver.
#[derive(Debug, Clone)]
pub struct PolyOutput {
    c: Vec<f64>,
    t_final: f64,
}

impl PolyOutput {
    pub fn new(c: Vec<f64>, t_final: f64) -> Result<Self> {
        if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("polynomial coefficients must be finite"));
        }
        if !(t_final > 0.0) {
            return Err(Error::InvalidArgument("horizon must be positive"));
        }
        Ok(PolyOutput { c, t_final })
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }
}

impl FlatOutput for PolyOutput {
    fn jet_at(&self, t: f64, depth: usize) -> Result<Jet> {
        let mut coeffs = vec![0.0; depth + 1];
        // shift the expansion point by Horner on jet coefficients
        for j in 0..=depth {
            if j >= self.c.len() {
                break;
            }
            let mut acc = 0.0;
            let mut binom = 1.0;
            let mut t_pow = 1.0;
            for i in j..self.c.len() {
                if i > j {
                    t_pow *= t;
                    binom *= i as f64 / (i - j) as f64;
                }
                acc += self.c[i] * binom * t_pow;
            }
            coeffs[j] = acc;
        }
        Jet::new(t, coeffs)
    }

    fn envelope(&self) -> Envelope {
        let mut m_env = 0.0f64;
        let mut fact = 1.0;
        for (i, &ci) in self.c.iter().enumerate() {
            if i > 0 {
                fact *= i as f64;
            }
            m_env = m_env.max(libm::fabs(ci) * fact);
        }
        Envelope {
            m_env,
            r_env: 1.0,
            s_env: 1.0,
        }
    }

    fn horizon(&self) -> f64 {
        self.t_final
    }

    fn max_order(&self) -> Option<usize> {
        Some(self.degree())
    }
}

/// Target jets for the reachability pipeline: `b_n = (-1)^n (P^n y1)''(0)`,
/// computed exactly on the power-series coefficients of the target state.
/// The sign alternation makes the round trip `sum_n b_n g_n = y1` hold;
/// see the round-trip tests.
pub fn extract_b(y1: &[f64], a: f64, n: usize) -> Result<Vec<f64>> {
    if y1.is_empty() {
        return Err(Error::InvalidArgument("empty target coefficient list"));
    }
    let scale = y1.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v))).max(1.0);
    let mut b = Vec::with_capacity(n + 1);
    let mut cur = y1.to_vec();
    for m in 0..=n {
        let v0 = cur.first().copied().unwrap_or(0.0);
        let v1 = cur.get(1).copied().unwrap_or(0.0);
        if libm::fabs(v0) > 1e-10 * scale || libm::fabs(v1) > 1e-10 * scale {
            return Err(Error::NotReachable(
                "target violates (P^n y)(0) = (P^n y)'(0) = 0",
            ));
        }
        let d2 = 2.0 * cur.get(2).copied().unwrap_or(0.0);
        b.push(if m % 2 == 0 { d2 } else { -d2 });
        cur = crate::genfun::apply_p(&cur, a, 1);
    }
    Ok(b)
}

/// Fitted Gevrey envelope of a derivative-magnitude sequence.
#[derive(Debug, Clone, Copy)]
pub struct GevreyFit {
    pub s_est: f64,
    pub r_est: f64,
    pub c_est: f64,
    /// Trailing orders were exactly zero (polynomial-type input).
    pub finite_support: bool,
    pub orders_used: usize,
}

/// Least-squares fit of `log sup|z^(i)| ~ log C + s log(i!) - i log R`.
/// Zero magnitudes are excluded from the fit; trailing zeros flag finite
/// support.
pub fn gevrey_fit(mags: &[f64]) -> Result<GevreyFit> {
    let orders: Vec<usize> = (0..mags.len()).collect();
    gevrey_fit_at(&orders, mags)
}

/// `gevrey_fit` over an explicit (possibly strided) order list; `mags[k]`
/// is the magnitude at derivative order `orders[k]`.
pub fn gevrey_fit_at(orders: &[usize], mags: &[f64]) -> Result<GevreyFit> {
    if orders.len() != mags.len() {
        return Err(Error::InvalidArgument("orders and magnitudes differ in length"));
    }
    if mags.len() < 8 {
        return Err(Error::InvalidArgument("gevrey fit needs at least 8 orders"));
    }
    let last_nonzero = match mags.iter().rposition(|&m| m > 0.0) {
        Some(i) => i,
        None => return Err(Error::InvalidArgument("gevrey fit of all-zero magnitudes")),
    };
    let finite_support = last_nonzero + 1 < mags.len();
    let used: Vec<(usize, f64)> = mags[..=last_nonzero]
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(k, &m)| (orders[k], m))
        .collect();
    if used.len() < 3 {
        return Err(Error::InvalidArgument("gevrey fit needs 3 nonzero orders"));
    }
    let mut a = Mat::zeros(used.len(), 3);
    let mut rhs = vec![0.0; used.len()];
    for (row, &(i, m)) in used.iter().enumerate() {
        a.set(row, 0, 1.0);
        a.set(row, 1, libm::lgamma(i as f64 + 1.0));
        a.set(row, 2, -(i as f64));
        rhs[row] = libm::log(m);
    }
    let c = lstsq(&a, &rhs)?;
    Ok(GevreyFit {
        s_est: c[1],
        r_est: libm::exp(c[2]),
        c_est: libm::exp(c[0]),
        finite_support,
        orders_used: used.len(),
    })
}

/// Two-parameter fit (C, R) of the envelope at a fixed Gevrey order.
fn fit_fixed_order(mags: &[f64], s: f64) -> Result<(f64, f64)> {
    let used: Vec<(usize, f64)> = mags
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(i, &m)| (i, m))
        .collect();
    if used.len() < 2 {
        // degenerate source (e.g. zero trace); any envelope bounds it
        return Ok((mags.iter().fold(0.0f64, |a, &b| a.max(b)), 1.0));
    }
    let mut a = Mat::zeros(used.len(), 2);
    let mut rhs = vec![0.0; used.len()];
    for (row, &(i, m)) in used.iter().enumerate() {
        a.set(row, 0, 1.0);
        a.set(row, 1, -(i as f64));
        rhs[row] = libm::log(m) - s * libm::lgamma(i as f64 + 1.0);
    }
    let c = lstsq(&a, &rhs)?;
    Ok((libm::exp(c[0]), libm::exp(c[1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfun::GeneratingTable;
    use approx::assert_relative_eq;

    fn params2() -> StepParams {
        StepParams::new(2.0, 1.0, 0.5, 1.0).unwrap()
    }

    #[test]
    fn plateaus_are_exact_constant_jets() {
        let p = params2();
        let lo = step_phi(&p, -0.2, 6).unwrap();
        assert_eq!(lo.coeffs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let hi = step_phi(&p, 1.3, 6).unwrap();
        assert_eq!(hi.coeffs(), &[0.0; 7]);
        // clamp band snaps to the plateau
        let edge = step_phi(&p, 1e-13, 4).unwrap();
        assert_eq!(edge.coeffs(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn midpoint_jet_matches_reference_values() {
        // scaled Taylor coefficients of phi_2 at rho = 1/2 (M = 1); the
        // underlying derivative values are exact integers: phi''' = 16,
        // phi^(5) = 3328, phi^(7) = -137216
        let reference = [
            0.5,
            -2.0,
            0.0,
            2.6666666666666665,
            0.0,
            27.733333333333334,
            0.0,
            -27.225396825396825,
            0.0,
            -556.7887125220459,
            0.0,
            -546.6193105659772,
            0.0,
        ];
        let jet = step_phi(&params2(), 0.5, 12).unwrap();
        for (k, &expect) in reference.iter().enumerate() {
            assert_relative_eq!(jet.coeff(k), expect, max_relative = 1e-11, epsilon = 1e-11);
        }
    }

    #[test]
    fn symmetry_and_monotonicity() {
        let p = params2();
        for k in 1..20 {
            let rho = k as f64 / 20.0;
            let a = step_phi(&p, rho, 0).unwrap().value();
            let b = step_phi(&p, 1.0 - rho, 0).unwrap().value();
            assert_relative_eq!(a + b, 1.0, epsilon = 1e-14);
        }
        let mut prev = 1.0;
        for k in 0..=400 {
            let rho = k as f64 / 400.0;
            let v = step_phi(&p, rho, 0).unwrap().value();
            assert!(v <= prev + 1e-15, "phi not monotone at rho={rho}");
            prev = v;
        }
    }

    #[test]
    fn gluing_limits_match_plateau_jets() {
        let p = params2();
        // just inside each plateau edge, outside the clamp band
        for &(rho, plateau) in &[(1e-9, 1.0), (1.0 - 1e-9, 0.0)] {
            let jet = step_phi(&p, rho, 10).unwrap();
            assert_relative_eq!(jet.coeff(0), plateau, epsilon = 1e-10);
            for k in 1..=10 {
                assert!(
                    libm::fabs(jet.coeff(k)) <= 1e-10,
                    "order {k} at rho={rho}: {}",
                    jet.coeff(k)
                );
            }
        }
    }

    #[test]
    fn bump_boundary_jets() {
        let g_at_t = bump_jet(0.5, 1.0, 1.0, 8).unwrap();
        assert_eq!(g_at_t.coeff(0), 1.0);
        for k in 1..=8 {
            assert_eq!(g_at_t.coeff(k), 0.0);
        }
        let g_early = bump_jet(0.5, 1.0, 0.2, 8).unwrap();
        assert_eq!(g_early.coeffs(), &[0.0; 9]);
        let g_mid = bump_jet(0.5, 1.0, 0.75, 4).unwrap();
        assert_relative_eq!(g_mid.coeff(0), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn reach_output_prescribes_jets() {
        let z = ReachOutput::new(vec![1.0], 0.5, 1.0).unwrap();
        let at_t = z.jet_at(1.0, 6).unwrap();
        assert_relative_eq!(at_t.coeff(0), 1.0);
        assert_relative_eq!(at_t.derivative(1), 0.0);
        let at_zero = z.jet_at(0.0, 6).unwrap();
        assert_eq!(at_zero.coeffs(), &[0.0; 7]);

        let b = vec![3.0, -3.0, 3.0];
        let z = ReachOutput::new(b.clone(), 0.5, 1.0).unwrap();
        let at_t = z.jet_at(1.0, 8).unwrap();
        for (i, &bi) in b.iter().enumerate() {
            assert_relative_eq!(at_t.derivative(i), bi, epsilon = 1e-12);
        }
        for i in 0..=8 {
            assert!(libm::fabs(z.jet_at(0.0, 8).unwrap().coeff(i)) <= 1e-12);
        }
    }

    #[test]
    fn reach_zero_target_is_zero_output() {
        let z = ReachOutput::new(vec![0.0, 0.0], 0.25, 1.0).unwrap();
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let jet = z.jet_at(t, 4).unwrap();
            assert!(jet.coeffs().iter().all(|&c| c == 0.0));
        }
    }

    #[test]
    fn reach_depth_guard() {
        let z = ReachOutput::new(vec![1.0, 2.0, 3.0], 0.5, 1.0).unwrap();
        assert!(z.jet_at(0.7, 2).is_err());
        assert!(z.jet_at(0.7, 3).is_ok());
    }

    #[test]
    fn extract_b_on_monomials() {
        let b = extract_b(&[0.0, 0.0, 1.0], 0.0, 4).unwrap();
        assert_eq!(b[0], 2.0);
        assert!(b[1..].iter().all(|&v| v == 0.0));

        let x5 = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let b = extract_b(&x5, 0.0, 3).unwrap();
        assert_eq!(b[0], 0.0);
        assert_relative_eq!(b[1], -120.0);
        assert_eq!(b[2], 0.0);
    }

    #[test]
    fn extract_b_round_trip() {
        // sum_n b_n g_n reproduces the target coefficients
        let table = GeneratingTable::build(0.0, 6, 60).unwrap();
        let targets: [&[f64]; 2] = [&[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]];
        for y1 in targets {
            let b = extract_b(y1, 0.0, 6).unwrap();
            let mut recon = vec![0.0; 60];
            for (i, &bi) in b.iter().enumerate() {
                for (k, &c) in table.coeffs(i).iter().enumerate() {
                    recon[k] += bi * c;
                }
            }
            for k in 0..60 {
                let expect = y1.get(k).copied().unwrap_or(0.0);
                assert_relative_eq!(recon[k], expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn extract_b_fig1_series() {
        // y1 = 3 sum_n x^{3n+2}/(3n+2)! has b_n = 3 (-1)^n
        let mut y1 = vec![0.0; 32];
        for n in 0..10 {
            let k = 3 * n + 2;
            let mut fact = 1.0;
            for m in 1..=k {
                fact *= m as f64;
            }
            y1[k] = 3.0 / fact;
        }
        let b = extract_b(&y1, 0.0, 6).unwrap();
        for (n, &bn) in b.iter().enumerate() {
            let expect = if n % 2 == 0 { 3.0 } else { -3.0 };
            assert_relative_eq!(bn, expect, max_relative = 1e-10);
        }
    }

    #[test]
    fn extract_b_rejects_bad_targets() {
        assert!(matches!(
            extract_b(&[0.0, 1.0], 0.0, 1),
            Err(Error::NotReachable(_))
        ));
        // x^3: P(x^3)(0) = 6 != 0
        assert!(matches!(
            extract_b(&[0.0, 0.0, 0.0, 1.0], 0.0, 1),
            Err(Error::NotReachable(_))
        ));
    }

    #[test]
    fn gevrey_fit_exponential() {
        // z = e^t on [0, 1]: every derivative sup is e
        let mags = vec![libm::exp(1.0); 16];
        let fit = gevrey_fit(&mags).unwrap();
        assert!(libm::fabs(fit.s_est) < 0.15, "s_est = {}", fit.s_est);
        assert!(
            libm::fabs(fit.r_est - 1.0) < 0.15,
            "r_est = {}",
            fit.r_est
        );
        assert!(!fit.finite_support);
    }

    #[test]
    fn gevrey_fit_flags_polynomials() {
        let mut mags = vec![0.0; 12];
        mags[0] = 2.0;
        mags[1] = 3.0;
        mags[2] = 6.0;
        mags[3] = 6.0;
        let fit = gevrey_fit(&mags).unwrap();
        assert!(fit.finite_support);
        assert_eq!(fit.orders_used, 4);
        assert!(gevrey_fit(&vec![0.0; 12]).is_err());
        assert!(gevrey_fit(&[1.0; 5]).is_err());
    }

    #[test]
    fn step_params_validation() {
        assert!(StepParams::new(1.0, 1.0, 0.5, 1.0).is_err());
        assert!(StepParams::new(2.0, 0.0, 0.5, 1.0).is_err());
        assert!(StepParams::new(2.0, 1.0, 1.5, 1.0).is_err());
        let p = StepParams::new(1.5, 1.0, 0.5, 1.0).unwrap();
        assert_relative_eq!(p.sigma(), 2.0);
    }

    #[test]
    fn poly_output_jets_shift_correctly() {
        // z = 1 + 2t + 3t^2
        let z = PolyOutput::new(vec![1.0, 2.0, 3.0], 1.0).unwrap();
        let jet = z.jet_at(0.5, 4).unwrap();
        assert_relative_eq!(jet.coeff(0), 1.0 + 1.0 + 0.75);
        assert_relative_eq!(jet.derivative(1), 2.0 + 3.0);
        assert_relative_eq!(jet.derivative(2), 6.0);
        assert_eq!(jet.coeff(3), 0.0);
        assert_eq!(z.max_order(), Some(2));
    }
}

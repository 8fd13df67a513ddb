//! Quantum shutter on a square barrier: the internal-region transient
//!
//!   Ψ^i = φ_k M(y_k) − φ_{-k} M(y_{-k}) − Σ_n ρ_n M(y_{k_n}),
//!
//! with y_q = −e^{-iπ/4} [(ħ/2m) t]^{1/2} q and M(y) = ½ w(iy).
//!
//! The resonant sum converges slowly close to the barrier edges, so the
//! amplitude used for analysis is evaluated from the equivalent contour
//! representation
//!
//!   Ψ^i = (i/2π) ∫_Γ dk' 2k φ_{k'}(x) e^{-i(ħ/2m)k'²t} / (k'² − k²),
//!
//! with Γ deformed onto the steepest-descent line k' = s e^{-iπ/4}. The
//! deformation picks up φ_k e^{-iE0 t/ħ} and the resonant terms
//! −ρ_n e^{-iε_n t/ħ}, which decay as e^{-2(ħ/2m) a_n b_n t}.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::faddeeva::{w, FRAC_1_SQRT_PI};
use crate::params::{derive_scales, MediumParams};
use crate::quadrature::{integrate_split, QuadratureSpec};
use crate::resonances::{principal_q, resonant_states, rho_factor, sinc_terms, ResonantState};
use crate::wavefunction::Wavefunction;

/// Resonant terms are dropped once |e^{-iε_n t/ħ}| falls below e^{-POLE_CUTOFF}.
const POLE_CUTOFF: f64 = 40.0;
/// The ray integral is cut where the Gaussian factor reaches e^{-RAY_CUTOFF}.
const RAY_CUTOFF: f64 = 60.0;
/// Default shortest time the pole table must resolve (fs).
pub const DEFAULT_T_MIN: f64 = 0.05;

/// Transmission and reflection amplitudes for unit incidence from the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scattering {
    pub transmission: Complex64,
    pub reflection: Complex64,
}

fn check_inside(x: f64, l: f64) -> Result<()> {
    if !(0.0..=l).contains(&x) {
        return Err(Error::Domain(format!("x = {x} nm lies outside the barrier [0, {l}]")));
    }
    Ok(())
}

/// φ_{k'}(x) for complex k', without overflow anywhere in the k' plane.
///
/// With s = ±q' chosen so that Im s ≥ 0 and M± = s ± k',
///
///   φ = 2k' (M₊ + M₋ e^{2is(L−x)}) e^{isx} / (M₊² − M₋² e^{2isL}),
///
/// where the smaller of M± is taken from M₊M₋ = −k_V².
pub(crate) fn phi_complex(kp: Complex64, x: f64, k_v: f64, l: f64) -> Complex64 {
    let i = Complex64::i();
    let mut s = principal_q(kp, k_v);
    if s.norm() * l < 0.5 {
        let (c, sq, _) = sinc_terms(s, l);
        let exit = 2.0 * i * kp / (2.0 * i * kp * c + (s * s + kp * kp) * sq);
        let (c, sq, _) = sinc_terms(s, x - l);
        return exit * (c + i * kp * sq);
    }
    if s.im < 0.0 {
        s = -s;
    }
    let (mut mp, mut mm) = (s + kp, s - kp);
    let kv2 = k_v * k_v;
    if mp.norm() >= mm.norm() {
        mm = -kv2 / mp;
    } else {
        mp = -kv2 / mm;
    }
    let e1 = (2.0 * i * s * (l - x)).exp();
    let e2 = (2.0 * i * s * l).exp();
    2.0 * kp * (mp + mm * e1) * (i * s * x).exp() / (mp * mp - mm * mm * e2)
}

pub fn scattering(k: f64, params: &MediumParams) -> Result<Scattering> {
    let l = params.length()?;
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Domain(format!("scattering needs real k != 0, got {k}")));
    }
    let kv = params.k_barrier();
    let kc = Complex64::new(k, 0.0);
    let phi0 = phi_complex(kc, 0.0, kv, l);
    let exit = phi_complex(kc, l, kv, l);
    Ok(Scattering {
        transmission: exit * Complex64::from_polar(1.0, -k * l),
        reflection: phi0 - 1.0,
    })
}

/// Stationary solution inside the barrier for incidence e^{ikx} from the left.
/// Negative `k` gives φ_{-k}, which equals conj(φ_k).
pub fn phi_stationary(k: f64, x: f64, params: &MediumParams) -> Result<Complex64> {
    let l = params.length()?;
    check_inside(x, l)?;
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Domain(format!("stationary solution needs real k != 0, got {k}")));
    }
    Ok(phi_complex(Complex64::new(k, 0.0), x, params.k_barrier(), l))
}

/// M(y) = ½ w(iy) and dM/dt for y = y_q(t).
fn moshinsky_pair(y: Complex64, t: f64) -> (Complex64, Complex64) {
    let m = 0.5 * w(Complex64::i() * y);
    let dm = (2.0 * y * m - FRAC_1_SQRT_PI) * y / (2.0 * t);
    (m, dm)
}

/// Number of resonant states needed so that every omitted term of the
/// contour form is below e^{-40} for t ≥ `t_min`.
pub fn poles_needed(params: &MediumParams, t_min: f64) -> Result<usize> {
    let l = params.length()?;
    if !(t_min > 0.0) || !t_min.is_finite() {
        return Err(Error::Domain(format!("t_min must be positive, got {t_min}")));
    }
    let c = 0.5 * params.hbar_over_m();
    let kv = params.k_barrier();
    // a_n ≈ √((nπ/L)² + k_V²), b_n ≈ 2 ln(2a_n/k_V)/L
    let exponent = |n: f64| {
        let a = ((n * PI / l).powi(2) + kv * kv).sqrt();
        let b = 2.0 * (2.0 * a / kv).ln() / l;
        2.0 * c * t_min * a * b
    };
    let mut n = 16.0;
    while exponent(n) < POLE_CUTOFF {
        n *= 1.25;
    }
    Ok((1.2 * n).ceil() as usize)
}

/// A one-dimensional table of |Ψ^i|² snapshots: `density[j][i]` belongs to
/// `times[j]` and `x[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotTable {
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    pub density: Vec<Vec<f64>>,
}

/// Shutter transient for one incidence energy, built on a table of resonant
/// states.
#[derive(Debug, Clone)]
pub struct ShutterSolution {
    params: MediumParams,
    k: f64,
    states: Vec<ResonantState>,
    quad: QuadratureSpec,
}

impl ShutterSolution {
    /// Builds the solution with the first `n` resonant states.
    pub fn new(params: MediumParams, n: usize) -> Result<Self> {
        let states = resonant_states(&params, n)?;
        Self::from_states(params, states)
    }

    /// Builds a table long enough to evaluate the exact amplitude for t ≥ `t_min`.
    pub fn covering(params: MediumParams, t_min: f64) -> Result<Self> {
        let n = poles_needed(&params, t_min)?;
        Self::new(params, n)
    }

    /// Reuses a pole table built for the same V and L; poles do not depend on E0.
    pub fn from_states(params: MediumParams, states: Vec<ResonantState>) -> Result<Self> {
        let scales = derive_scales(&params)?;
        let l = params.length()?;
        if states.iter().any(|s| s.length() != l || s.k_barrier() != params.k_barrier()) {
            return Err(Error::Domain("pole table was built for a different barrier".into()));
        }
        Ok(Self {
            params,
            k: scales.k,
            states,
            quad: QuadratureSpec {
                rel_tol: 1e-11,
                abs_tol: 1e-14,
                max_intervals: 4000,
            },
        })
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    pub fn truncation(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[ResonantState] {
        &self.states
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    fn c(&self) -> f64 {
        0.5 * self.params.hbar_over_m()
    }

    fn check_time(t: f64) -> Result<()> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("shutter needs t >= 0, got t = {t}")));
        }
        Ok(())
    }

    /// The resonant sum truncated at `n` states, and its time derivative when t > 0.
    fn resonant_sum(&self, x: f64, t: f64, n: usize) -> Result<(Complex64, Complex64)> {
        check_inside(x, self.params.length()?)?;
        Self::check_time(t)?;
        let n = n.min(self.states.len());
        let k = self.k;
        let phi = phi_stationary(k, x, &self.params)?;
        let zero = Complex64::new(0.0, 0.0);
        if t == 0.0 {
            let mut sum = zero;
            for s in &self.states[..n] {
                let r = rho_factor(k, s, x);
                sum += r - r.conj();
            }
            return Ok((0.5 * (phi - phi.conj() - sum), zero));
        }
        let s = self.c().sqrt() * t.sqrt();
        let yf = -Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2) * s;
        let (mk, dmk) = moshinsky_pair(yf * k, t);
        let (mmk, dmmk) = moshinsky_pair(-yf * k, t);
        let mut psi = phi * mk - phi.conj() * mmk;
        let mut dpsi = phi * dmk - phi.conj() * dmmk;
        for s in &self.states[..n] {
            let r = rho_factor(k, s, x);
            let kn = s.pole.k;
            let (m1, d1) = moshinsky_pair(yf * kn, t);
            let (m2, d2) = moshinsky_pair(-yf * kn.conj(), t);
            // ρ_{-n} = −conj(ρ_n)
            psi -= r * m1 - r.conj() * m2;
            dpsi -= r * d1 - r.conj() * d2;
        }
        Ok((psi, dpsi))
    }

    /// Ψ^i from the resonant sum with the first `n` pole pairs.
    pub fn psi_truncated(&self, x: f64, t: f64, n: usize) -> Result<Complex64> {
        self.resonant_sum(x, t, n).map(|v| v.0)
    }

    /// Ψ^i from the resonant sum over the whole table.
    pub fn psi_internal(&self, x: f64, t: f64) -> Result<Complex64> {
        self.psi_truncated(x, t, self.states.len())
    }

    /// The resonant sum over the whole table, rejected when halving the
    /// table changes |Ψ^i|² by more than `tol` relative.
    pub fn psi_internal_checked(&self, x: f64, t: f64, tol: f64) -> Result<Complex64> {
        let n = self.states.len();
        let coarse = self.psi_truncated(x, t, n / 2)?;
        let fine = self.psi_truncated(x, t, n)?;
        let (a, b) = (coarse.norm_sqr(), fine.norm_sqr());
        if (a - b).abs() > tol * b.max(f64::MIN_POSITIVE) {
            return Err(Error::Truncation {
                n: n / 2,
                coarse: a,
                fine: b,
            });
        }
        Ok(fine)
    }

    /// Ψ^i and ∂Ψ^i/∂t from the contour representation.
    pub fn psi_exact_and_dt(&self, x: f64, t: f64) -> Result<(Complex64, Complex64)> {
        let l = self.params.length()?;
        check_inside(x, l)?;
        Self::check_time(t)?;
        let zero = Complex64::new(0.0, 0.0);
        if t == 0.0 {
            return Ok((zero, zero));
        }
        let i = Complex64::i();
        let c = self.c();
        let k = self.k;
        let kv = self.params.k_barrier();

        let stationary = phi_complex(Complex64::new(k, 0.0), x, kv, l) * Complex64::from_polar(1.0, -c * k * k * t);
        let mut psi = stationary;
        let mut dpsi = -i * c * k * k * stationary;
        let mut resolved = false;
        for s in &self.states {
            let kn = s.pole.k;
            let arg = -i * c * kn * kn * t;
            if arg.re < -POLE_CUTOFF {
                resolved = true;
                break;
            }
            let term = rho_factor(k, s, x) * arg.exp();
            psi -= term;
            dpsi += i * c * kn * kn * term;
        }
        if !resolved {
            return Err(Error::PoleTable {
                n: self.states.len(),
                t,
            });
        }

        let dir = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);
        let span = (RAY_CUTOFF / (c * t)).sqrt();
        let integrand = |s: f64| {
            let kp = s * dir;
            let g = (-c * t * s * s).exp() * 2.0 * k * phi_complex(kp, x, kv, l) / (kp * kp - k * k);
            [g, -c * s * s * g]
        };
        let est = integrate_split(integrand, &[-span, 0.0, span], &self.quad)?;
        let pref = i / (2.0 * PI) * dir;
        psi += pref * est.value[0];
        dpsi += pref * est.value[1];
        Ok((psi, dpsi))
    }

    pub fn psi_exact(&self, x: f64, t: f64) -> Result<Complex64> {
        self.psi_exact_and_dt(x, t).map(|v| v.0)
    }

    /// |φ_k(x)|², the density the transient relaxes to.
    pub fn stationary_density(&self, x: f64) -> Result<f64> {
        phi_stationary(self.k, x, &self.params).map(|p| p.norm_sqr())
    }

    /// |Ψ^i|² on `x_grid` at each of `times`.
    pub fn density_snapshots(&self, times: &[f64], x_grid: &[f64]) -> Result<SnapshotTable> {
        let density = times
            .iter()
            .map(|&t| x_grid.par_iter().map(|&x| self.density(x, t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(SnapshotTable {
            x: x_grid.to_vec(),
            times: times.to_vec(),
            density,
        })
    }
}

impl Wavefunction for ShutterSolution {
    fn params(&self) -> &MediumParams {
        &self.params
    }

    fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
        self.psi_exact(x, t)
    }

    fn psi_and_dt(&self, x: f64, t: f64) -> Option<Result<(Complex64, Complex64)>> {
        Some(self.psi_exact_and_dt(x, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn barrier() -> MediumParams {
        MediumParams::new(0.067, 1.0, 0.1).unwrap().with_length(40.0).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn scattering_is_unitary() {
        for &(l, e0) in &[(40.0, 0.1), (1.0, 0.1), (2.0, 0.9), (0.3, 0.5), (5.0, 0.999)] {
            let p = MediumParams::new(0.067, 1.0, e0).unwrap().with_length(l).unwrap();
            let sc = scattering(derive_scales(&p).unwrap().k, &p).unwrap();
            let total = sc.transmission.norm_sqr() + sc.reflection.norm_sqr();
            assert!((total - 1.0).abs() < 1e-12, "L = {l}, E0 = {e0}: {total}");
        }
    }

    #[test]
    fn stationary_density_decays_at_twice_kappa() {
        let p = barrier();
        let sc = derive_scales(&p).unwrap();
        let (x1, x2) = (5.0, 15.0);
        let d1 = phi_stationary(sc.k, x1, &p).unwrap().norm_sqr();
        let d2 = phi_stationary(sc.k, x2, &p).unwrap().norm_sqr();
        let slope = (d2.ln() - d1.ln()) / (x2 - x1);
        assert!((slope / (-2.0 * sc.kappa0) - 1.0).abs() < 0.01, "{slope}");
    }

    #[test]
    fn stationary_solution_matches_exterior_waves() {
        let p = MediumParams::new(0.067, 1.0, 0.3).unwrap().with_length(3.0).unwrap();
        let k = derive_scales(&p).unwrap().k;
        let sc = scattering(k, &p).unwrap();
        let i = Complex64::i();
        // one-sided second-order differences at the edges
        let h = 1e-4;
        let phi = |x: f64| phi_stationary(k, x, &p).unwrap();
        let d0 = (-3.0 * phi(0.0) + 4.0 * phi(h) - phi(2.0 * h)) / (2.0 * h);
        let dl = (3.0 * phi(3.0) - 4.0 * phi(3.0 - h) + phi(3.0 - 2.0 * h)) / (2.0 * h);
        assert!(rel(phi(0.0), 1.0 + sc.reflection) < 1e-13);
        assert!(rel(d0, i * k * (1.0 - sc.reflection)) < 1e-6);
        let out = sc.transmission * Complex64::from_polar(1.0, 3.0 * k);
        assert!(rel(phi(3.0), out) < 1e-12);
        assert!(rel(dl, i * k * out) < 1e-6);
        assert!(rel(phi_stationary(-k, 1.0, &p).unwrap(), phi_stationary(k, 1.0, &p).unwrap().conj()) < 1e-14);
    }

    #[test]
    fn stable_form_agrees_with_trigonometric_form() {
        let (kv, l) = (1.3, 2.0);
        let i = Complex64::i();
        for &kp in &[Complex64::new(3.0, -0.5), Complex64::new(-2.0, 1.0), Complex64::new(0.4, -0.2), Complex64::new(1.0, -1.0)] {
            let q = principal_q(kp, kv);
            let den = 2.0 * i * kp * (q * l).cos() + (q * q + kp * kp) * (q * l).sin() / q;
            for &x in &[0.0, 0.7, 2.0] {
                let y = l - x;
                let num = (q * y).cos() - i * kp * (q * y).sin() / q;
                let expected = 2.0 * i * kp * num / den;
                assert!(rel(phi_complex(kp, x, kv, l), expected) < 1e-12, "k' = {kp}, x = {x}");
            }
        }
    }

    #[test]
    fn stable_form_stays_finite_far_off_axis() {
        let p = barrier();
        for r in [5.0, 50.0, 500.0] {
            for theta in [-0.25 * PI, -0.75 * PI, 0.75 * PI, -0.05] {
                let kp = Complex64::from_polar(r, theta);
                let phi = phi_complex(kp, 3.0, p.k_barrier(), 40.0);
                assert!(phi.re.is_finite() && phi.im.is_finite(), "k' = {kp}");
            }
        }
    }

    #[test]
    fn contour_integrand_has_residue_minus_rho_at_each_pole() {
        let p = barrier();
        let sol = ShutterSolution::new(p, 30).unwrap();
        let k = sol.wavenumber();
        for st in [&sol.states()[0], &sol.states()[9], &sol.states()[29]] {
            let kn = st.pole.k;
            // trapezoid rule on a circle inside the pole's isolation disc
            let r = 0.5 * st.pole.b();
            let m = 64;
            for &x in &[0.3, 2.0, 17.0] {
                let mut res = Complex64::new(0.0, 0.0);
                for j in 0..m {
                    let dz = Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
                    let kp = kn + dz;
                    res += dz * 2.0 * k * phi_complex(kp, x, p.k_barrier(), 40.0) / (kp * kp - k * k);
                }
                res /= m as f64;
                let rho = rho_factor(k, st, x);
                assert!(rel(res, -rho) < 1e-9, "n = {}, x = {x}", st.pole.n);
            }
        }
    }

    #[test]
    fn exact_amplitude_starts_empty() {
        let sol = ShutterSolution::covering(barrier(), 1e-3).unwrap();
        for &x in &[0.0, 0.5, 3.0] {
            assert_eq!(sol.psi_exact(x, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        }
        let early = sol.psi_exact(2.0, 1e-3).unwrap().norm();
        let later = sol.psi_exact(2.0, 1e-1).unwrap().norm();
        assert!(early < 1e-4 && early < later, "{early} {later}");
    }

    #[test]
    fn short_pole_table_is_reported() {
        let sol = ShutterSolution::new(barrier(), 50).unwrap();
        assert!(matches!(sol.psi_exact(1.0, 0.05), Err(Error::PoleTable { n: 50, .. })));
        assert!(sol.psi_exact(1.0, 100.0).is_ok());
    }

    #[test]
    fn resonant_sum_converges_to_exact_amplitude_inside() {
        let sol = ShutterSolution::covering(barrier(), 0.2).unwrap();
        // quadratic approach at mid-barrier
        for &t in &[1.0, 10.0] {
            let exact = sol.psi_exact(20.0, t).unwrap();
            let errs: Vec<f64> = [500, 1000, 2000].iter().map(|&n| rel(sol.psi_truncated(20.0, t, n).unwrap(), exact)).collect();
            assert!(errs[1] < 0.4 * errs[0] && errs[2] < 0.4 * errs[1] && errs[2] < 3e-4, "t = {t}: {errs:?}");
        }
        // near the edge it approaches slowly
        let exact = sol.psi_exact(2.0, 10.0).unwrap();
        let errs: Vec<f64> = [200, 800, 3200].iter().map(|&n| rel(sol.psi_truncated(2.0, 10.0, n).unwrap(), exact)).collect();
        assert!(errs[2] < errs[0] && errs[2] < 2e-3, "{errs:?}");
    }

    #[test]
    fn checked_sum_reports_both_truncations() {
        let sol = ShutterSolution::new(barrier(), 100).unwrap();
        match sol.psi_internal_checked(0.5, 10.0, 1e-8) {
            Err(Error::Truncation { n, coarse, fine }) => {
                assert_eq!(n, 50);
                assert!(coarse != fine);
            }
            other => panic!("expected a truncation error, got {other:?}"),
        }
    }

    #[test]
    fn sum_rule_at_t0_closes_at_mid_barrier() {
        let p = barrier();
        let sol = ShutterSolution::new(p, 100).unwrap();
        let scale = sol.stationary_density(0.0).unwrap().sqrt();
        assert!(sol.psi_internal(20.0, 0.0).unwrap().norm() < 1e-4 * scale);
    }

    #[test]
    fn analytic_time_derivative_matches_differences() {
        let sol = ShutterSolution::covering(barrier(), 0.2).unwrap();
        for &(x, t) in &[(0.5, 1.0), (2.0, 0.3), (3.0, 7.0)] {
            let (_, d) = sol.psi_exact_and_dt(x, t).unwrap();
            let h = 1e-5 * t;
            let f = |t: f64| sol.psi_exact(x, t).unwrap();
            let fd = (8.0 * (f(t + h) - f(t - h)) - (f(t + 2.0 * h) - f(t - 2.0 * h))) / (12.0 * h);
            assert!(rel(fd, d) < 1e-8, "x = {x}, t = {t}");
        }
    }

    #[test]
    fn relaxes_to_stationary_density() {
        // the slowest top-of-barrier resonance lives about 2500 fs
        let sol = ShutterSolution::covering(barrier(), 100.0).unwrap();
        for j in 0..=30 {
            let x = 0.1 * j as f64;
            let d = sol.density(x, 1.0e4).unwrap();
            let st = sol.stationary_density(x).unwrap();
            assert!((d / st - 1.0).abs() < 0.01, "x = {x}: {d} vs {st}");
        }
    }

    #[test]
    fn snapshots_are_nonnegative_and_start_flat() {
        let sol = ShutterSolution::covering(barrier(), 0.5).unwrap();
        let xs: Vec<f64> = (0..=30).map(|j| 0.1 * j as f64).collect();
        let table = sol.density_snapshots(&[0.0, 1.0, 2.0, 4.0], &xs).unwrap();
        assert!(table.density[0].iter().all(|&d| d == 0.0));
        assert!(table.density.iter().flatten().all(|&d| d >= 0.0));
        assert!(table.density[1..].iter().all(|row| row[10] > 0.0));
    }
}

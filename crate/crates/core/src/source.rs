//! Sharp-onset source in a uniform potential V.
//!
//! The wave obeys Ψ(0, t) = e^{-iω0 t} Θ(t) and lives in x ≥ 0. The exact
//! amplitude is written with two Faddeeva functions; its opaque-limit
//! approximation splits into a monochromatic pole term and a saddle term.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::faddeeva::{faddeeva_derivative, w, FRAC_1_SQRT_PI};
use crate::params::{derive_scales, DerivedScales, MediumParams, CONSTANTS};
use crate::phase::phase_factor;
use crate::wavefunction::Wavefunction;

/// The complex arguments and scales entering the exact amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceArguments {
    pub u0_prime: Complex64,
    pub u0_doubleprime: Complex64,
    /// Büttiker–Landauer traversal time x/v_sc (fs).
    pub tau: f64,
    /// (ħ/2m)^{1/2} in nm/fs^{1/2}.
    pub c: f64,
}

/// Evaluator for the sharp-onset source problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    params: MediumParams,
    scales: DerivedScales,
    c: f64,
}

fn e_i_pi_4() -> Complex64 {
    Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)
}

impl SourceModel {
    pub fn new(params: MediumParams) -> Result<Self> {
        let scales = derive_scales(&params)?;
        let c = (0.5 * params.hbar_over_m()).sqrt();
        Ok(Self { params, scales, c })
    }

    pub fn scales(&self) -> &DerivedScales {
        &self.scales
    }

    /// τ = x m/(κ0 ħ).
    pub fn bl_time(&self, x: f64) -> f64 {
        x / self.scales.v_sc
    }

    pub fn arguments(&self, x: f64, t: f64) -> Result<SourceArguments> {
        check_x(x)?;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("source arguments need t > 0, got t = {t}")));
        }
        let tau = self.bl_time(x);
        let pre = e_i_pi_4() * (t.sqrt() * self.c * self.scales.kappa0);
        let r = tau / t;
        Ok(SourceArguments {
            u0_prime: pre * Complex64::new(-r, -1.0),
            u0_doubleprime: pre * Complex64::new(-r, 1.0),
            tau,
            c: self.c,
        })
    }

    /// e^{-itV/ħ + ix²/(4C²t)}
    fn carrier(&self, x: f64, t: f64) -> Complex64 {
        phase_factor(x * x, 4.0 * self.c * self.c * t) * Complex64::from_polar(1.0, -t * self.params.v / CONSTANTS.hbar)
    }

    /// Exact amplitude; zero for t ≤ 0 where the source is off.
    pub fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
        check_x(x)?;
        if t <= 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let a = self.arguments(x, t)?;
        Ok(0.5 * self.carrier(x, t) * (w(-a.u0_prime) + w(-a.u0_doubleprime)))
    }

    /// Monochromatic pole term e^{-iω0t} e^{-κ0x} Θ(t − τ).
    pub fn psi_pole(&self, x: f64, t: f64) -> Result<Complex64> {
        check_x(x)?;
        if t < self.bl_time(x) || t <= 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(Complex64::from_polar(
            (-self.scales.kappa0 * x).exp(),
            -self.scales.omega0 * t,
        ))
    }

    /// Saddle term (1/(2i√π)) e^{-itV/ħ + ix²/4C²t} (1/u0′ + 1/u0″).
    pub fn psi_saddle(&self, x: f64, t: f64) -> Result<Complex64> {
        let a = self.arguments(x, t)?;
        if a.u0_prime.norm() == 0.0 || a.u0_doubleprime.norm() == 0.0 {
            return Err(Error::Singular(format!("saddle term at x = {x}, t = {t}")));
        }
        let sum = a.u0_prime.inv() + a.u0_doubleprime.inv();
        Ok(self.carrier(x, t) * sum / Complex64::new(0.0, 2.0 / FRAC_1_SQRT_PI))
    }

    /// Saddle frequency (V + x²m/2t²)/ħ.
    pub fn omega_saddle(&self, x: f64, t: f64) -> Result<f64> {
        check_x(x)?;
        if !(t > 0.0) {
            return Err(Error::Domain(format!("saddle frequency needs t > 0, got t = {t}")));
        }
        let k_classical = x / (t * self.params.hbar_over_m());
        Ok((self.params.v + self.params.energy_of(k_classical)) / CONSTANTS.hbar)
    }

    /// Analytic time derivative of the exact amplitude, with the amplitude itself.
    pub fn psi_and_dt(&self, x: f64, t: f64) -> Result<(Complex64, Complex64)> {
        check_x(x)?;
        if !(t > 0.0) {
            return Err(Error::Domain(format!("time derivative needs t > 0, got t = {t}")));
        }
        let a = self.arguments(x, t)?;
        let z1 = -a.u0_prime;
        let z2 = -a.u0_doubleprime;
        let (w1, w2) = (w(z1), w(z2));
        let carrier = self.carrier(x, t);
        let psi = 0.5 * carrier * (w1 + w2);

        let sqrt_t = t.sqrt();
        let pre = e_i_pi_4() * (self.c * self.scales.kappa0);
        let dr = -a.tau / (2.0 * t * sqrt_t);
        let di = 0.5 / sqrt_t;
        let dz1 = pre * Complex64::new(dr, di);
        let dz2 = pre * Complex64::new(dr, -di);
        let dphase = Complex64::new(
            0.0,
            -self.params.v / CONSTANTS.hbar - x * x / (4.0 * self.c * self.c * t * t),
        );
        let dw = faddeeva_derivative(z1, w1) * dz1 + faddeeva_derivative(z2, w2) * dz2;
        Ok((psi, dphase * psi + 0.5 * carrier * dw))
    }

    pub fn dpsi_dt(&self, x: f64, t: f64) -> Result<Complex64> {
        self.psi_and_dt(x, t).map(|(_, d)| d)
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("source model needs x >= 0, got x = {x}")));
    }
    Ok(())
}

impl Wavefunction for SourceModel {
    fn params(&self) -> &MediumParams {
        &self.params
    }

    fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
        SourceModel::psi(self, x, t)
    }

    fn psi_and_dt(&self, x: f64, t: f64) -> Option<Result<(Complex64, Complex64)>> {
        Some(SourceModel::psi_and_dt(self, x, t))
    }
}

/// The pole term alone as a wavefunction, which has no forerunner.
#[derive(Debug, Clone, Copy)]
pub struct PoleTerm<'a>(pub &'a SourceModel);

impl Wavefunction for PoleTerm<'_> {
    fn params(&self) -> &MediumParams {
        &self.0.params
    }

    fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
        self.0.psi_pole(x, t)
    }
}

/// The saddle term alone as a wavefunction.
#[derive(Debug, Clone, Copy)]
pub struct SaddleTerm<'a>(pub &'a SourceModel);

impl Wavefunction for SaddleTerm<'_> {
    fn params(&self) -> &MediumParams {
        &self.0.params
    }

    fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
        self.0.psi_saddle(x, t)
    }
}

//! Potential step V Θ(x) lit by a plane wave e^{ikx} cut off at the origin.
//!
//! On the step side (x > 0) the amplitude is the eigenfunction integral
//!
//!   Ψ(x, t) = (i/2π) ∫_Γ dk' T(k') e^{iq'x} e^{-i(ħ/2m)k'²t} / (k' − k),
//!
//! with T(k') = 2k'/(k' + q'), q' = (k'² − k_V²)^{1/2} on the physical sheet
//! and Γ running above k and above the cut [−k_V, k_V]. For quadrature Γ is
//! laid on the ray s e^{3iπ/4} for Re k' < 0, the upper lip of the real axis
//! from 0 to K0 = 2k_V, and the ray K0 + s e^{-iπ/4}. Along the lip the pole
//! at k is subtracted and the half residue ½T(k) e^{-κ0x} e^{-iE0t/ħ} is added
//! back in closed form. At early times, when the saddle x/2ct of the phase
//! lies beyond K0, Γ is instead the straight steepest-descent line through it.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{derive_scales, DerivedScales, MediumParams};
use crate::quadrature::{integrate_split, QuadratureSpec};
use crate::wavefunction::Wavefunction;

/// Integration along each ray stops where the Gaussian factor reaches e^{-RAY_CUTOFF}.
const RAY_CUTOFF: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// E' < V: total reflection, evanescent on the step.
    BelowThreshold,
    /// E' ≥ V: partly transmitted.
    AboveThreshold,
}

/// Stationary scattering state e^{ik'x} + R e^{-ik'x} (x < 0), C e^{iq'x} (x > 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepEigenstate {
    pub kprime: f64,
    pub reflection: Complex64,
    pub evanescent_or_transmitted: Complex64,
    /// iκ below threshold, the transmitted wavenumber k'' above.
    pub q: Complex64,
    pub regime: Regime,
}

/// q' on the upper lip of the real axis.
fn lip_q(kp: f64, k_v: f64) -> Complex64 {
    if kp.abs() < k_v {
        Complex64::new(0.0, (k_v * k_v - kp * kp).sqrt())
    } else {
        Complex64::new(kp.signum() * (kp * kp - k_v * k_v).sqrt(), 0.0)
    }
}

/// q' off the real axis, continuous with `lip_q` from above.
fn complex_q(kp: Complex64, k_v: f64) -> Complex64 {
    (kp - k_v).sqrt() * (kp + k_v).sqrt()
}

pub fn step_eigenstate(kprime: f64, params: &MediumParams) -> Result<StepEigenstate> {
    if !(kprime > 0.0) || !kprime.is_finite() {
        return Err(Error::Domain(format!("eigenstate needs k' > 0, got {kprime}")));
    }
    let k_v = params.k_barrier();
    let q = lip_q(kprime, k_v);
    let regime = if kprime < k_v {
        Regime::BelowThreshold
    } else {
        Regime::AboveThreshold
    };
    Ok(StepEigenstate {
        kprime,
        reflection: (kprime - q) / (kprime + q),
        evanescent_or_transmitted: 2.0 * kprime / (kprime + q),
        q,
        regime,
    })
}

/// Transient on the step side for one incidence energy.
#[derive(Debug, Clone)]
pub struct StepModel {
    params: MediumParams,
    scales: DerivedScales,
    quad: QuadratureSpec,
    /// Where the contour leaves the real axis (nm⁻¹).
    k_turn: f64,
}

impl StepModel {
    pub fn new(params: MediumParams) -> Result<Self> {
        let scales = derive_scales(&params)?;
        Ok(Self {
            k_turn: 2.0 * params.k_barrier(),
            params,
            scales,
            quad: QuadratureSpec {
                rel_tol: 1e-10,
                abs_tol: 1e-14,
                max_intervals: 4000,
            },
        })
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    /// Moves the point where the contour leaves the real axis; the amplitude
    /// does not depend on it.
    pub fn with_turning_point(mut self, k_turn: f64) -> Result<Self> {
        if !(k_turn > self.params.k_barrier()) {
            return Err(Error::Domain(format!("turning point {k_turn} must exceed k_V")));
        }
        self.k_turn = k_turn;
        Ok(self)
    }

    pub fn scales(&self) -> &DerivedScales {
        &self.scales
    }

    fn c(&self) -> f64 {
        0.5 * self.params.hbar_over_m()
    }

    /// |C e^{-κ0 x}|², the stationary density on the step.
    pub fn stationary_density(&self, x: f64) -> f64 {
        let sc = &self.scales;
        let t = 2.0 * sc.k / Complex64::new(sc.k, sc.kappa0);
        t.norm_sqr() * (-2.0 * sc.kappa0 * x).exp()
    }

    /// Ψ(x, t) and ∂Ψ/∂t.
    pub fn psi_and_dt(&self, x: f64, t: f64) -> Result<(Complex64, Complex64)> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("step amplitude needs x > 0, got {x}")));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("step amplitude needs t ≥ 0, got {t}")));
        }
        if t == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        }
        let i = Complex64::i();
        let c = self.c();
        let k = self.scales.k;
        let k_v = self.params.k_barrier();
        let k0 = self.k_turn;
        // numerator T(k') e^{iq'x} e^{-ick'²t}
        let g = |kp: Complex64, q: Complex64| 2.0 * kp / (kp + q) * (i * q * x - i * c * kp * kp * t).exp();
        let pair = |kp: Complex64, v: Complex64| [v, -i * c * kp * kp * v];
        let pref = i / (2.0 * PI);
        let down = Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);

        // Early on the saddle x/2ct lies beyond K0; the steepest-descent line
        // through it clears both the pole and the cut.
        let saddle = x / (2.0 * c * t);
        if saddle > k0 {
            let span = (RAY_CUTOFF / (c * t)).sqrt();
            let cross = -saddle * std::f64::consts::SQRT_2;
            let mut breaks = vec![-span];
            if cross > -span {
                breaks.push(cross);
            }
            breaks.extend([0.0, span]);
            let line = integrate_split(
                |s: f64| {
                    let kp = saddle + s * down;
                    pair(kp, g(kp, complex_q(kp, k_v)) / (kp - k))
                },
                &breaks,
                &self.quad,
            )?;
            return Ok((pref * down * line.value[0], pref * down * line.value[1]));
        }

        // ray into the origin from the second quadrant
        let up = Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let span1 = (RAY_CUTOFF / (c * t)).sqrt();
        let ray1 = integrate_split(
            |s: f64| {
                let kp = s * up;
                pair(kp, g(kp, complex_q(kp, k_v)) / (kp - k))
            },
            &[0.0, span1],
            &self.quad,
        )?;

        // upper lip with the pole at k subtracted
        let kc = Complex64::new(k, 0.0);
        let gk = g(kc, lip_q(k, k_v));
        let dk = -i * c * k * k;
        let lip = integrate_split(
            |s: f64| {
                let kp = Complex64::new(s, 0.0);
                let v = g(kp, lip_q(s, k_v));
                let dv = -i * c * s * s * v;
                [(v - gk) / (s - k), (dv - dk * gk) / (s - k)]
            },
            &[0.0, k, k_v, k0],
            &self.quad,
        )?;
        let log = ((k0 - k) / k).ln();

        // ray out of K0 into the fourth quadrant
        let b = c * t * std::f64::consts::SQRT_2 * k0 - x * FRAC_1_SQRT_2;
        let span2 = (-b + (b * b + 4.0 * c * t * RAY_CUTOFF).sqrt()) / (2.0 * c * t);
        let ray2 = integrate_split(
            |s: f64| {
                let kp = k0 + s * down;
                pair(kp, g(kp, complex_q(kp, k_v)) / (kp - k))
            },
            &[0.0, span2],
            &self.quad,
        )?;

        let mut out = [Complex64::new(0.0, 0.0); 2];
        for j in 0..2 {
            let residue = if j == 0 { gk } else { dk * gk };
            let contour = -up * ray1.value[j] + lip.value[j] + residue * log + down * ray2.value[j];
            out[j] = pref * contour + 0.5 * residue;
        }
        Ok((out[0], out[1]))
    }

    pub fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
        self.psi_and_dt(x, t).map(|v| v.0)
    }
}

impl Wavefunction for StepModel {
    fn params(&self) -> &MediumParams {
        &self.params
    }

    fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
        StepModel::psi(self, x, t)
    }

    fn psi_and_dt(&self, x: f64, t: f64) -> Option<Result<(Complex64, Complex64)>> {
        Some(StepModel::psi_and_dt(self, x, t))
    }
}

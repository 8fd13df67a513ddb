//! Physical constants, medium parameters and the derived kinematic scales.
//!
//! Units are fixed throughout the crate: energies in eV, lengths in nm,
//! times in fs. Wavenumbers are in nm⁻¹ and angular frequencies in fs⁻¹.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Fixed physical constants in (eV, nm, fs) units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// ħ in eV·fs.
    pub hbar: f64,
    /// ħ²/m_e in eV·nm².
    pub hbar_sq_over_me: f64,
}

/// The single constants record shared by every model.
pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 0.658_211_956_9,
    hbar_sq_over_me: 0.076_199_6,
};

/// Default effective mass ratio m/m_e (GaAs conduction band).
pub const DEFAULT_MASS_RATIO: f64 = 0.067;

/// An incidence energy given either in eV or as a fraction of the barrier height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyInput {
    Absolute(f64),
    FractionOfBarrier(f64),
}

impl EnergyInput {
    /// Resolves to an absolute energy in eV for barrier height `v`.
    pub fn resolve(self, v: f64) -> f64 {
        match self {
            EnergyInput::Absolute(e) => e,
            EnergyInput::FractionOfBarrier(f) => f * v,
        }
    }
}

/// Physical configuration of one model run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// m / m_e.
    pub mass_ratio: f64,
    /// Barrier (or potential level) height in eV.
    pub v: f64,
    /// Incidence energy in eV.
    pub e0: f64,
    /// Barrier length in nm; only the shutter model uses it.
    pub length: Option<f64>,
}

impl MediumParams {
    pub fn new(mass_ratio: f64, v: f64, e0: f64) -> Result<Self> {
        for (name, value) in [("mass_ratio", mass_ratio), ("V", v), ("E0", e0)] {
            ensure_finite(name, value)?;
            if value <= 0.0 {
                return Err(Error::Domain(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(Self {
            mass_ratio,
            v,
            e0,
            length: None,
        })
    }

    /// Builds parameters with the incidence energy given in eV or as a fraction of `v`.
    pub fn with_energy(mass_ratio: f64, v: f64, e0: EnergyInput) -> Result<Self> {
        Self::new(mass_ratio, v, e0.resolve(v))
    }

    pub fn with_length(mut self, length: f64) -> Result<Self> {
        ensure_finite("L", length)?;
        if length <= 0.0 {
            return Err(Error::Domain(format!("L must be positive, got {length}")));
        }
        self.length = Some(length);
        Ok(self)
    }

    /// Same medium with a different incidence energy.
    pub fn with_e0(&self, e0: f64) -> Result<Self> {
        let mut p = Self::new(self.mass_ratio, self.v, e0)?;
        p.length = self.length;
        Ok(p)
    }

    pub fn length(&self) -> Result<f64> {
        self.length
            .ok_or_else(|| Error::Domain("barrier length L is required for this model".into()))
    }

    /// ħ²/2m in eV·nm².
    pub fn hbar2_over_2m(&self) -> f64 {
        CONSTANTS.hbar_sq_over_me / (2.0 * self.mass_ratio)
    }

    /// ħ/m in nm²/fs.
    pub fn hbar_over_m(&self) -> f64 {
        CONSTANTS.hbar_sq_over_me / (self.mass_ratio * CONSTANTS.hbar)
    }

    /// Wavenumber (nm⁻¹) of a free particle with kinetic energy `e` (eV).
    pub fn wavenumber(&self, e: f64) -> f64 {
        (e / self.hbar2_over_2m()).sqrt()
    }

    /// Kinetic energy (eV) of wavenumber `k` (nm⁻¹).
    pub fn energy_of(&self, k: f64) -> f64 {
        self.hbar2_over_2m() * k * k
    }

    /// Threshold wavenumber √(2mV)/ħ.
    pub fn k_barrier(&self) -> f64 {
        self.wavenumber(self.v)
    }

    /// Opacity α = L√(2mV)/ħ of the full barrier.
    pub fn opacity(&self) -> Result<f64> {
        Ok(self.length()? * self.k_barrier())
    }
}

/// Kinematic scales derived from [`MediumParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    /// Incidence wavenumber from E0 = ħ²k²/2m (nm⁻¹).
    pub k: f64,
    /// Evanescent decay constant √(2m(V−E0))/ħ (nm⁻¹).
    pub kappa0: f64,
    /// Semiclassical velocity ħκ0/m (nm/fs).
    pub v_sc: f64,
    /// E0/ħ (fs⁻¹).
    pub omega0: f64,
    /// V/ħ (fs⁻¹).
    pub omega_v: f64,
    /// 1/κ0 (nm).
    pub penetration_length: f64,
}

/// Derives the kinematic scales; requires the tunneling regime E0 < V.
pub fn derive_scales(params: &MediumParams) -> Result<DerivedScales> {
    if params.mass_ratio <= 0.0 || params.v <= 0.0 || params.e0 <= 0.0 {
        return Err(Error::Domain(format!("non-positive medium parameters {params:?}")));
    }
    if params.e0 >= params.v {
        return Err(Error::TunnelingRegime {
            e0: params.e0,
            v: params.v,
        });
    }
    let kappa0 = params.wavenumber(params.v - params.e0);
    Ok(DerivedScales {
        k: params.wavenumber(params.e0),
        kappa0,
        v_sc: params.hbar_over_m() * kappa0,
        omega0: params.e0 / CONSTANTS.hbar,
        omega_v: params.v / CONSTANTS.hbar,
        penetration_length: 1.0 / kappa0,
    })
}

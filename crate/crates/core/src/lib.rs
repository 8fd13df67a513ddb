//! Exact transient wavefunctions for quantum tunneling forerunners.
//!
//! Three models are provided: a source with a sharp onset in a uniform
//! potential, the quantum shutter in front of a square barrier (through a
//! resonant-state expansion), and a potential step (through quadrature over
//! its continuum). Analysis routines extract forerunner peak times, local
//! frequencies and basin structure, and a Crank–Nicolson integrator serves as
//! an independent check.

pub mod analysis;
pub mod error;
pub mod faddeeva;
pub mod oracle;
pub mod params;
pub mod phase;
pub mod quadrature;
pub mod resonances;
pub mod shutter;
pub mod source;
pub mod step;
pub mod wavefunction;

pub use error::{Error, Result};
pub use params::{derive_scales, DerivedScales, EnergyInput, MediumParams, CONSTANTS};
pub use wavefunction::Wavefunction;

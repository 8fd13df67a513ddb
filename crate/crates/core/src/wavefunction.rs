use num_complex::Complex64;

use crate::error::Result;
use crate::params::MediumParams;

/// A transient amplitude Ψ(x, t) that the analysis routines can probe.
pub trait Wavefunction: Sync {
    fn params(&self) -> &MediumParams;

    fn psi(&self, x: f64, t: f64) -> Result<Complex64>;

    /// Ψ together with its analytic time derivative, when the model offers one.
    fn psi_and_dt(&self, _x: f64, _t: f64) -> Option<Result<(Complex64, Complex64)>> {
        None
    }

    fn density(&self, x: f64, t: f64) -> Result<f64> {
        self.psi(x, t).map(|p| p.norm_sqr())
    }
}

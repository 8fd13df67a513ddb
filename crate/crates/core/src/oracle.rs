//! Crank–Nicolson integrator for the one-dimensional Schrödinger equation on
//! a truncated domain with hard walls.
//!
//! Used to cross-check the exact shutter and step amplitudes. The walls
//! reflect, so results are trusted only inside the light cone of the
//! declared signal speed, and a domain-doubling run certifies the truncation.
//!
//! A cut-off plane wave has a kink or a jump at the origin. Crank–Nicolson
//! leaves the stiff modes of such an edge nearly at rest, so a direct run
//! converges only like √Δt there. [`evolve_scattered`] therefore propagates
//! χ = Ψ − Ψ_free, where Ψ_free is the closed-form free evolution of the same
//! cut-off wave; χ starts at zero and obeys iħχ_t = Hχ + VΨ_free.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::faddeeva::w;
use crate::params::CONSTANTS;

pub const MIN_NODES: usize = 1 << 10;
/// Largest relative change of the norm tolerated in a single step.
pub const STEP_NORM_DRIFT: f64 = 1e-10;

/// Potential energy landscape (eV).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PotentialProfile {
    Free,
    /// V for x > 0.
    Step { v: f64 },
    /// V for 0 < x < L.
    Barrier { v: f64, length: f64 },
}

impl PotentialProfile {
    fn edges(&self) -> [f64; 2] {
        match *self {
            PotentialProfile::Barrier { length, .. } => [0.0, length],
            _ => [0.0, 0.0],
        }
    }

    /// Value at x; at a discontinuity the two sides are averaged.
    pub fn value(&self, x: f64) -> f64 {
        let side = |x: f64, edge: f64| {
            if x > edge {
                1.0
            } else if x < edge {
                0.0
            } else {
                0.5
            }
        };
        match *self {
            PotentialProfile::Free => 0.0,
            PotentialProfile::Step { v } => v * side(x, 0.0),
            PotentialProfile::Barrier { v, length } => v * (side(x, 0.0) - side(x, length)),
        }
    }
}

/// Initial states cut off at x = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffForm {
    /// e^{ikx} − e^{-ikx}: plane wave reflected by a closed shutter.
    Shutter,
    /// e^{ikx}.
    PlaneWave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub dt: f64,
    pub mass_ratio: f64,
    pub profile: PotentialProfile,
    /// Fastest signal (nm/fs) the light-cone check accounts for.
    pub v_signal: f64,
}

impl OracleGrid {
    pub fn new(
        x_min: f64,
        x_max: f64,
        nx: usize,
        dt: f64,
        mass_ratio: f64,
        profile: PotentialProfile,
        v_signal: f64,
    ) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Domain(format!("bad interval [{x_min}, {x_max}]")));
        }
        if nx < MIN_NODES {
            return Err(Error::Domain(format!("need at least {MIN_NODES} nodes, got {nx}")));
        }
        if !(dt > 0.0) || !(mass_ratio > 0.0) || !(v_signal >= 0.0) {
            return Err(Error::Domain("dt, mass ratio and signal speed must be positive".into()));
        }
        Ok(Self {
            x_min,
            x_max,
            nx,
            dt,
            mass_ratio,
            profile,
            v_signal,
        })
    }

    /// Domain reaching 2·v·t_max beyond the probe interval on both sides, with
    /// v the larger of `v_signal` and the fastest group velocity the scheme
    /// supports on this grid, so that nothing returns from the walls in time.
    /// Nodes sit at spacing `dx` with one node on x = 0.
    #[allow(clippy::too_many_arguments)]
    pub fn sized(
        probe: (f64, f64),
        t_max: f64,
        v_signal: f64,
        dx: f64,
        dt: f64,
        mass_ratio: f64,
        profile: PotentialProfile,
    ) -> Result<Self> {
        let hbar2_over_2m = 0.5 * CONSTANTS.hbar_sq_over_me / mass_ratio;
        let reach = 2.0 * v_signal.max(max_group_velocity(dx, dt, hbar2_over_2m)) * t_max;
        let left = ((reach - probe.0).max(0.0) / dx).ceil();
        let right = ((probe.1 + reach).max(0.0) / dx).ceil();
        let nx = (left + right) as usize + 1;
        Self::new(-left * dx, right * dx, nx, dt, mass_ratio, profile, v_signal)
    }

    /// Same spacing on a domain with x_min and x_max doubled.
    pub fn doubled(&self) -> Result<Self> {
        let dx = self.dx();
        let left = (2.0 * self.x_min / dx).round();
        let right = (2.0 * self.x_max / dx).round();
        Self::new(
            left * dx,
            right * dx,
            (right - left) as usize + 1,
            self.dt,
            self.mass_ratio,
            self.profile,
            self.v_signal,
        )
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    /// Node position; nodes within rounding of a potential edge sit on it.
    pub fn x(&self, j: usize) -> f64 {
        let dx = self.dx();
        let x = self.x_min + j as f64 * dx;
        for edge in self.profile.edges() {
            if (x - edge).abs() < 1e-6 * dx {
                return edge;
            }
        }
        x
    }

    fn hbar2_over_2m(&self) -> f64 {
        0.5 * CONSTANTS.hbar_sq_over_me / self.mass_ratio
    }

    fn check_probe(&self, x: f64, t: f64) -> Result<()> {
        let reach = self.v_signal * t;
        if x - reach < self.x_min || x + reach > self.x_max {
            return Err(Error::DomainTruncation { x, t });
        }
        Ok(())
    }
}

/// Cut-off plane wave of wavenumber `k` sampled on the grid, with a sin² ramp
/// over the leftmost 5% of the domain.
pub fn prepare_cutoff_plane_wave(k: f64, form: CutoffForm, grid: &OracleGrid) -> Vec<Complex64> {
    let ramp = 0.05 * (grid.x_max - grid.x_min);
    (0..grid.nx)
        .map(|j| {
            let x = grid.x(j);
            if x > 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let wave = match form {
                CutoffForm::Shutter => Complex64::new(0.0, 2.0 * (k * x).sin()),
                CutoffForm::PlaneWave => Complex64::from_polar(1.0, k * x),
            };
            let s = (x - grid.x_min) / ramp;
            let taper = if s < 1.0 { (0.5 * std::f64::consts::PI * s).sin().powi(2) } else { 1.0 };
            wave * taper
        })
        .collect()
}

/// Free evolution over the whole line of a cut-off wave: Moshinsky's
/// M(x, k, t) = ½ e^{ix²/4ct} w(iu), u = e^{-iπ/4}(x − 2ckt)/(2√(ct)), with
/// c = ħ/2m, taken once (plane wave) or as M(x, k, t) − M(x, −k, t) (shutter).
pub fn free_cutoff_wave(form: CutoffForm, k: f64, x: f64, t: f64, mass_ratio: f64) -> Complex64 {
    if t == 0.0 {
        return match (form, x) {
            (_, x) if x > 0.0 => Complex64::new(0.0, 0.0),
            (CutoffForm::Shutter, x) => Complex64::new(0.0, 2.0 * (k * x).sin()),
            (CutoffForm::PlaneWave, x) if x == 0.0 => Complex64::new(0.5, 0.0),
            (CutoffForm::PlaneWave, x) => Complex64::from_polar(1.0, k * x),
        };
    }
    let c = 0.5 * CONSTANTS.hbar_sq_over_me / (mass_ratio * CONSTANTS.hbar);
    let root = (c * t).sqrt();
    let rot = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2);
    let chirp = Complex64::from_polar(0.5, x * x / (4.0 * c * t));
    let m = |k: f64| chirp * w(Complex64::i() * rot * (x - 2.0 * c * k * t) / (2.0 * root));
    match form {
        CutoffForm::PlaneWave => m(k),
        CutoffForm::Shutter => m(k) - m(-k),
    }
}

/// Probe amplitudes and the norm bookkeeping of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    /// Amplitudes in the order the probes were given.
    pub values: Vec<Complex64>,
    /// Largest single-step relative change of the norm; not tracked for driven runs.
    pub max_step_drift: Option<f64>,
    /// Relative change of the norm over the whole run; not tracked for driven runs.
    pub total_drift: Option<f64>,
}

/// Tridiagonal system (1 + iHΔt/2ħ) with constant off-diagonal, factorized once.
struct Propagator {
    off: Complex64,
    /// Modified off-diagonal ratios c'_j of the Thomas sweep.
    c: Vec<Complex64>,
    /// Reciprocal pivots.
    inv: Vec<Complex64>,
    /// Diagonal of the explicit half step (1 − iHΔt/2ħ).
    explicit_diag: Vec<Complex64>,
}

impl Propagator {
    fn new(grid: &OracleGrid) -> Self {
        let n = grid.nx;
        let dx = grid.dx();
        let a = grid.hbar2_over_2m() / (dx * dx);
        let r = 0.5 * grid.dt / CONSTANTS.hbar;
        let off = Complex64::new(0.0, -r * a);
        let diag: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0, r * (2.0 * a + grid.profile.value(grid.x(j)))))
            .collect();
        let explicit_diag = diag.iter().map(|d| Complex64::new(2.0, 0.0) - d).collect();
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        let mut inv = vec![Complex64::new(0.0, 0.0); n];
        inv[0] = 1.0 / diag[0];
        c[0] = off * inv[0];
        for j in 1..n {
            inv[j] = 1.0 / (diag[j] - off * c[j - 1]);
            c[j] = off * inv[j];
        }
        Self {
            off,
            c,
            inv,
            explicit_diag,
        }
    }

    /// One step; `drive`, when given, is added to the right-hand side on the
    /// node range it starts at.
    fn step(&self, psi: &mut [Complex64], rhs: &mut [Complex64], drive: Option<(usize, &[Complex64])>) {
        let n = psi.len();
        let m = -self.off;
        // rhs = (1 − iHΔt/2ħ) ψ, walls hold ψ = 0 beyond the ends
        rhs[0] = self.explicit_diag[0] * psi[0] + m * psi[1];
        for j in 1..n - 1 {
            rhs[j] = self.explicit_diag[j] * psi[j] + m * (psi[j - 1] + psi[j + 1]);
        }
        rhs[n - 1] = self.explicit_diag[n - 1] * psi[n - 1] + m * psi[n - 2];
        if let Some((start, d)) = drive {
            for (r, v) in rhs[start..start + d.len()].iter_mut().zip(d) {
                *r += v;
            }
        }
        // forward sweep then back substitution
        psi[0] = rhs[0] * self.inv[0];
        for j in 1..n {
            psi[j] = (rhs[j] - self.off * psi[j - 1]) * self.inv[j];
        }
        for j in (0..n - 1).rev() {
            let next = psi[j + 1];
            psi[j] -= self.c[j] * next;
        }
    }
}

fn norm(psi: &[Complex64], dx: f64) -> f64 {
    psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * dx
}

/// Four-point Lagrange interpolation around x.
fn interpolate(psi: &[Complex64], grid: &OracleGrid, x: f64) -> Complex64 {
    let dx = grid.dx();
    let u = (x - grid.x_min) / dx;
    let j0 = (u.floor() as isize - 1).clamp(0, grid.nx as isize - 4) as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        let mut weight = 1.0;
        for b in 0..4 {
            if a != b {
                weight *= (u - (j0 + b) as f64) / (a as f64 - b as f64);
            }
        }
        sum += weight * psi[j0 + a];
    }
    sum
}

/// Validates probes and returns (step index, probe index) pairs in time order.
fn schedule(grid: &OracleGrid, probes: &[(f64, f64)]) -> Result<Vec<(usize, usize)>> {
    let mut order = Vec::with_capacity(probes.len());
    for (i, &(x, t)) in probes.iter().enumerate() {
        if !(t >= 0.0) || !t.is_finite() || !x.is_finite() {
            return Err(Error::Domain(format!("invalid probe ({x}, {t})")));
        }
        grid.check_probe(x, t)?;
        let steps = t / grid.dt;
        let whole = steps.round();
        if (steps - whole).abs() > 1e-6 {
            return Err(Error::Domain(format!("probe time {t} fs is not a multiple of dt = {} fs", grid.dt)));
        }
        order.push((whole as usize, i));
    }
    order.sort_unstable();
    Ok(order)
}

/// Steps `initial` forward and samples it at the probe points (x nm, t fs).
/// Probe times must be whole multiples of the time step.
pub fn evolve(initial: &[Complex64], grid: &OracleGrid, probes: &[(f64, f64)]) -> Result<OracleRun> {
    if initial.len() != grid.nx {
        return Err(Error::Domain(format!(
            "initial state has {} samples, grid has {}",
            initial.len(),
            grid.nx
        )));
    }
    let order = schedule(grid, probes)?;
    let dx = grid.dx();
    let prop = Propagator::new(grid);
    let mut psi = initial.to_vec();
    let mut rhs = vec![Complex64::new(0.0, 0.0); grid.nx];
    let start = norm(&psi, dx);
    let mut previous = start;
    let mut max_step_drift: f64 = 0.0;
    let mut values = vec![Complex64::new(0.0, 0.0); probes.len()];
    let mut step = 0;
    for &(target, i) in &order {
        while step < target {
            prop.step(&mut psi, &mut rhs, None);
            step += 1;
            let now = norm(&psi, dx);
            let drift = (now - previous).abs() / start.max(f64::MIN_POSITIVE);
            if !drift.is_finite() || drift > STEP_NORM_DRIFT {
                return Err(Error::Numerical(format!("norm changed by {drift:e} in step {step}")));
            }
            max_step_drift = max_step_drift.max(drift);
            previous = now;
        }
        values[i] = interpolate(&psi, grid, probes[i].0);
    }
    Ok(OracleRun {
        values,
        max_step_drift: Some(max_step_drift),
        total_drift: Some((previous - start).abs() / start.max(f64::MIN_POSITIVE)),
    })
}

/// Fastest group velocity (nm/fs) of the discrete Crank-Nicolson free
/// propagator. Its step phase is 2·atan(ε dt/2ħ) with ε the three-point
/// kinetic energy, which caps the speed of the stiff modes well above any
/// physical signal when dt is small.
pub fn max_group_velocity(dx: f64, dt: f64, hbar2_over_2m: f64) -> f64 {
    let scale = 4.0 * hbar2_over_2m / (dx * dx);
    let nk = 4096;
    (1..nk)
        .map(|i| {
            let kdx = PI * i as f64 / nk as f64;
            let eps = scale * (0.5 * kdx).sin().powi(2);
            let deps_dk = 2.0 * hbar2_over_2m * kdx.sin() / dx;
            let a = 0.5 * eps * dt / CONSTANTS.hbar;
            deps_dk / CONSTANTS.hbar / (1.0 + a * a)
        })
        .fold(0.0, f64::max)
}

/// Evolves the cut-off wave of wavenumber `k` as Ψ_free + χ, with χ stepped by
/// Crank–Nicolson under the source VΨ_free (trapezoidal in time).
pub fn evolve_scattered(k: f64, form: CutoffForm, grid: &OracleGrid, probes: &[(f64, f64)]) -> Result<OracleRun> {
    let order = schedule(grid, probes)?;
    let prop = Propagator::new(grid);
    // nodes where the potential is felt
    let felt: Vec<usize> = (0..grid.nx).filter(|&j| grid.profile.value(grid.x(j)) != 0.0).collect();
    let (lo, hi) = match (felt.first(), felt.last()) {
        (Some(&a), Some(&b)) => (a, b + 1),
        _ => (0, 0),
    };
    let potential: Vec<f64> = (lo..hi).map(|j| grid.profile.value(grid.x(j))).collect();
    let scale = Complex64::new(0.0, -0.5 * grid.dt / CONSTANTS.hbar);
    let source = |t: f64| -> Vec<Complex64> {
        (lo..hi)
            .into_par_iter()
            .map(|j| {
                let v = potential[j - lo];
                if v == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    scale * v * free_cutoff_wave(form, k, grid.x(j), t, grid.mass_ratio)
                }
            })
            .collect()
    };

    let mut chi = vec![Complex64::new(0.0, 0.0); grid.nx];
    let mut rhs = chi.clone();
    let mut values = vec![Complex64::new(0.0, 0.0); probes.len()];
    let mut current = source(0.0);
    let mut drive = vec![Complex64::new(0.0, 0.0); hi - lo];
    let mut step = 0;
    for &(target, i) in &order {
        while step < target {
            let next = source((step + 1) as f64 * grid.dt);
            for ((d, a), b) in drive.iter_mut().zip(&current).zip(&next) {
                *d = a + b;
            }
            prop.step(&mut chi, &mut rhs, Some((lo, &drive)));
            current = next;
            step += 1;
            if !chi[lo].is_finite() {
                return Err(Error::Numerical(format!("non-finite amplitude in step {step}")));
            }
        }
        let (x, t) = probes[i];
        values[i] = free_cutoff_wave(form, k, x, t, grid.mass_ratio) + interpolate(&chi, grid, x);
    }
    Ok(OracleRun {
        values,
        max_step_drift: None,
        total_drift: None,
    })
}

/// Relative L² distance between two density tables of equal shape.
pub fn relative_l2(model: &[f64], reference: &[f64]) -> f64 {
    let num: f64 = model.iter().zip(reference).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = reference.iter().map(|b| b * b).sum();
    (num / den).sqrt()
}

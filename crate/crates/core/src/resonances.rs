//! Complex poles and resonant (Gamow) states of the square barrier
//! V(x) = V on [0, L], zero elsewhere.
//!
//! Poles are zeros of D(k) = (q+k)²e^{-iqL} − (q−k)²e^{iqL} with
//! q² = k² − k_V². The q = 0 zero of D is trivial (D is odd in q), so there
//! is no n = 0 pole. Pole n is searched in the reduced variable δ = qL − nπ,
//! where D = (−1)ⁿ[(q+k)²e^{-iδ} − (q−k)²e^{iδ}] keeps full precision at
//! large n once (q−k)² is written as k_V⁴/(q+k)².

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::MediumParams;

const NEWTON_MAX_ITER: usize = 60;
const SEED_ITER: usize = 8;
/// Required |D(k_n)| / |D′(k_n) k_n| at an accepted pole.
pub const POLE_CERTIFICATE: f64 = 1e-10;
const MIN_SEPARATION: f64 = 1e-6;

/// A pole k_n = a_n − i b_n. Positive n lie in the fourth quadrant and
/// negative n are their third-quadrant partners k_{-n} = −conj(k_n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonancePole {
    pub n: i64,
    pub k: Complex64,
    /// Newton certificate |D| / |D′k| at the returned value.
    pub residual: f64,
}

impl ResonancePole {
    pub fn a(&self) -> f64 {
        self.k.re
    }

    pub fn b(&self) -> f64 {
        -self.k.im
    }

    pub fn partner(&self) -> ResonancePole {
        ResonancePole {
            n: -self.n,
            k: -self.k.conj(),
            residual: self.residual,
        }
    }

    /// Complex energy ħ²k_n²/2m in eV.
    pub fn energy(&self, params: &MediumParams) -> Complex64 {
        params.hbar2_over_2m() * self.k * self.k
    }
}

pub(crate) fn principal_q(k: Complex64, k_v: f64) -> Complex64 {
    (k * k - k_v * k_v).sqrt()
}

/// cos(qL), sin(qL)/q and (L cos(qL) − sin(qL)/q)/q², all even in q.
pub(crate) fn sinc_terms(q: Complex64, l: f64) -> (Complex64, Complex64, Complex64) {
    let ql = q * l;
    if ql.norm() < 1e-3 {
        let z2 = ql * ql;
        let cos = 1.0 - z2 / 2.0 + z2 * z2 / 24.0;
        let s = l * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
        let ds = l * l * l * (-1.0 / 3.0 + z2 / 30.0);
        (cos, s, ds)
    } else {
        let cos = ql.cos();
        let s = ql.sin() / q;
        (cos, s, (l * cos - s) / (q * q))
    }
}

/// The outgoing-wave pole condition D(k) for the barrier in `params`.
pub fn pole_condition(k: Complex64, params: &MediumParams) -> Result<Complex64> {
    let l = params.length()?;
    let q = principal_q(k, params.k_barrier());
    let i = Complex64::i();
    Ok((q + k).powi(2) * (-i * q * l).exp() - (q - k).powi(2) * (i * q * l).exp())
}

struct Reduced {
    q: Complex64,
    k: Complex64,
    g: Complex64,
    dg: Complex64,
}

/// G(δ) = (−1)ⁿ D and dG/dδ at qL = nπ + δ, in the form
/// G = P e^{-iδ} − k_V⁴ e^{iδ}/P with P = (q+k)², free of cancellation.
fn reduced(n: i64, delta: Complex64, k_v: f64, l: f64) -> Reduced {
    let i = Complex64::i();
    let q = (n as f64 * PI + delta) / l;
    let k = (q * q + k_v * k_v).sqrt();
    let p = (q + k) * (q + k);
    let kv4 = k_v.powi(4);
    let (em, ep) = ((-i * delta).exp(), (i * delta).exp());
    let g = p * em - kv4 * ep / p;
    let dg = (2.0 / (k * l) - i) * (p * em + kv4 * ep / p);
    Reduced { q, k, g, dg }
}

/// Fixed point of δ = −i ln((k+q)/(k−q)), written with (k+q)(k−q) = k_V².
fn seed_delta(n: i64, k_v: f64, l: f64) -> Complex64 {
    let i = Complex64::i();
    let mut delta = Complex64::new(0.0, 0.0);
    for _ in 0..SEED_ITER {
        let q = (n as f64 * PI + delta) / l;
        let k = (q * q + k_v * k_v).sqrt();
        delta = -i * ((k + q) * (k + q) / (k_v * k_v)).ln();
    }
    delta
}

fn search(n: i64, k_v: f64, l: f64) -> Result<ResonancePole> {
    let start = seed_delta(n, k_v, l);
    let seed_k = reduced(n, start, k_v, l).k;
    let fail = |reason: String| Error::PoleSearch {
        seed_re: seed_k.re,
        seed_im: seed_k.im,
        reason,
    };
    let mut delta = start;
    for _ in 0..NEWTON_MAX_ITER {
        let r = reduced(n, delta, k_v, l);
        if r.dg.norm() == 0.0 || !r.dg.is_finite() || !r.g.is_finite() {
            return Err(fail("degenerate derivative".into()));
        }
        let step = r.g / r.dg;
        delta -= step;
        if step.norm() <= 1e-15 * delta.norm().max(1.0) {
            break;
        }
    }
    let r = reduced(n, delta, k_v, l);
    // dδ/dk = L k / q
    let residual = r.g.norm() / (r.dg * l * r.k * r.k / r.q).norm();
    if !(residual < POLE_CERTIFICATE) {
        return Err(fail(format!("no convergence, residual {residual:e}")));
    }
    if !(r.k.re > 0.0 && r.k.im < 0.0) {
        return Err(fail(format!("converged outside the fourth quadrant to {}", r.k)));
    }
    Ok(ResonancePole { n, k: r.k, residual })
}

/// The first `count` fourth-quadrant poles ordered by increasing a_n.
pub fn find_poles(params: &MediumParams, count: usize) -> Result<Vec<ResonancePole>> {
    if count == 0 {
        return Err(Error::Domain("pole count must be at least 1".into()));
    }
    let l = params.length()?;
    let k_v = params.k_barrier();
    let mut poles = (1..=count as i64)
        .map(|n| search(n, k_v, l))
        .collect::<Result<Vec<_>>>()?;
    poles.sort_by(|p, q| p.k.re.total_cmp(&q.k.re));
    for pair in poles.windows(2) {
        if (pair[1].k - pair[0].k).norm() < MIN_SEPARATION {
            return Err(Error::Seeding(format!(
                "seeds {} and {} collapsed onto k = {}",
                pair[0].n, pair[1].n, pair[1].k
            )));
        }
    }
    for (j, p) in poles.iter_mut().enumerate() {
        p.n = j as i64 + 1;
    }
    Ok(poles)
}

/// Normalized resonant eigenfunction
/// u(x) = A[cos(qx) − i(k/q) sin(qx)] = A[(q+k)e^{-iqx} + (q−k)e^{iqx}]/2q on [0, L].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantState {
    pub pole: ResonancePole,
    /// u_n(0).
    pub u0: Complex64,
    /// u_n(L).
    pub ul: Complex64,
    amplitude: Complex64,
    q: Complex64,
    k_v: f64,
    length: f64,
}

impl ResonantState {
    pub fn u_at(&self, x: f64) -> Complex64 {
        let (k, q) = (self.pole.k, self.q);
        let i = Complex64::i();
        // q − k = −k_V²/(k+q) avoids cancellation when |q| ≫ k_V
        let minus = -self.k_v * self.k_v / (k + q);
        self.amplitude * ((q + k) * (-i * q * x).exp() + minus * (i * q * x).exp()) / (2.0 * q)
    }

    /// Internal wavenumber q_n with q_n² = k_n² − k_V².
    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn k_barrier(&self) -> f64 {
        self.k_v
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// State of the partner pole, u_{-n} = conj(u_n).
    pub fn partner(&self) -> ResonantState {
        ResonantState {
            pole: self.pole.partner(),
            u0: self.u0.conj(),
            ul: self.ul.conj(),
            amplitude: self.amplitude.conj(),
            q: -self.q.conj(),
            k_v: self.k_v,
            length: self.length,
        }
    }
}

/// Builds the Gamow-normalized state ∫u² + i(u(0)² + u(L)²)/2k = 1.
///
/// At a pole u(0) = 1 and u(L) = ±1 before scaling, and the norm reduces to
/// −k_V²(2i + kL)/(2kq²).
pub fn resonant_state(pole: ResonancePole, params: &MediumParams) -> Result<ResonantState> {
    let l = params.length()?;
    let k_v = params.k_barrier();
    let k = pole.k;
    let mut q = principal_q(k, k_v);
    if (k + q).norm() < (k - q).norm() {
        q = -q;
    }
    let norm = -k_v * k_v * (Complex64::new(0.0, 2.0) + k * l) / (2.0 * k * q * q);
    if norm.norm() < 1e-14 || !norm.is_finite() {
        return Err(Error::Normalization {
            n: pole.n,
            norm: norm.norm(),
        });
    }
    let mut state = ResonantState {
        pole,
        u0: Complex64::new(0.0, 0.0),
        ul: Complex64::new(0.0, 0.0),
        amplitude: norm.sqrt().inv(),
        q,
        k_v,
        length: l,
    };
    state.u0 = state.u_at(0.0);
    state.ul = state.u_at(l);
    Ok(state)
}

/// Resonant states for the first `count` poles (positive n only).
pub fn resonant_states(params: &MediumParams, count: usize) -> Result<Vec<ResonantState>> {
    find_poles(params, count)?
        .into_iter()
        .map(|p| resonant_state(p, params))
        .collect()
}

/// ρ_n = 2ik u_n(0) u_n(x) / (k² − k_n²).
pub fn rho_factor(k: f64, state: &ResonantState, x: f64) -> Complex64 {
    let kn = state.pole.k;
    Complex64::new(0.0, 2.0 * k) * state.u0 * state.u_at(x) / (k * k - kn * kn)
}

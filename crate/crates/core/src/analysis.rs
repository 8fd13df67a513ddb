//! Forerunner observables: local frequency, first-peak time, basin structure,
//! linear fits against the gap and the reference time scales.
//!
//! Every routine works through the [`Wavefunction`] trait, so the source,
//! shutter and step models are analysed by the same code.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{derive_scales, MediumParams, CONSTANTS};
use crate::resonances::ResonancePole;
use crate::source::SourceModel;
use crate::wavefunction::Wavefunction;

/// Minimum coarse sampling of a peak window.
pub const MIN_COARSE_POINTS: usize = 64;

/// Relative prominence a density maximum needs to count as the first peak.
pub const PROMINENCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakRecord {
    pub x: f64,
    pub t_p: f64,
    pub density_at_peak: f64,
    pub omega_av_at_peak: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScales {
    /// Büttiker–Landauer time x/v_sc.
    pub bl_time: f64,
    /// τ/√3, the opaque-limit forerunner peak.
    pub tp_opaque: f64,
    /// ħπ/(ε_1 − E0).
    pub tp_basin: f64,
    /// x/v_1 with v_1 = ħa_1/m.
    pub tp_linear: f64,
    /// 2ħ/[v_sc (2mE0)^{1/2}], the large-x limit of the phase time.
    pub phase_time_asymptote: f64,
}

/// Controls the local-frequency evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    /// Initial difference step as a fraction of t (numeric derivative only).
    pub h_rel: f64,
    /// Requested stability under step halving.
    pub tol: f64,
    /// |Ψ| below floor_rel times the local maximum leaves ω_av undefined.
    pub floor_rel: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            h_rel: 1e-3,
            tol: 1e-4,
            floor_rel: 1e-10,
        }
    }
}

/// How each x picks its time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPolicy {
    /// Window end; `None` means 20ħ/(V − E0).
    pub t_max: Option<f64>,
    pub coarse_points: usize,
    pub refine_tol: f64,
    /// Factor applied to the window end after a monotonic signal.
    pub widen: f64,
    pub max_widenings: usize,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self {
            t_max: None,
            coarse_points: 256,
            refine_tol: 1e-6,
            widen: 2.0,
            max_widenings: 4,
        }
    }
}

impl WindowPolicy {
    pub fn window_end(&self, params: &MediumParams) -> f64 {
        self.t_max
            .unwrap_or(20.0 * CONSTANTS.hbar / (params.v - params.e0))
    }
}

fn psi_pair<W: Wavefunction + ?Sized>(w: &W, x: f64, t: f64) -> Option<Result<(Complex64, Complex64)>> {
    w.psi_and_dt(x, t)
}

/// ∂Ψ/∂t by central differences, Richardson-extrapolated and halved until
/// two successive estimates agree to `ctrl.tol`.
fn numeric_dt<W: Wavefunction + ?Sized>(w: &W, x: f64, t: f64, ctrl: &StepControl) -> Result<Complex64> {
    let central = |h: f64| -> Result<Complex64> { Ok((w.psi(x, t + h)? - w.psi(x, t - h)?) / (2.0 * h)) };
    let mut h = ctrl.h_rel * t;
    let mut d_h = central(h)?;
    let mut previous: Option<Complex64> = None;
    for _ in 0..12 {
        let d_half = central(0.5 * h)?;
        let r = (4.0 * d_half - d_h) / 3.0;
        if let Some(p) = previous {
            if (r - p).norm() <= ctrl.tol * r.norm() {
                return Ok(r);
            }
        }
        previous = Some(r);
        d_h = d_half;
        h *= 0.5;
    }
    Err(Error::Numerical(format!(
        "time derivative at x = {x}, t = {t} did not settle under step halving"
    )))
}

fn frequency(x: f64, t: f64, psi: Complex64, dt: Complex64, reference: f64, floor_rel: f64) -> Result<f64> {
    if !(psi.norm() > floor_rel * reference) {
        return Err(Error::UndefinedFrequency {
            x,
            t,
            amplitude: psi.norm(),
        });
    }
    Ok(-(dt / psi).im)
}

/// ω_av = −Im[(∂Ψ/∂t)/Ψ] in fs⁻¹.
///
/// The local maximum that sets the node floor is taken over t·{½, ¾, 1, 5/4, 3/2}.
pub fn omega_av<W: Wavefunction + ?Sized>(w: &W, x: f64, t: f64, ctrl: &StepControl) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("local frequency needs t > 0, got {t}")));
    }
    let (psi, dt) = match psi_pair(w, x, t) {
        Some(pair) => pair?,
        None => (w.psi(x, t)?, numeric_dt(w, x, t, ctrl)?),
    };
    let mut reference = psi.norm();
    for f in [0.5, 0.75, 1.25, 1.5] {
        reference = reference.max(w.psi(x, f * t)?.norm());
    }
    frequency(x, t, psi, dt, reference, ctrl.floor_rel)
}

/// d|Ψ|²/dt, analytic when available.
fn density_slope<W: Wavefunction + ?Sized>(w: &W, x: f64, t: f64) -> Option<Result<f64>> {
    psi_pair(w, x, t).map(|r| r.map(|(p, d)| 2.0 * (p.conj() * d).re))
}

/// Index of the first coarse sample that is a local maximum with relative
/// prominence ≥ [`PROMINENCE`]: it must rise above the lowest density on
/// both sides, each side running to the window edge or to the first sample
/// that exceeds the peak.
fn first_prominent(d: &[f64]) -> Option<usize> {
    let n = d.len();
    for i in 1..n - 1 {
        if !(d[i] >= d[i - 1] && d[i] > d[i + 1]) {
            continue;
        }
        let mut left = d[i];
        for j in (0..i).rev() {
            if d[j] > d[i] {
                break;
            }
            left = left.min(d[j]);
        }
        let mut right = d[i];
        for &v in &d[i + 1..] {
            if v > d[i] {
                break;
            }
            right = right.min(v);
        }
        if d[i] - left.max(right) >= PROMINENCE * d[i] {
            return Some(i);
        }
    }
    None
}

/// Root of a bracketed sign change by the Illinois variant of regula falsi.
fn bracketed_root(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!("no sign change in [{a}, {b}]")));
    }
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = f(c)?;
        if fc == 0.0 || (b - a).abs() <= tol * c.abs() {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        // a bisection step after each secant step bounds the iteration count
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    Ok(0.5 * (a + b))
}

/// Maximum of a unimodal function on [a, c] by safeguarded successive
/// parabolic interpolation (Brent), to relative tolerance `tol`.
fn parabolic_max(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let g = |t: f64| f(t).map(|v| -v);
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = g(x)?;
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-300;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return Ok(x);
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = g(u)?;
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Ok(x)
}

/// Refines a density maximum inside `bracket`. With an analytic derivative
/// the zero of d|Ψ|²/dt is found; otherwise the density is maximised by
/// parabolic iteration.
pub fn refine_peak<W: Wavefunction + ?Sized>(w: &W, x: f64, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (a, b) = bracket;
    if density_slope(w, x, a).is_some() {
        let slope = |t: f64| density_slope(w, x, t).expect("derivative offered above");
        let (sa, sb) = (slope(a)?, slope(b)?);
        if sa > 0.0 && sb < 0.0 {
            return bracketed_root(slope, a, b, tol.min(1e-12));
        }
    }
    parabolic_max(|t| w.density(x, t), a, b, tol)
}

/// First prominent maximum of |Ψ(x, t)|² in `window`, refined to `refine_tol`.
pub fn first_peak<W: Wavefunction + ?Sized>(
    w: &W,
    x: f64,
    window: (f64, f64),
    coarse_points: usize,
    refine_tol: f64,
) -> Result<PeakRecord> {
    let (t_lo, t_hi) = window;
    if !(t_lo >= 0.0 && t_hi > t_lo) {
        return Err(Error::Domain(format!("peak window [{t_lo}, {t_hi}] is not inside t > 0")));
    }
    if coarse_points < MIN_COARSE_POINTS {
        return Err(Error::Domain(format!(
            "peak search needs at least {MIN_COARSE_POINTS} coarse points, got {coarse_points}"
        )));
    }
    // the grid skips t_lo itself, which may be the empty initial instant
    let ts: Vec<f64> = (1..=coarse_points)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / coarse_points as f64)
        .collect();
    let d = ts.iter().map(|&t| w.density(x, t)).collect::<Result<Vec<_>>>()?;
    let i = first_prominent(&d).ok_or(Error::MonotonicSignal { x, t_lo, t_hi })?;
    let t_p = refine_peak(w, x, (ts[i - 1], ts[i + 1]), refine_tol)?;
    let (psi, dt) = match psi_pair(w, x, t_p) {
        Some(pair) => pair?,
        None => (w.psi(x, t_p)?, numeric_dt(w, x, t_p, &StepControl::default())?),
    };
    let omega = frequency(x, t_p, psi, dt, psi.norm(), StepControl::default().floor_rel)?;
    Ok(PeakRecord {
        x,
        t_p,
        density_at_peak: psi.norm_sqr(),
        omega_av_at_peak: omega,
    })
}

/// [`first_peak`] over the policy's window, widened geometrically while the
/// signal shows no interior maximum.
pub fn peak_with_policy<W: Wavefunction + ?Sized>(w: &W, x: f64, policy: &WindowPolicy) -> Result<PeakRecord> {
    let mut t_hi = policy.window_end(w.params());
    let mut last = None;
    for _ in 0..=policy.max_widenings {
        match first_peak(w, x, (0.0, t_hi), policy.coarse_points, policy.refine_tol) {
            Err(e @ Error::MonotonicSignal { .. }) => {
                last = Some(e);
                t_hi *= policy.widen;
            }
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinScan {
    pub curve: Vec<PeakRecord>,
    /// Interior minimum of t_p(x), or `None` for a monotone curve.
    pub minimum: Option<PeakRecord>,
    /// Least-squares dt_p/dx over the last quarter of the grid (at least 3 points).
    pub tail_slope: f64,
}

/// t_p over `x_grid` and its basin.
pub fn basin_scan<W: Wavefunction + ?Sized>(w: &W, x_grid: &[f64], policy: &WindowPolicy) -> Result<BasinScan> {
    if x_grid.len() < 8 {
        return Err(Error::Domain(format!("basin scan needs at least 8 positions, got {}", x_grid.len())));
    }
    if x_grid.windows(2).any(|p| !(p[1] > p[0])) || !(x_grid[0] > 0.0) {
        return Err(Error::Domain("basin scan needs a sorted grid of positive positions".into()));
    }
    let curve = x_grid
        .par_iter()
        .map(|&x| peak_with_policy(w, x, policy))
        .collect::<Result<Vec<_>>>()?;

    let (i, least) = curve
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.t_p.total_cmp(&b.1.t_p))
        .expect("non-empty curve");
    let minimum = if i == 0 || i == curve.len() - 1 {
        None
    } else {
        let (p0, p1, p2) = (&curve[i - 1], least, &curve[i + 1]);
        let x_star = parabola_vertex((p0.x, p0.t_p), (p1.x, p1.t_p), (p2.x, p2.t_p));
        let refined = peak_with_policy(w, x_star, policy)?;
        Some(if refined.t_p < least.t_p { refined } else { *least })
    };

    let m = (curve.len() / 4).max(3);
    let tail: Vec<(f64, f64)> = curve[curve.len() - m..].iter().map(|p| (p.x, p.t_p)).collect();
    let tail_slope = least_squares(&tail)?.slope;
    Ok(BasinScan {
        curve,
        minimum,
        tail_slope,
    })
}

fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let num = (b.0 - a.0).powi(2) * (b.1 - c.1) - (b.0 - c.0).powi(2) * (b.1 - a.1);
    let den = (b.0 - a.0) * (b.1 - c.1) - (b.0 - c.0) * (b.1 - a.1);
    if den == 0.0 {
        return b.0;
    }
    (b.0 - 0.5 * num / den).clamp(a.0, c.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn least_squares(points: &[(f64, f64)]) -> Result<LinearFit> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 1e-300) {
        return Err(Error::Fit("abscissae do not vary".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Ordinary least squares of t_p against 1/(V − E0) for `(E0, t_p)` pairs.
pub fn fit_tp_vs_inverse_gap(v: f64, records: &[(f64, f64)]) -> Result<LinearFit> {
    if records.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 energies, got {}", records.len())));
    }
    let mut energies: Vec<f64> = records.iter().map(|r| r.0).collect();
    energies.sort_by(f64::total_cmp);
    if energies.windows(2).any(|e| e[0] == e[1]) {
        return Err(Error::Fit("repeated incidence energy".into()));
    }
    if energies.iter().any(|&e| !(e < v)) {
        return Err(Error::Fit(format!("every E0 must lie below V = {v}")));
    }
    let points: Vec<(f64, f64)> = records.iter().map(|&(e, t)| (1.0 / (v - e), t)).collect();
    least_squares(&points)
}

/// The reference time scales at position `x`. The basin and linear scales
/// use the first top-barrier pole, so a pole table is required.
pub fn reference_timescales(params: &MediumParams, x: f64, poles: Option<&[ResonancePole]>) -> Result<TimeScales> {
    let scales = derive_scales(params)?;
    let first = poles
        .and_then(|p| p.iter().find(|p| p.n == 1))
        .ok_or_else(|| Error::MissingDependency("basin and linear time scales need the first pole".into()))?;
    let a1 = first.a();
    let eps1 = params.hbar2_over_2m() * a1 * a1;
    if !(eps1 > params.e0) {
        return Err(Error::Domain(format!("first resonance {eps1} eV does not lie above E0")));
    }
    let bl_time = x / scales.v_sc;
    Ok(TimeScales {
        bl_time,
        tp_opaque: bl_time / 3f64.sqrt(),
        tp_basin: CONSTANTS.hbar * std::f64::consts::PI / (eps1 - params.e0),
        tp_linear: x / (params.hbar_over_m() * a1),
        phase_time_asymptote: 2.0 / (scales.v_sc * scales.k),
    })
}

/// Time after the forerunner peak at which the pole and saddle terms of the
/// opaque-limit source amplitude have equal modulus.
pub fn transition_time(model: &SourceModel, x: f64) -> Result<f64> {
    let kappa_x = x * model.scales().kappa0;
    if !(kappa_x >= 3.0) {
        return Err(Error::NoTransition {
            x,
            reason: format!("xκ0 = {kappa_x:.3} is below 3; the two terms do not separate"),
        });
    }
    let tau = model.bl_time(x);
    let gap = |t: f64| -> Result<f64> { Ok(model.psi_pole(x, t)?.norm() - model.psi_saddle(x, t)?.norm()) };
    let mut a = tau / 3f64.sqrt();
    if gap(a)? > 0.0 {
        return Err(Error::NoTransition {
            x,
            reason: "the pole term already dominates at the forerunner peak".into(),
        });
    }
    // the saddle term decays as t^{-3/2}, so deep crossings lie far out
    while a < 1e8 * tau {
        let b = a * 1.1;
        if gap(b)? > 0.0 {
            return bracketed_root(gap, a, b, 1e-6);
        }
        a = b;
    }
    Err(Error::NoTransition {
        x,
        reason: format!("no crossing before {:.3e} fs", 1e8 * tau),
    })
}

/// First x where ω_av at the peak rises through `omega`, by linear
/// interpolation along the curve.
pub fn frequency_crossover(curve: &[PeakRecord], omega: f64) -> Option<f64> {
    curve.windows(2).find_map(|p| {
        let (a, b) = (p[0].omega_av_at_peak - omega, p[1].omega_av_at_peak - omega);
        (a < 0.0 && b >= 0.0).then(|| p[0].x + (p[1].x - p[0].x) * a / (a - b))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::PoleTerm;

    fn source(frac: f64) -> SourceModel {
        SourceModel::new(MediumParams::new(0.067, 0.3, frac * 0.3).unwrap()).unwrap()
    }

    /// A model without an analytic derivative, to exercise the fallbacks.
    struct NoDerivative<'a>(&'a SourceModel);

    impl Wavefunction for NoDerivative<'_> {
        fn params(&self) -> &MediumParams {
            self.0.params()
        }
        fn psi(&self, x: f64, t: f64) -> Result<Complex64> {
            self.0.psi(x, t)
        }
    }

    #[test]
    fn numeric_frequency_matches_the_analytic_one() {
        let m = source(0.907);
        let ctrl = StepControl::default();
        for &(x, t) in &[(1.0, 0.5), (2.75, 3.0), (5.0, 40.0)] {
            let exact = omega_av(&m, x, t, &ctrl).unwrap();
            let numeric = omega_av(&NoDerivative(&m), x, t, &ctrl).unwrap();
            assert!((numeric / exact - 1.0).abs() < 1e-4, "({x}, {t}): {numeric} vs {exact}");
        }
    }

    #[test]
    fn frequency_limits_of_the_source() {
        let m = source(0.5);
        let s = *m.scales();
        let ctrl = StepControl::default();
        let late = omega_av(&m, 1.0, 2000.0, &ctrl).unwrap();
        assert!((late / s.omega0 - 1.0).abs() < 1e-2, "{late} vs {}", s.omega0);
        let early = omega_av(&m, 1.0, 0.01, &ctrl).unwrap();
        let saddle = m.omega_saddle(1.0, 0.01).unwrap();
        assert!((early / saddle - 1.0).abs() < 1e-2, "{early} vs {saddle}");
    }

    #[test]
    fn frequency_is_undefined_on_an_empty_signal() {
        let m = source(0.5);
        let x = 10.0;
        let before = 0.5 * m.bl_time(x);
        let err = omega_av(&PoleTerm(&m), x, before, &StepControl::default()).unwrap_err();
        assert!(matches!(err, Error::UndefinedFrequency { .. }), "{err}");
    }

    #[test]
    fn opaque_peak_follows_the_traversal_time() {
        let m = source(0.5);
        let x = 20.0 / m.scales().kappa0;
        let tau = m.bl_time(x);
        let peak = first_peak(&m, x, (0.0, 3.0 * tau), 256, 1e-6).unwrap();
        assert!((peak.t_p / tau - 3f64.sqrt().recip()).abs() < 0.02, "{}", peak.t_p / tau);
        assert!(peak.t_p > 0.0 && peak.t_p < 3.0 * tau);
    }

    #[test]
    fn refinement_is_idempotent() {
        let m = source(0.907);
        let peak = first_peak(&m, 2.75, (0.0, 40.0), 128, 1e-6).unwrap();
        let h = 1e-3 * peak.t_p;
        let again = refine_peak(&m, 2.75, (peak.t_p - h, peak.t_p + h), 1e-6).unwrap();
        assert!((again / peak.t_p - 1.0).abs() < 1e-9);
        // the refined density beats its neighbours
        for t in [peak.t_p - h, peak.t_p + h] {
            assert!(m.density(2.75, t).unwrap() <= peak.density_at_peak);
        }
    }

    #[test]
    fn parabolic_refinement_agrees_with_the_derivative_root() {
        let m = source(0.907);
        let a = first_peak(&m, 2.75, (0.0, 40.0), 128, 1e-8).unwrap();
        let b = first_peak(&NoDerivative(&m), 2.75, (0.0, 40.0), 128, 1e-8).unwrap();
        assert!((a.t_p / b.t_p - 1.0).abs() < 1e-5, "{} vs {}", a.t_p, b.t_p);
    }

    #[test]
    fn pole_term_alone_has_no_peak() {
        let m = source(0.5);
        let x = 5.0;
        let err = first_peak(&PoleTerm(&m), x, (0.0, 4.0 * m.bl_time(x)), 128, 1e-6).unwrap_err();
        assert!(matches!(err, Error::MonotonicSignal { .. }));
        assert!(first_peak(&m, x, (0.0, 10.0), 32, 1e-6).is_err());
    }

    #[test]
    fn prominence_skips_ripples() {
        let d = [0.0, 1.0, 1.0005, 1.0004, 2.0, 3.0, 2.0, 2.5, 1.0];
        assert_eq!(first_prominent(&d), Some(5));
        assert_eq!(first_prominent(&[0.0, 1.0, 2.0, 3.0]), None);
    }

    #[test]
    fn source_basin_has_an_interior_minimum() {
        let m = source(0.907);
        let k0 = m.scales().kappa0;
        let xs: Vec<f64> = (1..=16).map(|i| 0.25 * i as f64 / k0).collect();
        let scan = basin_scan(&m, &xs, &WindowPolicy::default()).unwrap();
        let min = scan.minimum.expect("basin");
        assert!(min.x > 0.0 && min.x < 3.0 / k0, "{}", min.x * k0);
        assert!(scan.curve.iter().all(|p| p.t_p >= min.t_p));
        assert!(scan.tail_slope > 0.0);
    }

    #[test]
    fn least_squares_recovers_a_line() {
        let v = 1.0;
        let recs: Vec<(f64, f64)> = [0.3, 0.4, 0.5, 0.6, 0.7].iter().map(|&e| (e, 2.0 / (v - e) + 0.5)).collect();
        let fit = fit_tp_vs_inverse_gap(v, &recs).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12 && (fit.intercept - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let twice = [(0.3, 1.0), (0.3, 1.1), (0.3, 1.2), (0.3, 1.3)];
        assert!(matches!(fit_tp_vs_inverse_gap(v, &twice), Err(Error::Fit(_))));
        assert!(fit_tp_vs_inverse_gap(v, &recs[..3]).is_err());
    }

    #[test]
    fn timescales_need_the_pole_table() {
        let p = MediumParams::new(0.067, 1.0, 0.1).unwrap().with_length(40.0).unwrap();
        assert!(matches!(reference_timescales(&p, 1.0, None), Err(Error::MissingDependency(_))));
        let poles = crate::resonances::find_poles(&p, 2).unwrap();
        let s = reference_timescales(&p, 1.0, Some(&poles)).unwrap();
        assert_eq!(s.tp_opaque, s.bl_time / 3f64.sqrt());
        let mass = 0.067 * CONSTANTS.hbar * CONSTANTS.hbar / CONSTANTS.hbar_sq_over_me;
        let kappa0 = derive_scales(&p).unwrap().kappa0;
        assert!((s.bl_time / (1.0 * mass / (kappa0 * CONSTANTS.hbar)) - 1.0).abs() < 1e-12);
        // ε_1 sits just above V for an opaque barrier
        assert!(s.tp_basin > CONSTANTS.hbar * std::f64::consts::PI / 1.0 * 0.9);
        assert!([s.bl_time, s.tp_basin, s.tp_linear, s.phase_time_asymptote].iter().all(|&v| v > 0.0));
        let near = p.with_e0(0.999).unwrap();
        let poles = crate::resonances::find_poles(&near, 1).unwrap();
        let n = reference_timescales(&near, 1.0, Some(&poles)).unwrap();
        assert!(n.tp_basin > 100.0 * s.tp_basin && n.bl_time < 100.0 * s.bl_time);
    }

    #[test]
    fn transition_follows_the_peak() {
        let m = source(0.5);
        for xk in [5.0, 20.0] {
            let x = xk / m.scales().kappa0;
            let t_tr = transition_time(&m, x).unwrap();
            assert!(t_tr > m.bl_time(x) / 3f64.sqrt());
            let (before, after) = (0.99 * t_tr, 1.01 * t_tr);
            assert!(m.psi_saddle(x, before).unwrap().norm() > m.psi_pole(x, before).unwrap().norm());
            assert!(m.psi_pole(x, after).unwrap().norm() > m.psi_saddle(x, after).unwrap().norm());
        }
        let shallow = 0.5 / m.scales().kappa0;
        assert!(matches!(transition_time(&m, shallow), Err(Error::NoTransition { .. })));
    }

    #[test]
    fn crossover_interpolates_between_samples() {
        let rec = |x: f64, w: f64| PeakRecord {
            x,
            t_p: 1.0,
            density_at_peak: 1.0,
            omega_av_at_peak: w,
        };
        let curve = [rec(1.0, 0.5), rec(2.0, 0.8), rec(3.0, 1.2)];
        assert!((frequency_crossover(&curve, 1.0).unwrap() - 2.5).abs() < 1e-12);
        assert!(frequency_crossover(&curve, 2.0).is_none());
    }
}

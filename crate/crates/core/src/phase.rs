//! Accurate unimodular phase factors e^{i·a/b} for large phases.

use num_complex::Complex64;

// 2π split so that n·TWO_PI_HI is exact for |n| < 2^26.
const TWO_PI_HI: f64 = 6.283_185_303_211_212;
const TWO_PI_MID: f64 = 3.968_374_073_792_802e-9;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// Quotient a/b as an unevaluated sum (hi, lo).
fn div_extended(a: f64, b: f64) -> (f64, f64) {
    let hi = a / b;
    let rem = (-hi).mul_add(b, a);
    (hi, rem / b)
}

/// Reduces hi + lo modulo 2π to roughly (−π, π].
fn reduce(hi: f64, lo: f64) -> f64 {
    let n = (hi / std::f64::consts::TAU).round();
    let r = (-n).mul_add(TWO_PI_HI, hi);
    let r = (-n).mul_add(TWO_PI_MID, r);
    r + (lo - n * TWO_PI_LO)
}

/// e^{i·num/den}, with the phase divided and reduced in extended precision
/// when it is large.
pub fn phase_factor(num: f64, den: f64) -> Complex64 {
    let (hi, lo) = div_extended(num, den);
    let angle = if hi.abs() > 1.0e8 && hi.abs() < 4.0e15 {
        reduce(hi, lo)
    } else {
        hi
    };
    Complex64::from_polar(1.0, angle)
}

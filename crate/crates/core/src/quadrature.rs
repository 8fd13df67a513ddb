//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature for
//! complex-valued, vector-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_063_920,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate<const N: usize> {
    pub value: [Complex64; N],
    pub error: [f64; N],
    pub evaluations: usize,
}

struct Interval<const N: usize> {
    a: f64,
    b: f64,
    value: [Complex64; N],
    error: [f64; N],
    priority: f64,
}

impl<const N: usize> PartialEq for Interval<N> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<const N: usize> Eq for Interval<N> {}
impl<const N: usize> PartialOrd for Interval<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Interval<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn rule<const N: usize, F>(f: &F, a: f64, b: f64) -> ([Complex64; N], [f64; N])
where
    F: Fn(f64) -> [Complex64; N],
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let zero = Complex64::new(0.0, 0.0);
    let mut kronrod = [zero; N];
    let mut gauss = [zero; N];
    let fc = f(centre);
    for j in 0..N {
        kronrod[j] = fc[j] * WGK[10];
    }
    for (i, (&x, &wk)) in XGK[..10].iter().zip(&WGK[..10]).enumerate() {
        let dx = half * x;
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        for j in 0..N {
            let s = f1[j] + f2[j];
            kronrod[j] += s * wk;
            if i % 2 == 1 {
                gauss[j] += s * WG[i / 2];
            }
        }
    }
    let mut error = [0.0; N];
    for j in 0..N {
        kronrod[j] *= half;
        gauss[j] *= half;
        error[j] = (kronrod[j] - gauss[j]).norm();
    }
    (kronrod, error)
}

fn converged<const N: usize>(value: &[Complex64; N], error: &[f64; N], spec: &QuadratureSpec) -> bool {
    value
        .iter()
        .zip(error)
        .all(|(v, e)| *e <= spec.abs_tol.max(spec.rel_tol * v.norm()))
}

/// Integrates `f` over the finite interval [a, b].
pub fn integrate<const N: usize, F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate<N>>
where
    F: Fn(f64) -> [Complex64; N],
{
    integrate_split(f, &[a, b], spec)
}

/// Integrates over consecutive sub-intervals given by `breaks`, which should
/// include any interior points where the integrand is not smooth.
pub fn integrate_split<const N: usize, F>(f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Estimate<N>>
where
    F: Fn(f64) -> [Complex64; N],
{
    let zero = Complex64::new(0.0, 0.0);
    let mut heap = BinaryHeap::new();
    let mut total = [zero; N];
    let mut total_err = [0.0; N];
    let mut evaluations = 0;
    let priority = |err: &[f64; N]| err.iter().cloned().fold(0.0, f64::max);
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == b {
            continue;
        }
        let (value, error) = rule(&f, a, b);
        evaluations += 21;
        for j in 0..N {
            total[j] += value[j];
            total_err[j] += error[j];
        }
        heap.push(Interval {
            a,
            b,
            value,
            error,
            priority: priority(&error),
        });
    }

    while !converged(&total, &total_err, spec) {
        if heap.len() >= spec.max_intervals {
            return Err(Error::Quadrature {
                estimate: total[0].norm(),
                error: total_err[0],
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in double precision
            return Err(Error::Quadrature {
                estimate: total[0].norm(),
                error: total_err[0],
            });
        }
        let (v1, e1) = rule(&f, worst.a, mid);
        let (v2, e2) = rule(&f, mid, worst.b);
        evaluations += 42;
        for j in 0..N {
            total[j] += v1[j] + v2[j] - worst.value[j];
            total_err[j] += e1[j] + e2[j] - worst.error[j];
        }
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            priority: priority(&e1),
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            priority: priority(&e2),
        });
    }

    // re-sum to shed the drift of the running updates
    let mut value = [zero; N];
    let mut error = [0.0; N];
    for interval in heap.iter() {
        for j in 0..N {
            value[j] += interval.value[j];
            error[j] += interval.error[j];
        }
    }
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

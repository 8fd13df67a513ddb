//! The exact shutter and step amplitudes against Crank–Nicolson runs.

use forerunner_core::oracle::{evolve_scattered, relative_l2, CutoffForm, OracleGrid, PotentialProfile};
use forerunner_core::shutter::ShutterSolution;
use forerunner_core::step::StepModel;
use forerunner_core::{derive_scales, MediumParams, Wavefunction};

fn probes(x_max: f64, nx: usize, t_max: f64, nt: usize) -> Vec<(f64, f64)> {
    (1..=nx)
        .flat_map(|i| (0..=nt).map(move |j| (x_max * i as f64 / nx as f64, t_max * j as f64 / nt as f64)))
        .collect()
}

fn compare(model: &impl Wavefunction, form: CutoffForm, grid: &OracleGrid, probes: &[(f64, f64)]) -> f64 {
    let k = derive_scales(model.params()).unwrap().k;
    let run = evolve_scattered(k, form, grid, probes).unwrap();
    let exact: Vec<f64> = probes.iter().map(|&(x, t)| model.density(x, t).unwrap()).collect();
    let numeric: Vec<f64> = run.values.iter().map(|v| v.norm_sqr()).collect();
    relative_l2(&exact, &numeric)
}

#[test]
fn shutter_agrees_with_the_integrator() {
    let p = MediumParams::new(0.067, 1.0, 0.1).unwrap().with_length(40.0).unwrap();
    let model = ShutterSolution::covering(p, 0.25).unwrap();
    let profile = PotentialProfile::Barrier { v: 1.0, length: 40.0 };
    let grid = OracleGrid::sized((0.0, 4.0), 10.0, 6.0, 0.01, 0.01, 0.067, profile).unwrap();
    let err = compare(&model, CutoffForm::Shutter, &grid, &probes(4.0, 16, 10.0, 20));
    assert!(err < 1e-3, "{err:e}");
}

#[test]
fn step_agrees_with_the_integrator() {
    let p = MediumParams::new(0.067, 1.0, 0.5).unwrap();
    let model = StepModel::new(p).unwrap();
    let grid = OracleGrid::sized((0.0, 3.0), 10.0, 6.0, 0.01, 0.01, 0.067, PotentialProfile::Step { v: 1.0 }).unwrap();
    let err = compare(&model, CutoffForm::PlaneWave, &grid, &probes(3.0, 12, 10.0, 20));
    assert!(err < 1e-3, "{err:e}");
}

use forerunner_core::analysis::{
    basin_scan, fit_tp_vs_inverse_gap, omega_av, reference_timescales, BasinScan, PeakRecord,
    StepControl, WindowPolicy,
};
use forerunner_core::oracle::{evolve_scattered, relative_l2, CutoffForm, OracleGrid, PotentialProfile};
use forerunner_core::quadrature::QuadratureSpec;
use forerunner_core::resonances::find_poles;
use forerunner_core::shutter::ShutterSolution;
use forerunner_core::source::SourceModel;
use forerunner_core::step::StepModel;
use forerunner_core::{derive_scales, DerivedScales, MediumParams, Wavefunction};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::args::{Command, Medium, Model, OracleModel, Physics, TimeAxis, Tolerances, XAxis};
use crate::table::{Cell, Table};
use crate::CliError;

/// Any of the three models behind one evaluator.
pub enum AnyModel {
    Source(SourceModel),
    Shutter(Box<ShutterSolution>),
    Step(StepModel),
}

impl Wavefunction for AnyModel {
    fn params(&self) -> &MediumParams {
        match self {
            AnyModel::Source(m) => m.params(),
            AnyModel::Shutter(m) => m.params(),
            AnyModel::Step(m) => m.params(),
        }
    }

    fn psi(&self, x: f64, t: f64) -> forerunner_core::Result<Complex64> {
        match self {
            AnyModel::Source(m) => Wavefunction::psi(m, x, t),
            AnyModel::Shutter(m) => Wavefunction::psi(m.as_ref(), x, t),
            AnyModel::Step(m) => Wavefunction::psi(m, x, t),
        }
    }

    fn psi_and_dt(&self, x: f64, t: f64) -> Option<forerunner_core::Result<(Complex64, Complex64)>> {
        match self {
            AnyModel::Source(m) => Wavefunction::psi_and_dt(m, x, t),
            AnyModel::Shutter(m) => Wavefunction::psi_and_dt(m.as_ref(), x, t),
            AnyModel::Step(m) => Wavefunction::psi_and_dt(m, x, t),
        }
    }
}

fn quadrature(tol: &Tolerances) -> QuadratureSpec {
    QuadratureSpec {
        rel_tol: tol.quad,
        ..QuadratureSpec::default()
    }
}

fn params_of(p: &Physics) -> Result<MediumParams, CliError> {
    let e0 = match (p.e0, p.e0_frac) {
        (Some(e), None) => e,
        (None, Some(f)) => f * p.v,
        _ => return Err(CliError::Usage("give exactly one of --E0 and --E0-frac".into())),
    };
    let params = MediumParams::new(p.mass_ratio, p.v, e0)?;
    match p.length {
        Some(l) => Ok(params.with_length(l)?),
        None => Ok(params),
    }
}

fn medium_params(m: &Medium, e0: f64) -> Result<MediumParams, CliError> {
    let params = MediumParams::new(m.mass_ratio, m.v, e0)?;
    match m.length {
        Some(l) => Ok(params.with_length(l)?),
        None => Ok(params),
    }
}

fn shutter(params: MediumParams, tol: &Tolerances) -> Result<ShutterSolution, CliError> {
    if params.length.is_none() {
        return Err(CliError::Usage("the shutter needs a barrier length --L".into()));
    }
    let sol = match tol.poles_n {
        Some(n) => ShutterSolution::new(params, n)?,
        None => ShutterSolution::covering(params, tol.poles_t_min)?,
    };
    Ok(sol.with_quadrature(quadrature(tol)))
}

pub fn build(model: Model, params: MediumParams, tol: &Tolerances) -> Result<AnyModel, CliError> {
    Ok(match model {
        Model::Source => AnyModel::Source(SourceModel::new(params)?),
        Model::Shutter => AnyModel::Shutter(Box::new(shutter(params, tol)?)),
        Model::Step => AnyModel::Step(StepModel::new(params)?.with_quadrature(quadrature(tol))),
    })
}

fn policy(tol: &Tolerances, t_max: Option<f64>) -> WindowPolicy {
    WindowPolicy {
        t_max,
        coarse_points: tol.coarse_points,
        refine_tol: tol.refine,
        ..WindowPolicy::default()
    }
}

fn control(tol: &Tolerances) -> StepControl {
    StepControl {
        tol: tol.omega,
        floor_rel: tol.floor,
        ..StepControl::default()
    }
}

fn times(axis: &TimeAxis) -> Result<Vec<f64>, CliError> {
    if !(axis.t_max > 0.0) || axis.nt == 0 {
        return Err(CliError::Usage("--t-max must be positive and --nt at least 1".into()));
    }
    Ok((1..=axis.nt).map(|i| axis.t_max * i as f64 / axis.nt as f64).collect())
}

fn positions(x_min: f64, x_max: f64, nx: usize) -> Result<Vec<f64>, CliError> {
    if !(x_max > x_min) || nx < 2 {
        return Err(CliError::Usage("need --x-max > --x-min and --nx of at least 2".into()));
    }
    Ok((0..nx).map(|i| x_min + (x_max - x_min) * i as f64 / (nx - 1) as f64).collect())
}

fn space(axis: &XAxis) -> Result<Vec<f64>, CliError> {
    positions(axis.x_min, axis.x_max, axis.nx)
}

fn describe_scales(table: &mut Table, params: &MediumParams, s: &DerivedScales) {
    table.note("E0_eV", params.e0);
    table.note("k_per_nm", s.k);
    table.note("kappa0_per_nm", s.kappa0);
    table.note("v_sc_nm_per_fs", s.v_sc);
    table.note("omega0_per_fs", s.omega0);
    table.note("omega_V_per_fs", s.omega_v);
}

fn peak_row(p: &PeakRecord, omega_v: f64) -> Vec<Cell> {
    vec![
        p.x.into(),
        p.t_p.into(),
        p.density_at_peak.into(),
        (p.omega_av_at_peak / omega_v).into(),
    ]
}

fn basin_table(scan: &BasinScan, omega_v: f64) -> Table {
    let mut table = Table::new(&["x_nm", "t_p_fs", "density_at_peak", "omega_av_over_omega_V"]);
    for p in &scan.curve {
        table.push(peak_row(p, omega_v));
    }
    match &scan.minimum {
        Some(m) => {
            table.summary("basin_x_nm", m.x);
            table.summary("basin_t_p_fs", m.t_p);
        }
        None => table.summary_text("basin", "monotone"),
    }
    table.summary("tail_slope_fs_per_nm", scan.tail_slope);
    table
}

pub fn run(command: &Command) -> Result<Table, CliError> {
    match command {
        Command::SourceDensity { physics, x, time } => {
            let params = params_of(physics)?;
            let m = SourceModel::new(params)?;
            let ts = times(time)?;
            let rows = ts
                .par_iter()
                .map(|&t| -> forerunner_core::Result<Vec<Cell>> {
                    let pole = m.psi_pole(*x, t)?;
                    let saddle = m.psi_saddle(*x, t)?;
                    Ok(vec![
                        t.into(),
                        m.psi(*x, t)?.norm_sqr().into(),
                        pole.norm_sqr().into(),
                        saddle.norm_sqr().into(),
                        (pole + saddle).norm_sqr().into(),
                    ])
                })
                .collect::<forerunner_core::Result<Vec<_>>>()?;
            let mut table = Table::new(&["t_fs", "density", "pole_density", "saddle_density", "opaque_sum_density"]);
            describe_scales(&mut table, &params, m.scales());
            table.note("bl_time_fs", m.bl_time(*x));
            rows.into_iter().for_each(|r| table.push(r));
            Ok(table)
        }

        Command::FrequencyTrace {
            model,
            physics,
            tol,
            x,
            time,
        } => {
            let params = params_of(physics)?;
            let scales = derive_scales(&params)?;
            let m = build(*model, params, tol)?;
            let ctrl = control(tol);
            let rows = times(time)?
                .par_iter()
                .map(|&t| -> forerunner_core::Result<Vec<Cell>> {
                    let omega = match omega_av(&m, *x, t, &ctrl) {
                        Ok(w) => Cell::Num(w / scales.omega_v),
                        Err(forerunner_core::Error::UndefinedFrequency { .. }) => Cell::Undefined,
                        Err(e) => return Err(e),
                    };
                    Ok(vec![t.into(), m.density(*x, t)?.into(), omega])
                })
                .collect::<forerunner_core::Result<Vec<_>>>()?;
            let mut table = Table::new(&["t_fs", "density", "omega_av_over_omega_V"]);
            describe_scales(&mut table, &params, &scales);
            rows.into_iter().for_each(|r| table.push(r));
            Ok(table)
        }

        Command::PeakMap {
            model,
            physics,
            tol,
            space: axis,
            t_max,
        } => {
            let params = params_of(physics)?;
            let scales = derive_scales(&params)?;
            let m = build(*model, params, tol)?;
            let pol = policy(tol, *t_max);
            let peaks = space(axis)?
                .par_iter()
                .map(|&x| forerunner_core::analysis::peak_with_policy(&m, x, &pol))
                .collect::<forerunner_core::Result<Vec<_>>>()?;
            let mut table = Table::new(&["x_nm", "t_p_fs", "density_at_peak", "omega_av_over_omega_V", "bl_time_fs"]);
            describe_scales(&mut table, &params, &scales);
            for p in &peaks {
                let mut row = peak_row(p, scales.omega_v);
                row.push((p.x / scales.v_sc).into());
                table.push(row);
            }
            Ok(table)
        }

        Command::Basin {
            model,
            physics,
            tol,
            space: axis,
            t_max,
        } => {
            let params = params_of(physics)?;
            let scales = derive_scales(&params)?;
            let m = build(*model, params, tol)?;
            let scan = basin_scan(&m, &space(axis)?, &policy(tol, *t_max))?;
            let mut table = basin_table(&scan, scales.omega_v);
            describe_scales(&mut table, &params, &scales);
            if let AnyModel::Shutter(sol) = &m {
                let poles: Vec<_> = sol.states().iter().take(1).map(|s| s.pole).collect();
                let ts = reference_timescales(&params, 1.0, Some(&poles))?;
                table.note("tp_basin_fs", ts.tp_basin);
                table.note("inverse_v1_fs_per_nm", ts.tp_linear);
            }
            Ok(table)
        }

        Command::FitTp {
            model,
            medium,
            tol,
            e0_list,
            xk_min,
            xk_max,
            nx,
        } => {
            let mut table = Table::new(&["E0_eV", "inverse_gap_per_eV", "basin_x_nm", "basin_t_p_fs"]);
            let mut records = Vec::with_capacity(e0_list.len());
            for &e0 in e0_list {
                let params = medium_params(medium, e0)?;
                let scales = derive_scales(&params)?;
                let xs: Vec<f64> = positions(*xk_min, *xk_max, *nx)?.iter().map(|xk| xk / scales.kappa0).collect();
                let m = build(*model, params, tol)?;
                let scan = basin_scan(&m, &xs, &policy(tol, None))?;
                let min = scan.minimum.ok_or(forerunner_core::Error::Fit(format!(
                    "t_p(x) has no interior minimum at E0 = {e0} eV"
                )))?;
                table.push(vec![e0.into(), (1.0 / (medium.v - e0)).into(), min.x.into(), min.t_p.into()]);
                records.push((e0, min.t_p));
            }
            let fit = fit_tp_vs_inverse_gap(medium.v, &records)?;
            table.summary("slope_fs_eV", fit.slope);
            table.summary("intercept_fs", fit.intercept);
            table.summary("r_squared", fit.r_squared);
            Ok(table)
        }

        Command::ShutterSnapshots {
            physics,
            tol,
            times: ts,
            x_min,
            x_max,
            nx,
        } => {
            let params = params_of(physics)?;
            let sol = shutter(params, tol)?;
            let xs = positions(*x_min, *x_max, *nx)?;
            let snaps = sol.density_snapshots(ts, &xs)?;
            let mut cols = vec!["x_nm".to_string(), "stationary_density".to_string()];
            cols.extend(ts.iter().map(|t| format!("density_t{t}fs")));
            let mut table = Table::with_columns(cols);
            describe_scales(&mut table, &params, &derive_scales(&params)?);
            for (j, &x) in xs.iter().enumerate() {
                let mut row = vec![x.into(), sol.stationary_density(x)?.into()];
                row.extend(snaps.density.iter().map(|d| Cell::Num(d[j])));
                table.push(row);
            }
            Ok(table)
        }

        Command::ShutterDensity {
            physics,
            tol,
            x: xs,
            time,
        } => {
            let params = params_of(physics)?;
            let sol = shutter(params, tol)?;
            let mut cols = vec!["t_fs".to_string()];
            cols.extend(xs.iter().map(|x| format!("density_x{x}nm")));
            let mut table = Table::with_columns(cols);
            describe_scales(&mut table, &params, &derive_scales(&params)?);
            for &x in xs {
                table.note(&format!("stationary_density_x{x}nm"), sol.stationary_density(x)?);
            }
            let rows = times(time)?
                .par_iter()
                .map(|&t| -> forerunner_core::Result<Vec<Cell>> {
                    let mut row = vec![Cell::Num(t)];
                    for &x in xs {
                        row.push(sol.density(x, t)?.into());
                    }
                    Ok(row)
                })
                .collect::<forerunner_core::Result<Vec<_>>>()?;
            rows.into_iter().for_each(|r| table.push(r));
            Ok(table)
        }

        Command::Poles { physics, poles_n } => {
            let params = params_of(physics)?;
            if params.length.is_none() {
                return Err(CliError::Usage("poles need a barrier length --L".into()));
            }
            let poles = find_poles(&params, *poles_n)?;
            let mut table = Table::new(&["n", "a_per_nm", "b_per_nm", "re_energy_eV", "im_energy_eV", "residual"]);
            table.note("opacity", params.opacity()?);
            for p in &poles {
                let e = p.energy(&params);
                table.push(vec![
                    Cell::Count(p.n),
                    p.a().into(),
                    p.b().into(),
                    e.re.into(),
                    e.im.into(),
                    p.residual.into(),
                ]);
            }
            Ok(table)
        }

        Command::StepFrequency {
            physics,
            tol,
            space: axis,
        } => {
            let params = params_of(physics)?;
            let scales = derive_scales(&params)?;
            let m = build(Model::Step, params, tol)?;
            let source = SourceModel::new(params)?;
            let pol = policy(tol, None);
            let peaks = space(axis)?
                .par_iter()
                .map(|&x| forerunner_core::analysis::peak_with_policy(&m, x, &pol))
                .collect::<forerunner_core::Result<Vec<_>>>()?;
            let mut table = Table::new(&[
                "x_nm",
                "t_p_fs",
                "omega_av_over_omega_V",
                "omega0_over_omega_V",
                "omega_s_over_omega_V",
            ]);
            describe_scales(&mut table, &params, &scales);
            for p in &peaks {
                table.push(vec![
                    p.x.into(),
                    p.t_p.into(),
                    (p.omega_av_at_peak / scales.omega_v).into(),
                    (scales.omega0 / scales.omega_v).into(),
                    (source.omega_saddle(p.x, p.t_p)? / scales.omega_v).into(),
                ]);
            }
            if let Some(x) = forerunner_core::analysis::frequency_crossover(&peaks, scales.omega_v) {
                table.summary("crossover_x_nm", x);
                table.summary("crossover_x_kappa0", x * scales.kappa0);
            }
            Ok(table)
        }

        Command::StepBasin {
            physics,
            tol,
            space: axis,
        } => {
            let params = params_of(physics)?;
            let scales = derive_scales(&params)?;
            let m = build(Model::Step, params, tol)?;
            let scan = basin_scan(&m, &space(axis)?, &policy(tol, None))?;
            let mut table = basin_table(&scan, scales.omega_v);
            describe_scales(&mut table, &params, &scales);
            Ok(table)
        }

        Command::OracleCompare {
            model,
            physics,
            tol,
            x_max,
            nx,
            time,
            dx,
            dt,
            v_signal,
        } => {
            let params = params_of(physics)?;
            let scales = derive_scales(&params)?;
            let (m, form, profile) = match model {
                OracleModel::Shutter => {
                    let length = params
                        .length
                        .ok_or_else(|| CliError::Usage("the shutter needs a barrier length --L".into()))?;
                    (
                        build(Model::Shutter, params, tol)?,
                        CutoffForm::Shutter,
                        PotentialProfile::Barrier { v: params.v, length },
                    )
                }
                OracleModel::Step => (
                    build(Model::Step, params, tol)?,
                    CutoffForm::PlaneWave,
                    PotentialProfile::Step { v: params.v },
                ),
            };
            if *nx == 0 || time.nt == 0 {
                return Err(CliError::Usage("--nx and --nt must be positive".into()));
            }
            let probes: Vec<(f64, f64)> = (1..=*nx)
                .flat_map(|i| {
                    (0..=time.nt).map(move |j| (x_max * i as f64 / *nx as f64, time.t_max * j as f64 / time.nt as f64))
                })
                .collect();
            let grid = OracleGrid::sized((0.0, *x_max), time.t_max, *v_signal, *dx, *dt, params.mass_ratio, profile)?;
            let run = evolve_scattered(scales.k, form, &grid, &probes)?;
            let exact = probes
                .par_iter()
                .map(|&(x, t)| m.density(x, t))
                .collect::<forerunner_core::Result<Vec<_>>>()?;
            let numeric: Vec<f64> = run.values.iter().map(|v| v.norm_sqr()).collect();
            let mut table = Table::new(&["x_nm", "t_fs", "model_density", "oracle_density"]);
            describe_scales(&mut table, &params, &scales);
            table.note("oracle_nodes", grid.nx as f64);
            for (((x, t), e), o) in probes.iter().zip(&exact).zip(&numeric) {
                table.push(vec![(*x).into(), (*t).into(), (*e).into(), (*o).into()]);
            }
            table.summary("relative_l2", relative_l2(&numeric, &exact));
            Ok(table)
        }
    }
}

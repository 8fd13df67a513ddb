use std::path::Path;
use std::process::{Command, Output};

fn forerunner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forerunner"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = forerunner(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

const SOURCE_FIG1: &[&str] = &[
    "source-density", "--V", "0.3", "--E0-frac", "0.907", "--x", "2.75", "--t-max", "100", "--nt", "400",
];

#[test]
fn source_density_has_the_documented_columns() {
    let csv = stdout(SOURCE_FIG1);
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "t_fs,density,pole_density,saddle_density,opaque_sum_density");
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 400);
    assert!((rows[399][0] - 100.0).abs() < 1e-9);
    assert!(rows.iter().all(|r| r.len() == 5 && r[1..].iter().all(|&d| d >= 0.0)));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "basin", "--model", "source", "--V", "0.3", "--E0-frac", "0.544", "--x-min", "0.5", "--x-max", "20", "--nx", "16",
    ];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn echoed_config_reproduces_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let run = |args: &[&str], out: &Path| {
        let mut all: Vec<&str> = args.to_vec();
        all.extend(["--out", out.to_str().unwrap()]);
        assert!(forerunner(&all).status.success());
    };
    run(
        &["frequency-trace", "--model", "step", "--V", "1", "--E0", "0.5", "--x", "1.0", "--t-max", "6", "--nt", "24", "--tol-quad", "1e-9"],
        &first,
    );
    run(&["replay", first.to_str().unwrap()], &second);
    let a = std::fs::read_to_string(&first).unwrap();
    assert_eq!(a, std::fs::read_to_string(&second).unwrap());
    // defaults are resolved into the echo
    let config = a.lines().find(|l| l.starts_with("# config: ")).unwrap();
    for key in ["\"mass_ratio\":0.067", "\"coarse_points\":256", "\"quad\":1e-9", "\"poles_t_min\":0.05"] {
        assert!(config.contains(key), "{config}");
    }
    assert!(a.contains("# constants: hbar = 6.582119569e-1 eV fs"));
}

#[test]
fn poles_start_at_the_first_top_barrier_resonance() {
    let rows = data_rows(&stdout(&["poles", "--V", "1", "--E0", "0.1", "--L", "40", "--poles-N", "4"]));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][0], 1.0);
    assert!((rows[0][1] - 1.32841).abs() < 1e-5);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1] && w[1][2] > w[0][2]));
}

#[test]
fn fit_reports_the_regression_footer() {
    let csv = stdout(&["fit-tp", "--model", "source", "--V", "0.3", "--E0-list", "0.09,0.12,0.15,0.18,0.21"]);
    assert_eq!(data_rows(&csv).len(), 5);
    let r2: f64 = csv
        .lines()
        .find_map(|l| l.strip_prefix("# r_squared = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(r2 > 0.99);
}

#[test]
fn failures_map_to_distinct_exit_codes() {
    let code = |args: &[&str]| forerunner(args).status.code().unwrap();
    let physics = code(&["source-density", "--V", "0.3", "--E0", "0.4", "--x", "1", "--t-max", "1"]);
    let flag = code(&["source-density", "--V", "0.3", "--E0", "0.1", "--x", "1", "--t-max", "1", "--bogus"]);
    let domain = code(&["source-density", "--V", "0.3", "--E0", "0.1", "--x=-1", "--t-max", "1"]);
    let fit = code(&["fit-tp", "--model", "source", "--V", "0.3", "--E0-list", "0.1,0.1,0.2,0.25"]);
    let replay = code(&["replay", "Cargo.toml"]);
    assert_eq!(flag, 2);
    assert_eq!(physics, 3);
    assert_eq!(domain, 4);
    assert_eq!(fit, 6);
    assert_eq!(replay, 9);
    let missing_length = forerunner(&["poles", "--V", "1", "--E0", "0.1"]);
    assert_eq!(missing_length.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing_length.stderr).contains("--L"));
}

#[test]
fn shutter_snapshots_start_below_the_stationary_profile() {
    let csv = stdout(&["shutter-snapshots", "--V", "1", "--E0", "0.1", "--L", "40", "--times", "0.5,4", "--nx", "7"]);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.len() == 4));
    // at 0.5 fs the evanescent profile has not filled in yet away from the edge
    assert!(rows[3][2] < rows[3][1]);
}

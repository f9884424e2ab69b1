//! Shipped synthetic aggregate table with known exponents.

use std::path::PathBuf;

use rand_distr::{Distribution, StandardNormal};

use tricode_cli::aggregate::{aggregate, write_rows, AggregateRow, TrajectoryRow};
use tricode_cli::commands::{self, FssOptions};
use tricode_cli::fss::{FssReport, Observable};
use tricode_cli::spec::Cell;
use tricode_core::rng::stream;

const P_C: f64 = 0.5;
const NU: f64 = 1.5;
const NOISE: f64 = 0.01;
const SIZES: [usize; 4] = [8, 16, 32, 64];
const N_POINTS: usize = 41;
const SEED: u64 = 2024;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/synthetic/aggregate.csv")
}

/// `chi_x_mean = 1 / (1 + exp(-(p_g - P_C) L^(1/NU)))` plus 1% Gaussian
/// noise on the `p_x + p_g = 1` line. Every other column is a constant.
fn generate() -> Vec<u8> {
    let mut rng = stream(SEED, 0);
    let mut rows = Vec::new();
    for l in SIZES {
        for i in 0..N_POINTS {
            let p_g = ((0.3 + 0.4 * i as f64 / (N_POINTS - 1) as f64) * 1e12).round() / 1e12;
            let x = (p_g - P_C) * (l as f64).powf(1.0 / NU);
            let eps: f64 = StandardNormal.sample(&mut rng);
            rows.push(AggregateRow {
                l_x: l,
                l_y: l,
                p_x: ((1.0 - p_g) * 1e12).round() / 1e12,
                p_z: 0.0,
                p_g,
                n_traj: 500,
                tee_mean: -0.5,
                tee_var: 0.1,
                tee_var_err_boot: 0.01,
                chi_z_mean: 0.0,
                chi_z_sem: 0.01,
                chi_x_mean: 1.0 / (1.0 + (-x).exp()) + NOISE * eps,
                chi_x_sem: NOISE,
                wloop_mean: 0.0,
                wloop_sem: 0.01,
                tloop_mean: 0.0,
                tloop_sem: 0.01,
                tloop_var: 0.1,
            });
        }
    }
    let mut buf = Vec::new();
    write_rows(&mut buf, &rows).unwrap();
    buf
}

#[test]
fn fixture_matches_its_generator() {
    let fresh = generate();
    if std::env::var_os("TRICODE_REGENERATE_FIXTURES").is_some() {
        std::fs::write(fixture(), &fresh).unwrap();
    }
    let shipped = std::fs::read(fixture()).expect("fixture present");
    assert!(shipped == fresh, "fixture differs from its generator");
}

fn recover(dir: &std::path::Path) -> FssReport {
    let opts = FssOptions {
        input: fixture(),
        observable: Observable::ChiXMean,
        zeta: None,
        init: None,
        out: Some(dir.to_path_buf()),
        n_boot: None,
        seed: 0,
    };
    commands::fss(&opts).unwrap()
}

#[test]
fn fss_recovers_the_fixture_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let r = recover(dir.path());
    assert!((r.p_c - P_C).abs() <= 0.005, "p_c {}", r.p_c);
    assert!((r.nu - NU).abs() / NU <= 0.05, "nu {}", r.nu);
    assert_eq!(r.zeta, 0.0);
    assert_eq!(r.zeta_mode, "fixed");
    assert_eq!(r.line, "p_x+p_g=1");
    assert_eq!(r.method, "profile");
    assert!(r.quality < 2.0, "quality {}", r.quality);
    assert!(r.warnings.is_empty(), "{:?}", r.warnings);

    let json = std::fs::read_to_string(commands::report_path(dir.path(), Observable::ChiXMean)).unwrap();
    let back: FssReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    let collapse = std::fs::read_to_string(commands::collapse_path(dir.path(), Observable::ChiXMean)).unwrap();
    assert!(collapse.starts_with("l,p,x,y,dy\n"));
    assert_eq!(collapse.lines().count(), 1 + SIZES.len() * N_POINTS);

    // Same input, same report.
    let again = recover(dir.path());
    assert_eq!(again, r);
}

/// A results directory whose trajectories follow the same logistic with
/// per-trajectory noise, so that bootstrap errors can be read off.
fn write_trajectory_results(dir: &std::path::Path) -> PathBuf {
    let mut rng = stream(SEED, 1);
    let mut rows = Vec::new();
    for l in [8usize, 16, 32] {
        for i in 0..21 {
            let p_g = ((0.3 + 0.4 * i as f64 / 20.0) * 1e12).round() / 1e12;
            let cell = Cell { l_x: l, l_y: l, p_x: ((1.0 - p_g) * 1e12).round() / 1e12, p_z: 0.0, p_g };
            let mean = 1.0 / (1.0 + (-(p_g - P_C) * (l as f64).powf(1.0 / NU)).exp());
            let traj: Vec<TrajectoryRow> = (0..50)
                .map(|t| {
                    let eps: f64 = StandardNormal.sample(&mut rng);
                    TrajectoryRow {
                        trajectory_id: t,
                        s_t: 0.0,
                        chi_z: 0.0,
                        chi_x: mean + 0.05 * eps,
                        w_loop: 0.0,
                        t_loop: 1.0,
                    }
                })
                .collect();
            let cell_dir = dir.join("cells").join(cell.key());
            std::fs::create_dir_all(&cell_dir).unwrap();
            let mut buf = Vec::new();
            write_rows(&mut buf, &traj).unwrap();
            std::fs::write(cell_dir.join("trajectories.csv"), buf).unwrap();
            rows.push(aggregate(&cell, &traj, 0).unwrap());
        }
    }
    let path = dir.join("aggregate.csv");
    let mut buf = Vec::new();
    write_rows(&mut buf, &rows).unwrap();
    std::fs::write(&path, buf).unwrap();
    path
}

#[test]
fn bootstrap_errors_from_trajectory_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_trajectory_results(dir.path());
    let opts = FssOptions {
        input: input.clone(),
        observable: Observable::ChiXMean,
        zeta: None,
        init: None,
        out: None,
        n_boot: Some(40),
        seed: 3,
    };
    let r = commands::fss(&opts).unwrap();
    assert_eq!(r.method, "bootstrap");
    assert_eq!(r.n_boot, Some(40));
    assert!(r.n_failed.unwrap() <= 4, "{:?}", r.n_failed);
    let central = r.central.as_ref().expect("central fit reported");
    assert!((central.p_c - P_C).abs() <= 0.02, "p_c {}", central.p_c);
    assert!(r.p_c_err > 0.0 && r.p_c_err < 0.02, "p_c_err {}", r.p_c_err);
    assert!(r.nu_err > 0.0 && r.nu_err < 0.5 * NU, "nu_err {}", r.nu_err);
    assert!(commands::report_path(dir.path(), Observable::ChiXMean).exists());
    assert_eq!(commands::fss(&opts).unwrap(), r);

    // Without the trajectory files there is nothing to resample.
    std::fs::remove_dir_all(dir.path().join("cells")).unwrap();
    let err = commands::fss(&opts).unwrap_err();
    assert_eq!(tricode_cli::exit_code(&err), tricode_cli::EXIT_CONFIG);
}

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use tricode_core::analysis::{
    bootstrap_fss, bootstrap_variance, collapse_quality, fit_collapse, sem_variance_error, AnalysisError, CellSamples,
    FitOptions, FssInput, FssPoint, FssSeries, Statistic, ZetaMode,
};

const P_C: f64 = 0.5;
const NU: f64 = 1.5;
const SIZES: [f64; 4] = [8.0, 16.0, 32.0, 64.0];

fn master(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn bump(x: f64) -> f64 {
    (-x * x).exp()
}

/// Points on `L^zeta f((p - P_C) L^(1/NU))` for `p` in `[0.3, 0.7]`, with
/// Gaussian noise of standard deviation `noise L^zeta`.
fn generate(f: fn(f64) -> f64, zeta: f64, noise: f64, n_points: usize, seed: u64) -> FssInput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let series = SIZES
        .iter()
        .map(|&l| FssSeries {
            size: l,
            points: (0..n_points)
                .map(|i| {
                    let p = 0.3 + 0.4 * i as f64 / (n_points - 1) as f64;
                    let exact = l.powf(zeta) * f((p - P_C) * l.powf(1.0 / NU));
                    let stderr = noise * l.powf(zeta);
                    let eps: f64 = StandardNormal.sample(&mut rng);
                    FssPoint { p, value: exact + stderr * eps, stderr }
                })
                .collect(),
        })
        .collect();
    FssInput::new(series).unwrap()
}

fn synthetic(zeta: f64, noise: f64, n_points: usize, seed: u64) -> FssInput {
    generate(master, zeta, noise, n_points, seed)
}

#[test]
fn quality_is_about_one_at_the_truth() {
    let data = synthetic(0.0, 0.01, 31, 11);
    assert!(data.n_points() >= 100);
    let s = collapse_quality(&data, P_C, NU, 0.0).unwrap();
    assert!((0.5..=2.0).contains(&s), "quality {s}");
    let doubled = collapse_quality(&data, P_C, 2.0 * NU, 0.0).unwrap();
    assert!(doubled > s, "{doubled} <= {s}");
}

#[test]
fn quality_on_a_shared_grid_value_is_the_limit_from_above() {
    // All sizes share the grid, so p_c on a grid value puts one point of
    // every size at x = 0.
    let data = synthetic(0.0, 0.01, 31, 11);
    let grid: Vec<f64> = data.series()[0].points.iter().map(|pt| pt.p).collect();
    for &p in &grid[5..26] {
        // Sizes differ by powers of 2, so nu with 3/nu an integer (or 2/nu,
        // 1/nu) would add exact ties away from x = 0.
        for nu in [1.3, 1.7, 2.3] {
            let at = collapse_quality(&data, p, nu, 0.0).unwrap();
            let above = collapse_quality(&data, p + 1e-9, nu, 0.0).unwrap();
            assert!((at - above).abs() <= 1e-6 * above, "p_c {p}, nu {nu}: {at} vs {above}");
        }
    }
}

#[test]
fn single_size_is_rejected() {
    let data = synthetic(0.0, 0.01, 10, 1);
    let one = data.series()[..1].to_vec();
    assert!(matches!(FssInput::new(one), Err(AnalysisError::InvalidInput(_))));
}

#[test]
fn fit_recovers_synthetic_exponents() {
    let data = synthetic(0.0, 0.01, 41, 7);
    let fit = fit_collapse(&data, (0.45, 1.2, 0.0), ZetaMode::Fixed(0.0), &FitOptions::default()).unwrap();
    assert!((fit.p_c - P_C).abs() <= 0.005, "p_c {}", fit.p_c);
    assert!((fit.nu - NU).abs() <= 0.08, "nu {}", fit.nu);
    assert_eq!(fit.zeta, 0.0);
    assert_eq!(fit.zeta_err, 0.0);
    assert!(fit.p_c_err > 0.0 && fit.nu_err > 0.0);
    assert!(fit.quality < 2.0);
}

#[test]
fn fit_with_free_zeta() {
    let data = generate(bump, 0.5, 0.01, 41, 3);
    let fit = fit_collapse(&data, (0.45, 1.2, 0.2), ZetaMode::Free, &FitOptions::default()).unwrap();
    assert!((fit.p_c - P_C).abs() <= 0.005, "p_c {}", fit.p_c);
    assert!((fit.nu - NU).abs() <= 0.08, "nu {}", fit.nu);
    assert!((fit.zeta - 0.5).abs() <= 0.05, "zeta {}", fit.zeta);
    assert!(fit.zeta_err > 0.0);
}

#[test]
fn fit_is_deterministic() {
    let data = synthetic(0.0, 0.02, 15, 5);
    let opts = FitOptions { seed: 9, ..FitOptions::default() };
    let a = fit_collapse(&data, (0.4, 1.0, 0.0), ZetaMode::Free, &opts).unwrap();
    let b = fit_collapse(&data, (0.4, 1.0, 0.0), ZetaMode::Free, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fit_rejects_initial_point_outside_bounds() {
    let data = synthetic(0.0, 0.01, 10, 1);
    for init in [(1.5, 1.0, 0.0), (0.5, 0.1, 0.0), (0.5, 1.0, 9.0)] {
        let r = fit_collapse(&data, init, ZetaMode::Free, &FitOptions::default());
        assert!(matches!(r, Err(AnalysisError::InvalidArgument(_))), "{init:?}");
    }
}

#[test]
fn iteration_cap_yields_failure_with_best_point() {
    let data = synthetic(0.0, 0.01, 10, 1);
    let opts = FitOptions { max_iter: 3, restarts: 0, ..FitOptions::default() };
    match fit_collapse(&data, (0.4, 1.0, 0.0), ZetaMode::Free, &opts) {
        Err(AnalysisError::FitFailure { best }) => assert!(best.quality.is_finite()),
        other => panic!("expected a fit failure, got {other:?}"),
    }
}

#[test]
fn common_scale_leaves_the_fit_unchanged() {
    let data = synthetic(0.0, 0.01, 15, 2);
    let scaled = data.scaled_values(3.7);
    let q = collapse_quality(&data, 0.48, 1.3, 0.0).unwrap();
    let qs = collapse_quality(&scaled, 0.48, 1.3, 0.0).unwrap();
    assert!((q - qs).abs() <= 1e-9 * q, "{q} vs {qs}");
    let opts = FitOptions::default();
    let a = fit_collapse(&data, (0.45, 1.2, 0.0), ZetaMode::Fixed(0.0), &opts).unwrap();
    let b = fit_collapse(&scaled, (0.45, 1.2, 0.0), ZetaMode::Fixed(0.0), &opts).unwrap();
    assert!((a.p_c - b.p_c).abs() < 1e-4 && (a.nu - b.nu).abs() < 1e-3, "{a:?} vs {b:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quality_ignores_size_order(
        seed in any::<u64>(),
        order in Just((0..SIZES.len()).collect::<Vec<_>>()).prop_shuffle(),
        p_c in 0.4f64..0.6,
        nu in 0.8f64..3.0,
        zeta in -0.5f64..0.5,
    ) {
        let data = synthetic(0.0, 0.02, 9, seed);
        let shuffled: Vec<FssSeries> = order.iter().map(|&i| data.series()[i].clone()).collect();
        let other = FssInput::new(shuffled).unwrap();
        prop_assert_eq!(collapse_quality(&data, p_c, nu, zeta), collapse_quality(&other, p_c, nu, zeta));
    }
}

/// Per repetition the bootstrap is checked against plug-in moments of its
/// own sample: the resample variance has mean `m2` and spread
/// `sqrt((m4 - m2^2) / n)`. The Gaussian population values are checked on
/// the average over repetitions, since a single 500-sample draw already
/// scatters by about 6% in variance and more in kurtosis.
#[test]
fn bootstrap_variance_matches_gaussian_theory() {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let expected_err = (2.0f64 / 499.0).sqrt();
    let reps = 20;
    let (mut var_sum, mut err_sum) = (0.0, 0.0);
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + rep);
        let samples: Vec<f64> = (0..500).map(|_| normal.sample(&mut rng)).collect();
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let m2 = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let m4 = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        let v = bootstrap_variance(&samples, 1000, &mut rng).unwrap();
        assert!((v.variance - m2).abs() <= 0.02 * m2, "rep {rep}: {} vs {m2}", v.variance);
        let plug_in = ((m4 - m2 * m2) / n).sqrt();
        assert!((v.stderr - plug_in).abs() <= 0.1 * plug_in, "rep {rep}: {} vs {plug_in}", v.stderr);
        var_sum += v.variance;
        err_sum += v.stderr;
    }
    let (var_avg, err_avg) = (var_sum / reps as f64, err_sum / reps as f64);
    assert!((var_avg - 1.0).abs() <= 0.15, "mean variance {var_avg}");
    assert!((err_avg - expected_err).abs() <= 0.15 * expected_err, "mean stderr {err_avg}");
}

#[test]
fn sem_error_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut rng)).collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let e = sem_variance_error(&samples).unwrap();
    assert!((e - 0.5 * sd / n.sqrt()).abs() <= 1e-15);
    assert!((e - 0.5 / 500f64.sqrt()).abs() < 0.1 * 0.5 / 500f64.sqrt());
}

/// Per-trajectory samples whose mean follows the synthetic master curve.
fn synthetic_cells(seed: u64, n_traj: usize) -> (FssInput, Vec<CellSamples>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let mut cells = Vec::new();
    let mut series = Vec::new();
    for &l in &SIZES {
        let mut points = Vec::new();
        for i in 0..11 {
            let p = 0.4 + 0.02 * i as f64;
            let exact = master((p - P_C) * l.powf(1.0 / NU));
            let samples: Vec<f64> = (0..n_traj).map(|_| exact + noise.sample(&mut rng)).collect();
            let n = n_traj as f64;
            let mean = samples.iter().sum::<f64>() / n;
            let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            points.push(FssPoint { p, value: mean, stderr: sd / n.sqrt() });
            cells.push(CellSamples { size: l, p, samples });
        }
        series.push(FssSeries { size: l, points });
    }
    (FssInput::new(series).unwrap(), cells)
}

#[test]
fn bootstrap_fss_covers_the_truth() {
    let (base, cells) = synthetic_cells(21, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let b = bootstrap_fss(
        &base,
        &cells,
        Statistic::Mean,
        (0.48, 1.3, 0.0),
        ZetaMode::Fixed(0.0),
        &FitOptions::default(),
        40,
        &mut rng,
    )
    .unwrap();
    assert!(!b.degenerate);
    assert_eq!(b.n_success + b.n_failed, 40);
    assert!(b.result.p_c_err > 0.0);
    assert!((b.result.p_c - P_C).abs() <= 2.0 * b.result.p_c_err + 1e-3, "{:?}", b.result);
    assert!((b.result.nu - NU).abs() <= 2.0 * b.result.nu_err + 0.05, "{:?}", b.result);
}

#[test]
fn single_pseudo_ensemble_is_degenerate() {
    let (base, cells) = synthetic_cells(22, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = bootstrap_fss(
        &base,
        &cells,
        Statistic::Mean,
        (0.48, 1.3, 0.0),
        ZetaMode::Fixed(0.0),
        &FitOptions::default(),
        1,
        &mut rng,
    )
    .unwrap();
    assert!(b.degenerate);
    assert_eq!((b.result.p_c_err, b.result.nu_err, b.result.zeta_err), (0.0, 0.0, 0.0));
}

#[test]
fn bootstrap_fss_needs_every_cell() {
    let (base, mut cells) = synthetic_cells(23, 10);
    cells.pop();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let r = bootstrap_fss(
        &base,
        &cells,
        Statistic::Mean,
        (0.48, 1.3, 0.0),
        ZetaMode::Fixed(0.0),
        &FitOptions::default(),
        5,
        &mut rng,
    );
    assert!(matches!(r, Err(AnalysisError::InvalidInput(_))));
}

//! Bootstrap and SEM error estimates.

use rand::Rng;

use super::collapse::{FssInput, FssPoint, FssSeries};
use super::fit::{fit_collapse, FitOptions, FssResult, ZetaMode};
use super::AnalysisError;

pub const MIN_BOOT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    /// Mean of the resample variances.
    pub variance: f64,
    /// Standard deviation of the resample variances.
    pub stderr: f64,
}

fn unbiased_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

fn mean_and_sd(xs: &[f64]) -> (f64, f64) {
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let sd = if xs.len() > 1 { unbiased_variance(xs).sqrt() } else { 0.0 };
    (mean, sd)
}

fn need_two(n: usize) -> Result<(), AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::InsufficientData { needed: 2, got: n });
    }
    Ok(())
}

fn resample<R: Rng + ?Sized>(samples: &[f64], buf: &mut Vec<f64>, rng: &mut R) {
    buf.clear();
    buf.extend((0..samples.len()).map(|_| samples[rng.gen_range(0..samples.len())]));
}

/// Variance of `samples` and its error from `n_boot` resamples drawn
/// with replacement.
pub fn bootstrap_variance<R: Rng + ?Sized>(
    samples: &[f64],
    n_boot: usize,
    rng: &mut R,
) -> Result<VarianceEstimate, AnalysisError> {
    need_two(samples.len())?;
    if n_boot < MIN_BOOT {
        return Err(AnalysisError::InvalidArgument(format!("n_boot must be at least {MIN_BOOT}, got {n_boot}")));
    }
    let mut buf = Vec::with_capacity(samples.len());
    let vars: Vec<f64> = (0..n_boot)
        .map(|_| {
            resample(samples, &mut buf, rng);
            unbiased_variance(&buf)
        })
        .collect();
    let (variance, stderr) = mean_and_sd(&vars);
    Ok(VarianceEstimate { variance, stderr })
}

/// Half the standard error of the mean, used as a cheap error bar for a
/// variance.
pub fn sem_variance_error(samples: &[f64]) -> Result<f64, AnalysisError> {
    need_two(samples.len())?;
    let n = samples.len() as f64;
    Ok(0.5 * unbiased_variance(samples).sqrt() / n.sqrt())
}

/// Per-trajectory samples of one `(size, p)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSamples {
    pub size: f64,
    pub p: f64,
    pub samples: Vec<f64>,
}

/// Cell statistic that is collapsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    Mean,
    Variance,
}

impl Statistic {
    fn eval(self, xs: &[f64]) -> f64 {
        match self {
            Statistic::Mean => xs.iter().sum::<f64>() / xs.len() as f64,
            Statistic::Variance => unbiased_variance(xs),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapFss {
    /// Means over successful pseudo-ensemble fits, with their standard
    /// deviations as errors.
    pub result: FssResult,
    pub n_success: usize,
    pub n_failed: usize,
    /// Set when fewer than two fits succeeded, so the errors are 0.
    pub degenerate: bool,
}

/// Refits the collapse on `n_boot` pseudo-ensembles.
///
/// Each pseudo-ensemble resamples every cell's trajectories with
/// replacement and recomputes `statistic`; the errors of `base` are kept
/// as the fit weights. Fits start from `init`. Failed fits are dropped;
/// more than 20% failures is an error.
#[allow(clippy::too_many_arguments)]
pub fn bootstrap_fss<R: Rng + ?Sized>(
    base: &FssInput,
    cells: &[CellSamples],
    statistic: Statistic,
    init: (f64, f64, f64),
    mode: ZetaMode,
    fit: &FitOptions,
    n_boot: usize,
    rng: &mut R,
) -> Result<BootstrapFss, AnalysisError> {
    if n_boot == 0 {
        return Err(AnalysisError::InvalidArgument("n_boot must be positive".into()));
    }
    // Cell samples in the order of the base points.
    let mut lookup: Vec<Vec<&[f64]>> = Vec::new();
    for s in base.series() {
        let mut row = Vec::with_capacity(s.points.len());
        for pt in &s.points {
            let cell = cells
                .iter()
                .find(|c| c.size == s.size && (c.p - pt.p).abs() <= 1e-12)
                .ok_or_else(|| AnalysisError::InvalidInput(format!("no samples for size {}, p = {}", s.size, pt.p)))?;
            need_two(cell.samples.len())?;
            row.push(cell.samples.as_slice());
        }
        lookup.push(row);
    }
    let opts = FitOptions { profile_errors: false, ..fit.clone() };
    let mut fits = Vec::with_capacity(n_boot);
    let mut failed = 0;
    let mut buf = Vec::new();
    for _ in 0..n_boot {
        let series = base
            .series()
            .iter()
            .zip(&lookup)
            .map(|(s, row)| FssSeries {
                size: s.size,
                points: s
                    .points
                    .iter()
                    .zip(row)
                    .map(|(pt, samples)| {
                        resample(samples, &mut buf, rng);
                        FssPoint { p: pt.p, value: statistic.eval(&buf), stderr: pt.stderr }
                    })
                    .collect(),
            })
            .collect();
        let input = FssInput::new(series)?;
        match fit_collapse(&input, init, mode, &opts) {
            Ok(r) => fits.push(r),
            Err(_) => failed += 1,
        }
    }
    if fits.is_empty() || failed * 5 > n_boot {
        return Err(AnalysisError::TooManyFailures { failed, total: n_boot });
    }
    let column = |f: fn(&FssResult) -> f64| mean_and_sd(&fits.iter().map(f).collect::<Vec<_>>());
    let (p_c, p_c_err) = column(|r| r.p_c);
    let (nu, nu_err) = column(|r| r.nu);
    let (zeta, zeta_err) = column(|r| r.zeta);
    let (quality, _) = column(|r| r.quality);
    Ok(BootstrapFss {
        result: FssResult { p_c, nu, zeta, p_c_err, nu_err, zeta_err, quality },
        n_success: fits.len(),
        n_failed: failed,
        degenerate: fits.len() < 2,
    })
}

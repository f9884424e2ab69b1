//! Collapse fitting by bounded Nelder-Mead with restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::collapse::{collapse_quality, collapse_terms, FssInput};
use super::simplex::{minimize, Settings};
use super::AnalysisError;

pub const P_C_BOUNDS: (f64, f64) = (0.0, 1.0);
pub const NU_BOUNDS: (f64, f64) = (0.3, 5.0);
pub const ZETA_BOUNDS: (f64, f64) = (-2.0, 4.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZetaMode {
    Free,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FssResult {
    pub p_c: f64,
    pub nu: f64,
    pub zeta: f64,
    pub p_c_err: f64,
    pub nu_err: f64,
    /// Zero when `zeta` was held fixed.
    pub zeta_err: f64,
    /// Collapse quality at the optimum.
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Extra simplex runs started from random perturbations of the best
    /// point found so far.
    pub restarts: usize,
    pub seed: u64,
    /// Compute profile errors; otherwise errors are left at zero.
    pub profile_errors: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iter: 2000, restarts: 3, seed: 0, profile_errors: true }
    }
}

const STEP: [f64; 3] = [0.05, 0.3, 0.3];
// Restart perturbations, as a fraction of each bound's width.
const JITTER: f64 = 0.05;

fn bounds(mode: ZetaMode) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![P_C_BOUNDS.0, NU_BOUNDS.0];
    let mut hi = vec![P_C_BOUNDS.1, NU_BOUNDS.1];
    if mode == ZetaMode::Free {
        lo.push(ZETA_BOUNDS.0);
        hi.push(ZETA_BOUNDS.1);
    }
    (lo, hi)
}

fn unpack(theta: &[f64], mode: ZetaMode) -> (f64, f64, f64) {
    match mode {
        ZetaMode::Free => (theta[0], theta[1], theta[2]),
        ZetaMode::Fixed(z) => (theta[0], theta[1], z),
    }
}

/// Fits `(p_c, nu, zeta)` by minimizing the collapse quality.
///
/// Profile errors are the excursions along each axis, other parameters
/// held at the optimum, at which `n * S` (a chi-square over the `n`
/// contributing points) rises by 1; the two sides are averaged.
pub fn fit_collapse(
    data: &FssInput,
    init: (f64, f64, f64),
    mode: ZetaMode,
    opts: &FitOptions,
) -> Result<FssResult, AnalysisError> {
    let (lo, hi) = bounds(mode);
    let mut x0 = vec![init.0, init.1];
    if mode == ZetaMode::Free {
        x0.push(init.2);
    }
    if let ZetaMode::Fixed(z) = mode {
        if !z.is_finite() {
            return Err(AnalysisError::InvalidArgument(format!("fixed zeta {z} is not finite")));
        }
    }
    for i in 0..x0.len() {
        if !(x0[i] >= lo[i] && x0[i] <= hi[i]) {
            return Err(AnalysisError::InvalidArgument(format!(
                "initial value {} outside [{}, {}]",
                x0[i], lo[i], hi[i]
            )));
        }
    }
    let objective = |theta: &[f64]| {
        let (p_c, nu, zeta) = unpack(theta, mode);
        collapse_quality(data, p_c, nu, zeta).unwrap_or(f64::INFINITY)
    };
    let settings = Settings { max_iter: opts.max_iter, f_tol: 1e-10, x_tol: 1e-7 };
    let step = &STEP[..x0.len()];

    let mut best = minimize(objective, &x0, step, &lo, &hi, &settings);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.restarts {
        let start: Vec<f64> = (0..x0.len())
            .map(|i| {
                let w = JITTER * (hi[i] - lo[i]);
                (best.x[i] + rng.gen_range(-w..=w)).clamp(lo[i], hi[i])
            })
            .collect();
        let run = minimize(objective, &start, step, &lo, &hi, &settings);
        if run.f < best.f || (run.f == best.f && run.converged && !best.converged) {
            best = run;
        }
    }
    if !best.f.is_finite() {
        return Err(AnalysisError::NoOverlap);
    }

    let (p_c, nu, zeta) = unpack(&best.x, mode);
    let mut result = FssResult { p_c, nu, zeta, p_c_err: 0.0, nu_err: 0.0, zeta_err: 0.0, quality: best.f };
    if !best.converged {
        return Err(AnalysisError::FitFailure { best: Box::new(result) });
    }
    if opts.profile_errors {
        let n = collapse_terms(data, p_c, nu, zeta)?.len() as f64;
        let errs: Vec<f64> =
            (0..best.x.len()).map(|k| profile_error(&objective, &best.x, best.f, n, k, &lo, &hi)).collect();
        result.p_c_err = errs[0];
        result.nu_err = errs[1];
        if mode == ZetaMode::Free {
            result.zeta_err = errs[2];
        }
    }
    Ok(result)
}

fn profile_error<F: Fn(&[f64]) -> f64>(
    f: &F,
    theta: &[f64],
    f_min: f64,
    n: f64,
    k: usize,
    lo: &[f64],
    hi: &[f64],
) -> f64 {
    let rise = |delta: f64| {
        let mut t = theta.to_vec();
        t[k] += delta;
        n * (f(&t) - f_min)
    };
    let side = |dir: f64| {
        let room = if dir > 0.0 { hi[k] - theta[k] } else { theta[k] - lo[k] };
        if room <= 0.0 {
            return None;
        }
        let mut inner = 0.0;
        let mut outer = (1e-4 * (hi[k] - lo[k])).min(room);
        loop {
            if rise(dir * outer) >= 1.0 {
                break;
            }
            if outer >= room {
                return Some(room);
            }
            inner = outer;
            outer = (2.0 * outer).min(room);
        }
        for _ in 0..50 {
            let mid = 0.5 * (inner + outer);
            if rise(dir * mid) >= 1.0 {
                outer = mid;
            } else {
                inner = mid;
            }
        }
        Some(0.5 * (inner + outer))
    };
    match (side(1.0), side(-1.0)) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0.0,
    }
}

//! Subcommand implementations, callable without the argument parser.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use tricode_core::analysis::{bootstrap_fss, fit_collapse, FitOptions, ZetaMode, NU_BOUNDS, P_C_BOUNDS};
use tricode_core::rng::{derive_seed, stream};

use crate::aggregate::{read_aggregate, read_trajectories, write_rows, AggregateRow, TrajectoryRow};
use crate::fss::{cell_samples, collapse_rows, fss_input, initial_guess, Central, FssReport, Observable};
use crate::spec::{Cell, LoadedSpec};
use crate::store::{build_circuit, run_cells, write_aggregate, Store};
use crate::ConfigError;

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const PHASE_FILE: &str = "phase_diagram.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const WORKERS_ENV: &str = "TRICODE_WORKERS";
/// Profile errors below this are reported as unreliable.
const PROFILE_ERR_FLOOR: f64 = 1e-6;
/// Fraction of a bound interval treated as "at the bound".
const BOUND_MARGIN: f64 = 1e-3;

/// Overrides shared by the commands that run circuits.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub traj: Option<usize>,
}

impl RunOptions {
    fn load(&self) -> Result<(LoadedSpec, PathBuf)> {
        let mut loaded = LoadedSpec::load(&self.config)?;
        if let Some(s) = self.seed {
            loaded.spec.seed = s;
        }
        if let Some(t) = self.traj {
            loaded.spec.trajectory_count = t;
        }
        let out = self
            .out
            .clone()
            .or_else(|| loaded.spec.out.clone())
            .ok_or_else(|| ConfigError::new("no output directory; pass --out or set \"out\"".into()))?;
        Ok((loaded, out))
    }

    /// Flag, then `TRICODE_WORKERS`, then the spec, then all cores.
    fn workers(&self, spec: &LoadedSpec) -> Result<usize> {
        let from_env = match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| ConfigError::new(format!("{WORKERS_ENV}={v:?} is not a worker count")))?,
            ),
            Err(_) => None,
        };
        let n = self
            .workers
            .or(from_env)
            .or(spec.spec.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if n == 0 {
            return Err(ConfigError::new("worker count must be positive".into()).into());
        }
        Ok(n)
    }
}

/// Line sweep. Returns the aggregate table path.
pub fn run(opts: &RunOptions) -> Result<PathBuf> {
    let (spec, out) = opts.load()?;
    let cells = spec.spec.line_cells()?;
    let workers = opts.workers(&spec)?;
    let store = Store::open(&out, &spec)?;
    let rows = run_cells(&store, &spec, &cells, workers)?;
    let path = out.join(AGGREGATE_FILE);
    write_aggregate(&path, &rows)?;
    info!("wrote {}", path.display());
    Ok(path)
}

#[derive(Debug, Clone, Serialize)]
struct PhaseRow {
    l_x: usize,
    l_y: usize,
    p_x: f64,
    p_z: f64,
    p_g: f64,
    observable: &'static str,
    value: f64,
    error: f64,
}

fn phase_rows(a: &AggregateRow) -> Vec<PhaseRow> {
    let entries = [
        ("tee_mean", a.tee_mean, (a.tee_var / a.n_traj as f64).sqrt()),
        ("tee_var", a.tee_var, a.tee_var_err_boot),
        ("chi_z_mean", a.chi_z_mean, a.chi_z_sem),
        ("chi_x_mean", a.chi_x_mean, a.chi_x_sem),
        ("wloop_mean", a.wloop_mean, a.wloop_sem),
        ("tloop_mean", a.tloop_mean, a.tloop_sem),
        ("tloop_var", a.tloop_var, 0.5 * a.tloop_sem),
    ];
    entries
        .into_iter()
        .map(|(observable, value, error)| PhaseRow {
            l_x: a.l_x,
            l_y: a.l_y,
            p_x: a.p_x,
            p_z: a.p_z,
            p_g: a.p_g,
            observable,
            value,
            error,
        })
        .collect()
}

/// Simplex scan. Writes the aggregate table and a long-format table with
/// one row per (cell, observable). Returns the long table's path.
pub fn phase_diagram(opts: &RunOptions) -> Result<PathBuf> {
    let (spec, out) = opts.load()?;
    let cells = spec.spec.phase_cells()?;
    let workers = opts.workers(&spec)?;
    let store = Store::open(&out, &spec)?;
    let rows = run_cells(&store, &spec, &cells, workers)?;
    write_aggregate(&out.join(AGGREGATE_FILE), &rows)?;
    let long: Vec<PhaseRow> = rows.iter().flat_map(phase_rows).collect();
    let mut buf = Vec::new();
    write_rows(&mut buf, &long)?;
    let path = out.join(PHASE_FILE);
    fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
    info!("wrote {}", path.display());
    Ok(path)
}

#[derive(Debug, Clone, Copy, Serialize)]
struct TraceRow {
    trajectory_id: u64,
    step: usize,
    s_t: f64,
    chi_z: f64,
    chi_x: f64,
    w_loop: f64,
    t_loop: f64,
}

/// Time series of one cell, one row per (trajectory, snapshot). Snapshots
/// are taken every `n_record` steps (default N) from step 0 up to `steps`,
/// by default the burn-in plus the recording window.
pub fn trace(opts: &RunOptions, steps: Option<usize>) -> Result<PathBuf> {
    let (spec, out) = opts.load()?;
    let cells = spec.spec.line_cells()?;
    let [cell] = cells.as_slice() else {
        return Err(ConfigError::new(format!(
            "trace needs exactly one size and grid point, got {} cells",
            cells.len()
        ))
        .into());
    };
    let workers = opts.workers(&spec)?;
    let circuit = build_circuit(&spec, cell)?;
    let cfg = circuit.config();
    let total = steps.unwrap_or(cfg.burn_in_steps() + cfg.n_snapshots.saturating_sub(1) * cfg.record_interval());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let traces = pool.install(|| {
        (0..spec.spec.trajectory_count as u64)
            .into_par_iter()
            .map(|id| circuit.trace(id, total).map(|t| (id, t)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let rows: Vec<TraceRow> = traces
        .iter()
        .flat_map(|(id, points)| {
            points.iter().map(move |pt| TraceRow {
                trajectory_id: *id,
                step: pt.step,
                s_t: pt.record.s_t,
                chi_z: pt.record.chi_z,
                chi_x: pt.record.chi_x,
                w_loop: pt.record.w_loop,
                t_loop: pt.record.t_loop,
            })
        })
        .collect();
    fs::create_dir_all(&out)?;
    let mut buf = Vec::new();
    write_rows(&mut buf, &rows)?;
    let path = out.join(TRACE_FILE);
    fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
    info!("wrote {}", path.display());
    Ok(path)
}

#[derive(Debug, Clone)]
pub struct FssOptions {
    pub input: PathBuf,
    pub observable: Observable,
    /// Defaults to the observable's usual mode.
    pub zeta: Option<ZetaMode>,
    pub init: Option<(f64, f64, f64)>,
    /// Defaults to the input's directory.
    pub out: Option<PathBuf>,
    /// Bootstrap resamples; requires the trajectory files of a results
    /// directory next to the input.
    pub n_boot: Option<usize>,
    pub seed: u64,
}

pub fn report_path(dir: &Path, obs: Observable) -> PathBuf {
    dir.join(format!("fss_{}.json", obs.name()))
}

pub fn collapse_path(dir: &Path, obs: Observable) -> PathBuf {
    dir.join(format!("collapse_{}.csv", obs.name()))
}

fn load_cell_trajectories(dir: &Path, rows: &[AggregateRow]) -> Result<Vec<(Cell, Vec<TrajectoryRow>)>> {
    rows.iter()
        .map(|r| {
            let cell = Cell { l_x: r.l_x, l_y: r.l_y, p_x: r.p_x, p_z: r.p_z, p_g: r.p_g };
            let path = dir.join("cells").join(cell.key()).join("trajectories.csv");
            let file =
                File::open(&path).map_err(|e| ConfigError::new(format!("bootstrap needs {}: {e}", path.display())))?;
            let t = read_trajectories(file).with_context(|| format!("reading {}", path.display()))?;
            Ok((cell, t))
        })
        .collect()
}

/// Collapse fit of one aggregate column; bootstrap errors when `n_boot` is
/// set. Writes the JSON report and the scaled points.
pub fn fss(opts: &FssOptions) -> Result<FssReport> {
    let file =
        File::open(&opts.input).map_err(|e| ConfigError::new(format!("cannot open {}: {e}", opts.input.display())))?;
    let rows = read_aggregate(file).map_err(|e| ConfigError::new(format!("{}: {e}", opts.input.display())))?;
    let obs = opts.observable;
    let mode = opts.zeta.unwrap_or_else(|| obs.default_zeta());
    let (data, scan) = fss_input(&rows, obs)?;
    let init = opts.init.unwrap_or_else(|| initial_guess(&data, obs, mode));
    let fit_opts = FitOptions { seed: opts.seed, ..FitOptions::default() };
    let central = fit_collapse(&data, init, mode, &fit_opts)?;
    let dir = opts.input.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);

    let mut report = match opts.n_boot {
        None => {
            let mut report = FssReport::new(obs, scan, mode, &central, "profile");
            let mut tiny = vec![("p_c", central.p_c_err), ("nu", central.nu_err)];
            if mode == ZetaMode::Free {
                tiny.push(("zeta", central.zeta_err));
            }
            for (name, err) in tiny {
                if err < PROFILE_ERR_FLOOR {
                    report.warnings.push(format!(
                        "profile error of {name} is {err:.1e}: the optimum sits on a jump of the quality; use bootstrap errors"
                    ));
                }
            }
            report
        }
        Some(n_boot) => {
            let cells = load_cell_trajectories(&dir, &rows)?;
            let (samples, stat) = cell_samples(&cells, scan, obs);
            let mut rng = stream(derive_seed(opts.seed, &[obs as u64]), 0);
            let start = (central.p_c, central.nu, central.zeta);
            let b = bootstrap_fss(&data, &samples, stat, start, mode, &fit_opts, n_boot, &mut rng)?;
            let mut report = FssReport::new(obs, scan, mode, &b.result, "bootstrap");
            report.n_boot = Some(n_boot);
            report.n_failed = Some(b.n_failed);
            report.central = Some(Central::from(&central));
            if b.degenerate {
                report.warnings.push("fewer than two bootstrap fits; errors are zero".into());
            }
            if b.n_failed > 0 {
                warn!("{} of {n_boot} bootstrap fits failed", b.n_failed);
            }
            report
        }
    };
    if let ZetaMode::Fixed(_) = mode {
        report.zeta_err = 0.0;
    }
    for (name, v, (lo, hi)) in [("p_c", central.p_c, P_C_BOUNDS), ("nu", central.nu, NU_BOUNDS)] {
        if v - lo < BOUND_MARGIN * (hi - lo) || hi - v < BOUND_MARGIN * (hi - lo) {
            report.warnings.push(format!("{name} = {v} is at its search bound [{lo}, {hi}]"));
        }
    }

    let out = opts.out.clone().unwrap_or(dir);
    fs::create_dir_all(&out)?;
    let json = serde_json::to_string_pretty(&report)?;
    fs::write(report_path(&out, obs), format!("{json}\n"))?;
    let mut buf = Vec::new();
    write_rows(&mut buf, &collapse_rows(&data, &central)?)?;
    fs::write(collapse_path(&out, obs), buf)?;
    Ok(report)
}

/// Parses `p_c,nu,zeta` for `--init`.
pub fn parse_init(s: &str) -> Result<(f64, f64, f64), ConfigError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| ConfigError::new(format!("--init expects p_c,nu,zeta; got {s:?}")))?;
    match v.as_slice() {
        [p, n, z] => Ok((*p, *n, *z)),
        [p, n] => Ok((*p, *n, 0.0)),
        _ => Err(ConfigError::new(format!("--init expects p_c,nu,zeta; got {s:?}"))),
    }
}

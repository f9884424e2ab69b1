//! Per-trajectory and aggregate tables.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use tricode_core::analysis::{bootstrap_variance, AnalysisError};
use tricode_core::observables::{ensemble_stats, ObservableRecord};
use tricode_core::rng::{derive_seed, stream};

use crate::spec::Cell;

/// Bootstrap resamples behind `tee_var_err_boot`.
pub const AGGREGATE_N_BOOT: usize = 1000;

/// Snapshot-averaged observables of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub trajectory_id: u64,
    pub s_t: f64,
    pub chi_z: f64,
    pub chi_x: f64,
    pub w_loop: f64,
    pub t_loop: f64,
}

impl TrajectoryRow {
    pub fn new(trajectory_id: u64, r: &ObservableRecord) -> Self {
        Self { trajectory_id, s_t: r.s_t, chi_z: r.chi_z, chi_x: r.chi_x, w_loop: r.w_loop, t_loop: r.t_loop }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub l_x: usize,
    pub l_y: usize,
    pub p_x: f64,
    pub p_z: f64,
    pub p_g: f64,
    pub n_traj: usize,
    pub tee_mean: f64,
    pub tee_var: f64,
    pub tee_var_err_boot: f64,
    pub chi_z_mean: f64,
    pub chi_z_sem: f64,
    pub chi_x_mean: f64,
    pub chi_x_sem: f64,
    pub wloop_mean: f64,
    pub wloop_sem: f64,
    pub tloop_mean: f64,
    pub tloop_sem: f64,
    pub tloop_var: f64,
}

pub const AGGREGATE_COLUMNS: [&str; 18] = [
    "l_x",
    "l_y",
    "p_x",
    "p_z",
    "p_g",
    "n_traj",
    "tee_mean",
    "tee_var",
    "tee_var_err_boot",
    "chi_z_mean",
    "chi_z_sem",
    "chi_x_mean",
    "chi_x_sem",
    "wloop_mean",
    "wloop_sem",
    "tloop_mean",
    "tloop_sem",
    "tloop_var",
];

/// Ensemble statistics of one cell. `seed` keys the bootstrap stream.
pub fn aggregate(cell: &Cell, rows: &[TrajectoryRow], seed: u64) -> Result<AggregateRow, AnalysisError> {
    let col = |f: fn(&TrajectoryRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let stats = |v: &[f64]| ensemble_stats(v).map_err(|_| AnalysisError::InsufficientData { needed: 2, got: v.len() });
    let tee = col(|r| r.s_t);
    let tee_s = stats(&tee)?;
    let chi_z = stats(&col(|r| r.chi_z))?;
    let chi_x = stats(&col(|r| r.chi_x))?;
    let w = stats(&col(|r| r.w_loop))?;
    let t = stats(&col(|r| r.t_loop))?;
    let mut rng = stream(derive_seed(seed, &cell.seed_parts()), u64::MAX);
    let boot = bootstrap_variance(&tee, AGGREGATE_N_BOOT, &mut rng)?;
    Ok(AggregateRow {
        l_x: cell.l_x,
        l_y: cell.l_y,
        p_x: cell.p_x,
        p_z: cell.p_z,
        p_g: cell.p_g,
        n_traj: rows.len(),
        tee_mean: tee_s.mean,
        tee_var: tee_s.variance,
        tee_var_err_boot: boot.stderr,
        chi_z_mean: chi_z.mean,
        chi_z_sem: chi_z.sem,
        chi_x_mean: chi_x.mean,
        chi_x_sem: chi_x.sem,
        wloop_mean: w.mean,
        wloop_sem: w.sem,
        tloop_mean: t.mean,
        tloop_sem: t.sem,
        tloop_var: t.variance,
    })
}

pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an aggregate table, requiring the exact column set.
pub fn read_aggregate<R: Read>(input: R) -> Result<Vec<AggregateRow>, csv::Error> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(AGGREGATE_COLUMNS.iter().copied()) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("aggregate header must be {}", AGGREGATE_COLUMNS.join(",")),
        )));
    }
    r.deserialize().collect()
}

pub fn read_trajectories<R: Read>(input: R) -> Result<Vec<TrajectoryRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

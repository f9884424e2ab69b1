//! Results directory: manifest, per-cell trajectory files, aggregates.
//!
//! Layout under the root:
//!
//! ```text
//! manifest.json
//! cells/<cell key>/trajectories.partial.csv   while a cell is running
//! cells/<cell key>/trajectories.csv           sorted by trajectory id
//! cells/<cell key>/DONE
//! ```
//!
//! A cell with a `DONE` marker is never recomputed. Trajectories already in
//! a partial file are skipped on resume.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use anyhow::{anyhow, Context, Result};
use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use tricode_core::circuit::Circuit;
use tricode_core::rng::derive_seed;
use tricode_core::Lattice;

use crate::aggregate::{aggregate, read_trajectories, write_rows, AggregateRow, TrajectoryRow};
use crate::spec::{Cell, ExperimentSpec, LoadedSpec};
use crate::{version, ConfigError};

pub const MANIFEST: &str = "manifest.json";
const PARTIAL: &str = "trajectories.partial.csv";
const FINAL: &str = "trajectories.csv";
const DONE: &str = "DONE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec_hash: String,
    pub seed: u64,
    pub version: String,
    pub spec: ExperimentSpec,
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    /// Opens `root` for `spec`, writing the manifest on first use. A
    /// directory holding a different experiment is a config error.
    pub fn open(root: &Path, spec: &LoadedSpec) -> Result<Self> {
        fs::create_dir_all(root.join("cells")).with_context(|| format!("creating {}", root.display()))?;
        let path = root.join(MANIFEST);
        let hash = spec.hash();
        if path.exists() {
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let existing: Manifest = serde_json::from_str(&text)
                .map_err(|e| ConfigError::new(format!("{} is not a manifest: {e}", path.display())))?;
            if existing.spec_hash != hash {
                return Err(ConfigError::new(format!(
                    "{} holds a different experiment (spec hash {}, expected {hash})",
                    root.display(),
                    existing.spec_hash
                ))
                .into());
            }
        } else {
            let manifest =
                Manifest { spec_hash: hash, seed: spec.spec.seed, version: version(), spec: spec.spec.clone() };
            write_atomic(&path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;
        }
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn cell_dir(&self, cell: &Cell) -> PathBuf {
        self.root.join("cells").join(cell.key())
    }

    pub fn is_done(&self, cell: &Cell) -> bool {
        self.cell_dir(cell).join(DONE).exists()
    }

    pub fn trajectories(&self, cell: &Cell) -> Result<Vec<TrajectoryRow>> {
        let path = self.cell_dir(cell).join(FINAL);
        let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        read_trajectories(file).with_context(|| format!("reading {}", path.display()))
    }

    /// Complete rows of an interrupted cell. A torn last line is ignored.
    fn partial(&self, cell: &Cell) -> Result<BTreeMap<u64, TrajectoryRow>> {
        let path = self.cell_dir(cell).join(PARTIAL);
        let mut rows = BTreeMap::new();
        if !path.exists() {
            return Ok(rows);
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        for line in text.split_inclusive('\n').filter(|l| l.ends_with('\n')) {
            if let Some(r) = parse_partial_line(line.trim_end()) {
                rows.entry(r.trajectory_id).or_insert(r);
            }
        }
        Ok(rows)
    }

    fn finish_cell(&self, cell: &Cell, rows: &BTreeMap<u64, TrajectoryRow>) -> Result<()> {
        let dir = self.cell_dir(cell);
        let sorted: Vec<TrajectoryRow> = rows.values().copied().collect();
        let mut buf = Vec::new();
        write_rows(&mut buf, &sorted)?;
        write_atomic(&dir.join(FINAL), &buf)?;
        write_atomic(&dir.join(DONE), b"")?;
        let partial = dir.join(PARTIAL);
        if partial.exists() {
            fs::remove_file(&partial)?;
        }
        Ok(())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

fn partial_line(r: &TrajectoryRow) -> String {
    format!("{},{},{},{},{},{}\n", r.trajectory_id, r.s_t, r.chi_z, r.chi_x, r.w_loop, r.t_loop)
}

fn parse_partial_line(line: &str) -> Option<TrajectoryRow> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 6 {
        return None;
    }
    let num = |i: usize| f[i].parse::<f64>().ok();
    Some(TrajectoryRow {
        trajectory_id: f[0].parse().ok()?,
        s_t: num(1)?,
        chi_z: num(2)?,
        chi_x: num(3)?,
        w_loop: num(4)?,
        t_loop: num(5)?,
    })
}

/// Seed keying the trajectory streams of `cell`.
pub fn cell_seed(master: u64, cell: &Cell) -> u64 {
    derive_seed(master, &cell.seed_parts())
}

pub fn build_circuit(spec: &LoadedSpec, cell: &Cell) -> Result<Circuit> {
    let lat = Lattice::new(cell.l_x, cell.l_y).map_err(|e| ConfigError::new(e.to_string()))?;
    let regions = spec.regions(&lat)?;
    let circuit = Circuit::new(spec.spec.circuit_config(cell), regions).map_err(|e| ConfigError::new(e.to_string()))?;
    Ok(circuit.with_stream_seed(cell_seed(spec.spec.seed, cell)))
}

/// Runs every missing trajectory of `cells` on `workers` threads and
/// returns the aggregate rows in `cells` order.
pub fn run_cells(store: &Store, spec: &LoadedSpec, cells: &[Cell], workers: usize) -> Result<Vec<AggregateRow>> {
    let n_traj = spec.spec.trajectory_count as u64;
    let mut circuits: HashMap<usize, Circuit> = HashMap::new();
    let mut collected: HashMap<usize, BTreeMap<u64, TrajectoryRow>> = HashMap::new();
    let mut jobs = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        if store.is_done(cell) {
            continue;
        }
        let have = store.partial(cell)?;
        // Validates regions and config before any work starts.
        circuits.insert(i, build_circuit(spec, cell)?);
        jobs.extend((0..n_traj).filter(|id| !have.contains_key(id)).map(|id| (i, id)));
        collected.insert(i, have);
    }
    info!("{} cells, {} pending trajectories", cells.len(), jobs.len());

    // Cells whose trajectories were all on disk already.
    for (&i, rows) in &collected {
        if rows.len() as u64 == n_traj {
            store.finish_cell(&cells[i], rows)?;
        }
    }

    if !jobs.is_empty() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
        let (tx, rx) = mpsc::channel();
        let mut first_error = None;
        std::thread::scope(|scope| -> Result<()> {
            let circuits = &circuits;
            let jobs = &jobs;
            scope.spawn(move || {
                pool.install(|| {
                    jobs.par_iter().for_each_with(tx, |tx, &(i, id)| {
                        let r = circuits[&i].run_trajectory(id).map(|t| TrajectoryRow::new(id, &t.mean));
                        // The receiver only goes away on a write error.
                        let _ = tx.send((i, r));
                    });
                });
            });
            // Single writer: appends to partial files, finishes full cells.
            let mut writers: HashMap<usize, BufWriter<File>> = HashMap::new();
            for (i, r) in rx {
                let row = match r {
                    Ok(row) => row,
                    Err(e) => {
                        first_error.get_or_insert(anyhow!(e));
                        continue;
                    }
                };
                let cell = &cells[i];
                let w = match writers.entry(i) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => {
                        let dir = store.cell_dir(cell);
                        fs::create_dir_all(&dir)?;
                        let f = OpenOptions::new().create(true).append(true).open(dir.join(PARTIAL))?;
                        e.insert(BufWriter::new(f))
                    }
                };
                w.write_all(partial_line(&row).as_bytes())?;
                w.flush()?;
                let rows = collected.get_mut(&i).expect("pending cell");
                rows.insert(row.trajectory_id, row);
                if rows.len() as u64 == n_traj {
                    writers.remove(&i);
                    store.finish_cell(cell, rows)?;
                    info!("finished {}", cell.key());
                }
            }
            Ok(())
        })?;
        if let Some(e) = first_error {
            return Err(e);
        }
    }

    cells
        .iter()
        .map(|cell| {
            let rows = store.trajectories(cell)?;
            Ok(aggregate(cell, &rows, cell_seed(spec.spec.seed, cell))?)
        })
        .collect()
}

pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    write_atomic(path, &buf)
}

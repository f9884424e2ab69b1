//! The measurement-only circuit.
//!
//! Each step measures one operator drawn from four classes with
//! probabilities `(p_x, p_z, p_g / 2, p_g / 2)`: single-edge `X_e`, single-edge
//! `Z_e`, star `A_s` and plaquette `B_p`. The location is uniform within the
//! class.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use thiserror::Error;

use crate::lattice::{Lattice, LatticeError, StringKind};
use crate::observables::{observe, ObservableError, ObservableRecord};
use crate::pauli::{PauliError, PauliOperator, Sign};
use crate::regions::KpRegions;
use crate::rng::{stream, TrajectoryRng};
use crate::tableau::{Basis, Tableau};

const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("invalid circuit configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialState {
    ProductX,
    ProductZ,
    ExactTc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitConfig {
    pub l_x: usize,
    pub l_y: usize,
    pub p_x: f64,
    pub p_z: f64,
    pub p_g: f64,
    pub initial: InitialState,
    /// Burn-in length in units of `N` measurements.
    pub burn_in_factor: f64,
    /// Measurements between snapshots; `None` means `N`.
    pub n_record: Option<usize>,
    pub n_snapshots: usize,
    pub seed: u64,
    pub trajectory_count: usize,
}

impl CircuitConfig {
    pub fn new(l_x: usize, l_y: usize, p_x: f64, p_z: f64, p_g: f64) -> Self {
        Self {
            l_x,
            l_y,
            p_x,
            p_z,
            p_g,
            initial: InitialState::ProductZ,
            burn_in_factor: 10.0,
            n_record: None,
            n_snapshots: 10,
            seed: 0,
            trajectory_count: 500,
        }
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let bad = |m: String| Err(CircuitError::Config(m));
        let probs = [self.p_x, self.p_z, self.p_g];
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return bad(format!("probabilities must be non-negative, got {probs:?}"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return bad(format!("p_x + p_z + p_g = {total}, expected 1"));
        }
        if !self.burn_in_factor.is_finite() || self.burn_in_factor < 0.0 {
            return bad(format!("burn_in_factor must be >= 0, got {}", self.burn_in_factor));
        }
        if self.n_record == Some(0) {
            return bad("n_record must be positive".into());
        }
        if self.n_snapshots == 0 {
            return bad("n_snapshots must be positive".into());
        }
        Lattice::new(self.l_x, self.l_y)?;
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        3 * self.l_x * self.l_y
    }

    pub fn burn_in_steps(&self) -> usize {
        (self.burn_in_factor * self.n_qubits() as f64).round() as usize
    }

    pub fn record_interval(&self) -> usize {
        self.n_record.unwrap_or_else(|| self.n_qubits())
    }
}

/// Every measurable operator of a lattice, built once and shared.
#[derive(Debug)]
pub struct OperatorCatalog {
    pub lattice: Lattice,
    pub x_edges: Vec<PauliOperator>,
    pub z_edges: Vec<PauliOperator>,
    pub stars: Vec<PauliOperator>,
    pub plaquettes: Vec<PauliOperator>,
}

impl OperatorCatalog {
    pub fn new(lattice: Lattice) -> Self {
        let n = lattice.n_edges();
        let single = |f: fn(usize, &[usize]) -> Result<PauliOperator, PauliError>| {
            (0..n).map(|e| f(n, &[e]).expect("edge in range")).collect::<Vec<_>>()
        };
        let x_edges = single(PauliOperator::x_type);
        let z_edges = single(PauliOperator::z_type);
        let stars = (0..lattice.n_vertices()).map(|s| lattice.star_operator(s).expect("vertex in range")).collect();
        let plaquettes =
            (0..lattice.n_triangles()).map(|p| lattice.plaquette_operator(p).expect("triangle in range")).collect();
        Self { lattice, x_edges, z_edges, stars, plaquettes }
    }
}

/// Operator class of one measurement step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementClass {
    XEdge,
    ZEdge,
    Star,
    Plaquette,
}

/// Draws the class and location of the next measurement.
pub fn sample_operator<'a, R: Rng + ?Sized>(
    catalog: &'a OperatorCatalog,
    cfg: &CircuitConfig,
    rng: &mut R,
) -> (MeasurementClass, &'a PauliOperator) {
    let weights = [
        (MeasurementClass::XEdge, cfg.p_x),
        (MeasurementClass::ZEdge, cfg.p_z),
        (MeasurementClass::Star, cfg.p_g / 2.0),
        (MeasurementClass::Plaquette, cfg.p_g / 2.0),
    ];
    let total: f64 = weights.iter().map(|w| w.1).sum();
    let mut u = rng.gen::<f64>() * total;
    let mut class = weights.iter().rev().find(|w| w.1 > 0.0).expect("positive weight").0;
    for &(c, w) in &weights {
        if w > 0.0 && u < w {
            class = c;
            break;
        }
        u -= w;
    }
    let pool = match class {
        MeasurementClass::XEdge => &catalog.x_edges,
        MeasurementClass::ZEdge => &catalog.z_edges,
        MeasurementClass::Star => &catalog.stars,
        MeasurementClass::Plaquette => &catalog.plaquettes,
    };
    (class, &pool[rng.gen_range(0..pool.len())])
}

/// One measurement step. Deterministic outcomes are not resolved since no
/// observable depends on their sign.
pub fn step<R: Rng + ?Sized>(
    t: &mut Tableau,
    catalog: &OperatorCatalog,
    cfg: &CircuitConfig,
    rng: &mut R,
) -> Result<MeasurementClass, CircuitError> {
    let (class, op) = sample_operator(catalog, cfg, rng);
    t.project(op, rng)?;
    Ok(class)
}

/// Exact toric-code state on `lat`: `+1` eigenstate of every star, every
/// plaquette, `W^c(0)` and `T^c(0)`.
///
/// One star and one plaquette are dependent on the others, so the generator
/// set drops the last of each.
pub fn prepare_tc_reference(lat: &Lattice) -> Result<Tableau, CircuitError> {
    let mut gens = Vec::with_capacity(lat.n_edges());
    for s in 0..lat.n_vertices() - 1 {
        gens.push(lat.star_operator(s)?);
    }
    for p in 0..lat.n_triangles() - 1 {
        gens.push(lat.plaquette_operator(p)?);
    }
    gens.push(lat.zigzag_loop(0, StringKind::Wilson)?);
    gens.push(lat.zigzag_loop(0, StringKind::THooft)?);
    Ok(Tableau::from_generators(&gens)?)
}

pub fn initial_state(lat: &Lattice, initial: InitialState) -> Result<Tableau, CircuitError> {
    Ok(match initial {
        InitialState::ProductX => Tableau::product_state(lat.n_edges(), Basis::X, Sign::Plus)?,
        InitialState::ProductZ => Tableau::product_state(lat.n_edges(), Basis::Z, Sign::Plus)?,
        InitialState::ExactTc => prepare_tc_reference(lat)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub trajectory_id: u64,
    pub snapshots: Vec<ObservableRecord>,
    /// Snapshot average.
    pub mean: ObservableRecord,
    pub wall_time: Duration,
}

/// Observables at fixed measurement-step counts, starting from step 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub step: usize,
    pub record: ObservableRecord,
}

/// A configured circuit on one lattice, ready to run trajectories.
#[derive(Debug, Clone)]
pub struct Circuit {
    cfg: CircuitConfig,
    catalog: Arc<OperatorCatalog>,
    regions: Arc<KpRegions>,
    seed: u64,
    check_invariants: bool,
}

impl Circuit {
    pub fn new(cfg: CircuitConfig, regions: KpRegions) -> Result<Self, CircuitError> {
        cfg.validate()?;
        let lattice = Lattice::new(cfg.l_x, cfg.l_y)?;
        regions.validate(&lattice)?;
        let seed = cfg.seed;
        Ok(Self {
            cfg,
            catalog: Arc::new(OperatorCatalog::new(lattice)),
            regions: Arc::new(regions),
            seed,
            check_invariants: false,
        })
    }

    /// Validates the tableau after every step. Expensive; meant for tests.
    pub fn with_invariant_checks(mut self, on: bool) -> Self {
        self.check_invariants = on;
        self
    }

    /// Overrides the key of the random streams (by default the config seed).
    pub fn with_stream_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn config(&self) -> &CircuitConfig {
        &self.cfg
    }

    pub fn lattice(&self) -> &Lattice {
        &self.catalog.lattice
    }

    pub fn regions(&self) -> &KpRegions {
        &self.regions
    }

    pub fn rng_for(&self, trajectory_id: u64) -> TrajectoryRng {
        stream(self.seed, trajectory_id)
    }

    fn advance(&self, t: &mut Tableau, steps: usize, rng: &mut TrajectoryRng) -> Result<(), CircuitError> {
        for _ in 0..steps {
            step(t, &self.catalog, &self.cfg, rng)?;
            if self.check_invariants {
                t.validate()?;
            }
        }
        Ok(())
    }

    pub fn observe(&self, t: &Tableau) -> Result<ObservableRecord, CircuitError> {
        Ok(observe(t, &self.catalog.lattice, &self.regions)?)
    }

    /// Runs burn-in, then records `n_snapshots` snapshots spaced
    /// `record_interval` steps apart, returning the final state as well.
    pub fn run_with_state(&self, trajectory_id: u64) -> Result<(TrajectoryResult, Tableau), CircuitError> {
        let start = Instant::now();
        let mut rng = self.rng_for(trajectory_id);
        let mut t = initial_state(&self.catalog.lattice, self.cfg.initial)?;
        self.advance(&mut t, self.cfg.burn_in_steps(), &mut rng)?;
        let mut snapshots = Vec::with_capacity(self.cfg.n_snapshots);
        for k in 0..self.cfg.n_snapshots {
            if k > 0 {
                self.advance(&mut t, self.cfg.record_interval(), &mut rng)?;
            }
            snapshots.push(self.observe(&t)?);
        }
        let mean = ObservableRecord::mean(&snapshots);
        let result = TrajectoryResult { trajectory_id, snapshots, mean, wall_time: start.elapsed() };
        Ok((result, t))
    }

    pub fn run_trajectory(&self, trajectory_id: u64) -> Result<TrajectoryResult, CircuitError> {
        Ok(self.run_with_state(trajectory_id)?.0)
    }

    /// Observables every `record_interval` steps from step 0 up to
    /// `total_steps`.
    pub fn trace(&self, trajectory_id: u64, total_steps: usize) -> Result<Vec<TracePoint>, CircuitError> {
        let mut rng = self.rng_for(trajectory_id);
        let mut t = initial_state(&self.catalog.lattice, self.cfg.initial)?;
        let every = self.cfg.record_interval();
        let mut out = vec![TracePoint { step: 0, record: self.observe(&t)? }];
        let mut done = 0;
        while done + every <= total_steps {
            self.advance(&mut t, every, &mut rng)?;
            done += every;
            out.push(TracePoint { step: done, record: self.observe(&t)? });
        }
        Ok(out)
    }
}

//! Experiment specification (JSON).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use tricode_core::circuit::{CircuitConfig, InitialState};
use tricode_core::regions::{parse_region_file, preset, RegionCenters};
use tricode_core::{KpRegions, Lattice};

use crate::ConfigError;

const SIMPLEX_TOLERANCE: f64 = 1e-12;
pub const MIN_PHASE_RESOLUTION: usize = 5;

/// One-parameter family of probability triples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Line {
    /// `p_x + p_g = 1`; the grid lists `p_g`.
    #[serde(rename = "p_x+p_g=1", alias = "x")]
    XLine,
    /// `p_z + p_g = 1`; the grid lists `p_g`.
    #[serde(rename = "p_z+p_g=1", alias = "z")]
    ZLine,
    /// `p_x + p_z = 1 - p_g` at fixed `p_g`; the grid lists `p_x`.
    #[serde(rename = "fixed_pg")]
    FixedPg(f64),
}

impl Line {
    pub fn label(&self) -> String {
        match self {
            Line::XLine => "p_x+p_g=1".into(),
            Line::ZLine => "p_z+p_g=1".into(),
            Line::FixedPg(g) => format!("fixed_pg={g}"),
        }
    }

    /// `(p_x, p_z, p_g)` at grid value `v`.
    pub fn point(&self, v: f64) -> (f64, f64, f64) {
        match *self {
            Line::XLine => (1.0 - v, 0.0, v),
            Line::ZLine => (0.0, 1.0 - v, v),
            Line::FixedPg(g) => (v, 1.0 - g - v, g),
        }
    }

    fn default_initial(&self) -> InitialState {
        match self {
            Line::ZLine => InitialState::ProductX,
            _ => InitialState::ProductZ,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Range { start, stop, count } => {
                if count == 1 {
                    return vec![start];
                }
                (0..count).map(|i| round12(start + (stop - start) * i as f64 / (count - 1) as f64)).collect()
            }
        }
    }
}

/// Rounds to 12 decimals so generated grids print as typed.
fn round12(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionSource {
    Preset(String),
    File { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    ProductX,
    ProductZ,
    ExactTc,
}

impl From<Initial> for InitialState {
    fn from(i: Initial) -> Self {
        match i {
            Initial::ProductX => InitialState::ProductX,
            Initial::ProductZ => InitialState::ProductZ,
            Initial::ExactTc => InitialState::ExactTc,
        }
    }
}

fn default_regions() -> RegionSource {
    RegionSource::Preset("default".into())
}
fn default_burn_in() -> f64 {
    10.0
}
fn default_snapshots() -> usize {
    10
}
fn default_trajectories() -> usize {
    500
}
fn default_phase_sizes() -> Vec<[usize; 2]> {
    vec![[12, 12]]
}
fn default_resolution() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Lattice sizes `[l_x, l_y]`.
    #[serde(default)]
    pub sizes: Vec<[usize; 2]>,
    #[serde(default)]
    pub line: Option<Line>,
    #[serde(default)]
    pub grid: Option<Grid>,
    /// Simplex subdivisions for `phase-diagram`.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_regions")]
    pub regions: RegionSource,
    /// Defaults to ProductX on the `p_z + p_g = 1` line, ProductZ otherwise.
    #[serde(default)]
    pub initial: Option<Initial>,
    #[serde(default = "default_burn_in")]
    pub burn_in_factor: f64,
    #[serde(default)]
    pub n_record: Option<usize>,
    #[serde(default = "default_snapshots")]
    pub n_snapshots: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trajectories")]
    pub trajectory_count: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub workers: Option<usize>,
}

/// A `(size, probability triple)` cell of an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub l_x: usize,
    pub l_y: usize,
    pub p_x: f64,
    pub p_z: f64,
    pub p_g: f64,
}

impl Cell {
    pub fn key(&self) -> String {
        format!("L{}x{}_px{:.6}_pz{:.6}_pg{:.6}", self.l_x, self.l_y, self.p_x, self.p_z, self.p_g)
    }

    pub fn seed_parts(&self) -> [u64; 5] {
        [self.l_x as u64, self.l_y as u64, self.p_x.to_bits(), self.p_z.to_bits(), self.p_g.to_bits()]
    }
}

/// Removes rounding residue such as 1 - 0.9 = 0.09999999999999998.
fn clean(p: f64) -> f64 {
    let r = round12(p);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn check_triple(p: (f64, f64, f64)) -> Result<(), ConfigError> {
    let (x, z, g) = p;
    let ok = [x, z, g].iter().all(|v| v.is_finite() && *v >= 0.0 && *v <= 1.0)
        && (x + z + g - 1.0).abs() <= SIMPLEX_TOLERANCE;
    if !ok {
        return Err(ConfigError::new(format!("grid point (p_x, p_z, p_g) = ({x}, {z}, {g}) is outside the simplex")));
    }
    Ok(())
}

/// Experiment together with the region-file text it refers to, which is
/// part of its identity.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSpec {
    pub spec: ExperimentSpec,
    pub region_text: Option<String>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new(format!("invalid experiment spec: {e}")))
    }

    pub fn initial_state(&self) -> InitialState {
        match self.initial {
            Some(i) => i.into(),
            None => self.line.map_or(InitialState::ProductZ, |l| l.default_initial()),
        }
    }

    fn check_common(&self) -> Result<(), ConfigError> {
        for &[lx, ly] in &self.sizes {
            if lx < 3 || ly < 3 {
                return Err(ConfigError::new(format!("size {lx}x{ly} is smaller than 3x3")));
            }
        }
        if !(self.burn_in_factor.is_finite() && self.burn_in_factor >= 0.0) {
            return Err(ConfigError::new("burn_in_factor must be non-negative".into()));
        }
        if self.n_snapshots == 0 {
            return Err(ConfigError::new("n_snapshots must be positive".into()));
        }
        if self.n_record == Some(0) {
            return Err(ConfigError::new("n_record must be positive".into()));
        }
        if self.trajectory_count < 2 {
            return Err(ConfigError::new("trajectory_count must be at least 2".into()));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::new("workers must be positive".into()));
        }
        Ok(())
    }

    /// Cells of a line sweep, sizes outermost.
    pub fn line_cells(&self) -> Result<Vec<Cell>, ConfigError> {
        self.check_common()?;
        if self.sizes.is_empty() {
            return Err(ConfigError::new("no sizes given".into()));
        }
        let line = self.line.ok_or_else(|| ConfigError::new("no line given".into()))?;
        if let Line::FixedPg(g) = line {
            if !(0.0..=1.0).contains(&g) {
                return Err(ConfigError::new(format!("fixed p_g = {g} is outside [0, 1]")));
            }
        }
        let values = self.grid.as_ref().ok_or_else(|| ConfigError::new("no grid given".into()))?.values();
        if values.is_empty() {
            return Err(ConfigError::new("empty grid".into()));
        }
        let mut cells = Vec::new();
        for &[l_x, l_y] in &self.sizes {
            for &v in &values {
                let (x, z, g) = line.point(v);
                let p = (clean(x), clean(z), clean(g));
                check_triple(p)?;
                cells.push(Cell { l_x, l_y, p_x: p.0, p_z: p.1, p_g: p.2 });
            }
        }
        Ok(cells)
    }

    /// Cells covering the simplex with `resolution` subdivisions per axis.
    pub fn phase_cells(&self) -> Result<Vec<Cell>, ConfigError> {
        self.check_common()?;
        let n = self.resolution;
        if n < MIN_PHASE_RESOLUTION {
            return Err(ConfigError::new(format!("resolution {n} is below {MIN_PHASE_RESOLUTION}")));
        }
        let sizes = if self.sizes.is_empty() { default_phase_sizes() } else { self.sizes.clone() };
        let mut cells = Vec::new();
        for &[l_x, l_y] in &sizes {
            for i in 0..=n {
                for j in 0..=n - i {
                    let k = n - i - j;
                    let f = |a: usize| a as f64 / n as f64;
                    cells.push(Cell { l_x, l_y, p_x: f(i), p_z: f(j), p_g: f(k) });
                }
            }
        }
        Ok(cells)
    }

    pub fn circuit_config(&self, cell: &Cell) -> CircuitConfig {
        let mut cfg = CircuitConfig::new(cell.l_x, cell.l_y, cell.p_x, cell.p_z, cell.p_g);
        cfg.initial = self.initial_state();
        cfg.burn_in_factor = self.burn_in_factor;
        cfg.n_record = self.n_record;
        cfg.n_snapshots = self.n_snapshots;
        cfg.seed = self.seed;
        cfg.trajectory_count = self.trajectory_count;
        cfg
    }
}

impl LoadedSpec {
    /// Reads a spec file; a region file path is resolved against the spec's
    /// directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        let mut spec = ExperimentSpec::from_json(&text)?;
        let mut region_text = None;
        if let RegionSource::File { file } = &spec.regions {
            let resolved =
                if file.is_absolute() { file.clone() } else { path.parent().unwrap_or(Path::new(".")).join(file) };
            let t = std::fs::read_to_string(&resolved)
                .map_err(|e| ConfigError::new(format!("cannot read region file {}: {e}", resolved.display())))?;
            parse_region_file(&t).map_err(|e| ConfigError::new(format!("region file {}: {e}", resolved.display())))?;
            spec.regions = RegionSource::File { file: resolved };
            region_text = Some(t);
        }
        Ok(Self { spec, region_text })
    }

    pub fn from_spec(spec: ExperimentSpec) -> Result<Self, ConfigError> {
        if matches!(spec.regions, RegionSource::File { .. }) {
            return Err(ConfigError::new("region files need a spec loaded from disk".into()));
        }
        Ok(Self { spec, region_text: None })
    }

    pub fn regions(&self, lat: &Lattice) -> Result<KpRegions, ConfigError> {
        let err =
            |e: tricode_core::LatticeError| ConfigError::new(format!("regions on {}x{}: {e}", lat.l_x(), lat.l_y()));
        match (&self.spec.regions, &self.region_text) {
            (RegionSource::Preset(name), _) => preset(lat, name).map_err(err),
            (RegionSource::File { .. }, Some(text)) => {
                let centers: RegionCenters = parse_region_file(text).map_err(err)?;
                KpRegions::from_centers(lat, &centers).map_err(err)
            }
            (RegionSource::File { file }, None) => {
                Err(ConfigError::new(format!("region file {} was not loaded", file.display())))
            }
        }
    }

    /// SHA-256 over everything that determines the numbers produced:
    /// the spec without `out` and `workers`, plus the region-file text.
    pub fn hash(&self) -> String {
        let mut s = self.spec.clone();
        s.out = None;
        s.workers = None;
        if let RegionSource::File { .. } = s.regions {
            s.regions = RegionSource::Preset("<file>".into());
        }
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&s).expect("spec serializes"));
        if let Some(t) = &self.region_text {
            h.update(b"\0regions\0");
            h.update(t.as_bytes());
        }
        format!("{:x}", h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_line() -> ExperimentSpec {
        ExperimentSpec::from_json(
            r#"{"sizes": [[8, 8], [12, 12]], "line": "p_x+p_g=1",
                "grid": {"start": 0.6, "stop": 1.0, "count": 21}, "trajectory_count": 10}"#,
        )
        .unwrap()
    }

    #[test]
    fn range_grid_is_rounded() {
        let v = x_line().grid.unwrap().values();
        assert_eq!(v.len(), 21);
        assert_eq!(v[1], 0.62);
        assert_eq!(v[20], 1.0);
    }

    #[test]
    fn line_cells_lie_on_the_simplex() {
        let cells = x_line().line_cells().unwrap();
        assert_eq!(cells.len(), 42);
        for c in &cells {
            assert!((c.p_x + c.p_z + c.p_g - 1.0).abs() <= 1e-12);
            assert_eq!(c.p_z, 0.0);
        }
        assert_eq!(x_line().initial_state(), InitialState::ProductZ);
    }

    #[test]
    fn line_aliases_and_fixed_pg() {
        let s = ExperimentSpec::from_json(r#"{"sizes": [[6, 6]], "line": "z", "grid": [0.9]}"#).unwrap();
        assert_eq!(s.line, Some(Line::ZLine));
        assert_eq!(s.initial_state(), InitialState::ProductX);
        let s = ExperimentSpec::from_json(r#"{"sizes": [[6, 6]], "line": {"fixed_pg": 0.6}, "grid": [0.0, 0.2, 0.4]}"#)
            .unwrap();
        let cells = s.line_cells().unwrap();
        assert_eq!((cells[2].p_x, cells[2].p_z, cells[2].p_g), (0.4, 0.0, 0.6));
        let bad =
            ExperimentSpec::from_json(r#"{"sizes": [[6, 6]], "line": {"fixed_pg": 0.6}, "grid": [0.5]}"#).unwrap();
        assert!(bad.line_cells().is_err());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(ExperimentSpec::from_json(r#"{"sizes": [[6, 6]], "bogus": 1}"#).is_err());
        assert!(ExperimentSpec::from_json("[1, 2").is_err());
        let s = ExperimentSpec::from_json(r#"{"sizes": [[2, 6]], "line": "x", "grid": [0.5]}"#).unwrap();
        assert!(s.line_cells().is_err());
        let s = ExperimentSpec::from_json(r#"{"sizes": [[6, 6]], "line": "x", "grid": [1.5]}"#).unwrap();
        assert!(s.line_cells().is_err());
        let s = ExperimentSpec::from_json(r#"{"sizes": [[6, 6]], "line": "x", "grid": [0.5], "trajectory_count": 1}"#)
            .unwrap();
        assert!(s.line_cells().is_err());
    }

    #[test]
    fn phase_grid_covers_the_simplex() {
        let s = ExperimentSpec::from_json(r#"{"resolution": 5}"#).unwrap();
        let cells = s.phase_cells().unwrap();
        assert_eq!(cells.len(), 21);
        assert!(cells.iter().all(|c| c.l_x == 12 && (c.p_x + c.p_z + c.p_g - 1.0).abs() <= 1e-12));
        let s = ExperimentSpec::from_json(r#"{"resolution": 4}"#).unwrap();
        assert!(s.phase_cells().is_err());
    }

    #[test]
    fn hash_ignores_output_location_and_workers() {
        let a = LoadedSpec::from_spec(x_line()).unwrap();
        let mut s = x_line();
        s.out = Some("/tmp/elsewhere".into());
        s.workers = Some(3);
        let b = LoadedSpec::from_spec(s).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut s = x_line();
        s.seed = 1;
        assert_ne!(a.hash(), LoadedSpec::from_spec(s).unwrap().hash());
    }
}

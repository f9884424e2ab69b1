//! Collapse fits of aggregate tables.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use tricode_core::analysis::{
    scaled_points, AnalysisError, CellSamples, FssInput, FssPoint, FssResult, FssSeries, ScaledPoint, Statistic,
    ZetaMode,
};

use crate::aggregate::{AggregateRow, TrajectoryRow};
use crate::spec::Cell;
use crate::ConfigError;

/// Aggregate column that can be collapsed, with its error column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    TeeVar,
    ChiXMean,
    ChiZMean,
    WloopMean,
    TloopMean,
    TloopVar,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::TeeVar,
        Observable::ChiXMean,
        Observable::ChiZMean,
        Observable::WloopMean,
        Observable::TloopMean,
        Observable::TloopVar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::TeeVar => "tee_var",
            Observable::ChiXMean => "chi_x_mean",
            Observable::ChiZMean => "chi_z_mean",
            Observable::WloopMean => "wloop_mean",
            Observable::TloopMean => "tloop_mean",
            Observable::TloopVar => "tloop_var",
        }
    }

    /// Variance-type data get a free `zeta` by default, order parameters
    /// a fixed `zeta = 0`.
    pub fn default_zeta(self) -> ZetaMode {
        match self {
            Observable::TeeVar | Observable::TloopVar => ZetaMode::Free,
            _ => ZetaMode::Fixed(0.0),
        }
    }

    fn is_variance(self) -> bool {
        matches!(self, Observable::TeeVar | Observable::TloopVar)
    }

    /// `(value, stderr)` of a row. The loop variance uses the SEM scheme,
    /// half the standard error of the mean.
    pub fn value(self, r: &AggregateRow) -> (f64, f64) {
        match self {
            Observable::TeeVar => (r.tee_var, r.tee_var_err_boot),
            Observable::ChiXMean => (r.chi_x_mean, r.chi_x_sem),
            Observable::ChiZMean => (r.chi_z_mean, r.chi_z_sem),
            Observable::WloopMean => (r.wloop_mean, r.wloop_sem),
            Observable::TloopMean => (r.tloop_mean, r.tloop_sem),
            Observable::TloopVar => (r.tloop_var, 0.5 * r.tloop_sem),
        }
    }

    /// Per-trajectory sample behind the column, and the statistic taken.
    pub fn sample(self, t: &TrajectoryRow) -> (f64, Statistic) {
        let stat = if self.is_variance() { Statistic::Variance } else { Statistic::Mean };
        let v = match self {
            Observable::TeeVar => t.s_t,
            Observable::ChiXMean => t.chi_x,
            Observable::ChiZMean => t.chi_z,
            Observable::WloopMean => t.w_loop,
            Observable::TloopMean | Observable::TloopVar => t.t_loop,
        };
        (v, stat)
    }
}

impl FromStr for Observable {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Observable::ALL.into_iter().find(|o| o.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Observable::ALL.iter().map(|o| o.name()).collect();
            ConfigError::new(format!("unknown observable {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// `--zeta` flag: `free` or a fixed number.
pub fn parse_zeta(s: &str) -> Result<ZetaMode, ConfigError> {
    if s == "free" {
        return Ok(ZetaMode::Free);
    }
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(ZetaMode::Fixed)
        .ok_or_else(|| ConfigError::new(format!("--zeta must be 'free' or a number, got {s:?}")))
}

/// Which probability is the scan variable of a table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scan {
    XLine,
    ZLine,
    FixedPg(f64),
}

impl Scan {
    pub fn detect(rows: &[AggregateRow]) -> Result<Self, AnalysisError> {
        let first = rows.first().ok_or_else(|| AnalysisError::InvalidInput("empty table".into()))?;
        if rows.iter().all(|r| r.p_z == 0.0) {
            Ok(Scan::XLine)
        } else if rows.iter().all(|r| r.p_x == 0.0) {
            Ok(Scan::ZLine)
        } else if rows.iter().all(|r| r.p_g == first.p_g) {
            Ok(Scan::FixedPg(first.p_g))
        } else {
            Err(AnalysisError::InvalidInput("rows do not lie on one line of the simplex".into()))
        }
    }

    pub fn label(&self) -> String {
        match self {
            Scan::XLine => "p_x+p_g=1".into(),
            Scan::ZLine => "p_z+p_g=1".into(),
            Scan::FixedPg(g) => format!("fixed_pg={g}"),
        }
    }

    pub fn parameter(&self, r: &AggregateRow) -> f64 {
        match self {
            Scan::XLine | Scan::ZLine => r.p_g,
            Scan::FixedPg(_) => r.p_x,
        }
    }
}

/// Collapse input from an aggregate table. The FSS size is `l_x`. Zero
/// errors (cells with no spread) are raised to the smallest positive error
/// in the column.
pub fn fss_input(rows: &[AggregateRow], obs: Observable) -> Result<(FssInput, Scan), AnalysisError> {
    let scan = Scan::detect(rows)?;
    let floor = rows.iter().map(|r| obs.value(r).1).filter(|e| *e > 0.0).fold(f64::INFINITY, f64::min);
    if !floor.is_finite() {
        return Err(AnalysisError::InvalidInput(format!("{} has no positive error anywhere", obs.name())));
    }
    let mut by_size: BTreeMap<usize, Vec<FssPoint>> = BTreeMap::new();
    for r in rows {
        let (value, err) = obs.value(r);
        by_size.entry(r.l_x).or_default().push(FssPoint { p: scan.parameter(r), value, stderr: err.max(floor) });
    }
    let series = by_size.into_iter().map(|(l, points)| FssSeries { size: l as f64, points }).collect();
    Ok((FssInput::new(series)?, scan))
}

/// Starting point: the peak of the largest size for variance-type data,
/// else where the largest size crosses half its range. `nu` starts at 1.5
/// and `zeta` at 0 (or its fixed value).
pub fn initial_guess(data: &FssInput, obs: Observable, mode: ZetaMode) -> (f64, f64, f64) {
    let largest = data.series().last().expect("validated input has series");
    let pts = &largest.points;
    let p_c = if obs.is_variance() {
        pts.iter().max_by(|a, b| a.value.total_cmp(&b.value)).map_or(0.5, |p| p.p)
    } else {
        let lo = pts.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
        let mid = 0.5 * (lo + hi);
        pts.windows(2)
            .find(|w| (w[0].value - mid) * (w[1].value - mid) <= 0.0)
            .map_or(pts[pts.len() / 2].p, |w| 0.5 * (w[0].p + w[1].p))
    };
    let zeta = match mode {
        ZetaMode::Free => 0.0,
        ZetaMode::Fixed(z) => z,
    };
    (p_c.clamp(0.0, 1.0), 1.5, zeta)
}

/// Location of the largest value per size.
pub fn peak_locations(data: &FssInput) -> Vec<(f64, f64)> {
    data.series()
        .iter()
        .map(|s| {
            let p = s.points.iter().max_by(|a, b| a.value.total_cmp(&b.value)).map_or(f64::NAN, |p| p.p);
            (s.size, p)
        })
        .collect()
}

/// Trajectory samples per cell for a bootstrap of `obs`.
pub fn cell_samples(
    cells: &[(Cell, Vec<TrajectoryRow>)],
    scan: Scan,
    obs: Observable,
) -> (Vec<CellSamples>, Statistic) {
    let mut stat = Statistic::Mean;
    let out = cells
        .iter()
        .map(|(c, rows)| {
            let samples = rows
                .iter()
                .map(|t| {
                    let (v, s) = obs.sample(t);
                    stat = s;
                    v
                })
                .collect();
            let p = match scan {
                Scan::XLine | Scan::ZLine => c.p_g,
                Scan::FixedPg(_) => c.p_x,
            };
            CellSamples { size: c.l_x as f64, p, samples }
        })
        .collect();
    (out, stat)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FssReport {
    pub observable: String,
    pub line: String,
    pub p_c: f64,
    pub p_c_err: f64,
    pub nu: f64,
    pub nu_err: f64,
    pub zeta: f64,
    pub zeta_err: f64,
    pub quality: f64,
    /// `profile` or `bootstrap`.
    pub method: String,
    /// `free` or `fixed`.
    pub zeta_mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_boot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_failed: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Collapse of the central fit, for cross-checking a bootstrap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central: Option<Central>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Central {
    pub p_c: f64,
    pub p_c_err: f64,
    pub nu: f64,
    pub nu_err: f64,
    pub zeta: f64,
    pub zeta_err: f64,
    pub quality: f64,
}

impl From<&FssResult> for Central {
    fn from(r: &FssResult) -> Self {
        Self {
            p_c: r.p_c,
            p_c_err: r.p_c_err,
            nu: r.nu,
            nu_err: r.nu_err,
            zeta: r.zeta,
            zeta_err: r.zeta_err,
            quality: r.quality,
        }
    }
}

impl FssReport {
    pub fn new(obs: Observable, scan: Scan, mode: ZetaMode, r: &FssResult, method: &str) -> Self {
        Self {
            observable: obs.name().into(),
            line: scan.label(),
            p_c: r.p_c,
            p_c_err: r.p_c_err,
            nu: r.nu,
            nu_err: r.nu_err,
            zeta: r.zeta,
            zeta_err: r.zeta_err,
            quality: r.quality,
            method: method.into(),
            zeta_mode: match mode {
                ZetaMode::Free => "free".into(),
                ZetaMode::Fixed(_) => "fixed".into(),
            },
            n_boot: None,
            n_failed: None,
            warnings: Vec::new(),
            central: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollapseRow {
    pub l: f64,
    pub p: f64,
    pub x: f64,
    pub y: f64,
    pub dy: f64,
}

pub fn collapse_rows(data: &FssInput, r: &FssResult) -> Result<Vec<CollapseRow>, AnalysisError> {
    Ok(scaled_points(data, r.p_c, r.nu, r.zeta)?
        .into_iter()
        .map(|ScaledPoint { size, p, x, y, dy }| CollapseRow { l: size, p, x, y, dy })
        .collect())
}

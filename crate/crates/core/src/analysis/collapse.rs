//! Scaling-collapse quality.
//!
//! Each rescaled point is compared with a master curve estimated from the
//! other sizes: for every other size, the two points bracketing its
//! abscissa are taken, and a weighted straight line through all of them
//! gives the prediction and its variance. The quality is the mean of
//! `(y - Y)^2 / (dy^2 + dY^2)` over the points that have at least one
//! bracketing size, so a statistically perfect collapse scores about 1.

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FssPoint {
    pub p: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FssSeries {
    pub size: f64,
    pub points: Vec<FssPoint>,
}

/// Validated collapse input: at least 3 distinct sizes, at least 5 points
/// per size, positive finite errors. Series are stored by increasing size
/// and points by increasing `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct FssInput {
    series: Vec<FssSeries>,
}

pub const MIN_SIZES: usize = 3;
pub const MIN_POINTS: usize = 5;

impl FssInput {
    pub fn new(mut series: Vec<FssSeries>) -> Result<Self, AnalysisError> {
        let bad = |m: String| Err(AnalysisError::InvalidInput(m));
        if series.len() < MIN_SIZES {
            return bad(format!("need at least {MIN_SIZES} sizes, got {}", series.len()));
        }
        for s in &mut series {
            if !(s.size.is_finite() && s.size > 0.0) {
                return bad(format!("size {} is not positive", s.size));
            }
            if s.points.len() < MIN_POINTS {
                return bad(format!("size {} has {} points, need at least {MIN_POINTS}", s.size, s.points.len()));
            }
            for pt in &s.points {
                if !(pt.p.is_finite() && pt.value.is_finite()) {
                    return bad(format!("non-finite point at size {}", s.size));
                }
                if !(pt.stderr.is_finite() && pt.stderr > 0.0) {
                    return bad(format!("stderr {} at size {}, p = {} is not positive", pt.stderr, s.size, pt.p));
                }
            }
            s.points.sort_by(|a, b| a.p.total_cmp(&b.p));
            if s.points.windows(2).any(|w| w[0].p == w[1].p) {
                return bad(format!("duplicate parameter value at size {}", s.size));
            }
        }
        series.sort_by(|a, b| a.size.total_cmp(&b.size));
        if series.windows(2).any(|w| w[0].size == w[1].size) {
            return bad("duplicate size".into());
        }
        Ok(Self { series })
    }

    pub fn series(&self) -> &[FssSeries] {
        &self.series
    }

    pub fn n_points(&self) -> usize {
        self.series.iter().map(|s| s.points.len()).sum()
    }

    /// Same data with every value and error multiplied by `c`.
    pub fn scaled_values(&self, c: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.series {
            for pt in &mut s.points {
                pt.value *= c;
                pt.stderr *= c;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPoint {
    pub size: f64,
    pub p: f64,
    pub x: f64,
    pub y: f64,
    pub dy: f64,
}

fn check_nu(nu: f64) -> Result<(), AnalysisError> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(AnalysisError::InvalidArgument(format!("nu must be positive, got {nu}")));
    }
    Ok(())
}

/// Rescaled points `(x, y, dy) = ((p - p_c) L^(1/nu), value / L^zeta, stderr / L^zeta)`,
/// grouped by size with `x` increasing.
pub fn scaled_points(data: &FssInput, p_c: f64, nu: f64, zeta: f64) -> Result<Vec<ScaledPoint>, AnalysisError> {
    check_nu(nu)?;
    let mut out = Vec::with_capacity(data.n_points());
    for s in &data.series {
        let sx = s.size.powf(1.0 / nu);
        let sy = s.size.powf(-zeta);
        for pt in &s.points {
            out.push(ScaledPoint { size: s.size, p: pt.p, x: (pt.p - p_c) * sx, y: pt.value * sy, dy: pt.stderr * sy });
        }
    }
    Ok(out)
}

/// Weighted least-squares line through `pts` evaluated at `x`:
/// prediction and its variance.
fn master_curve(pts: &[ScaledPoint], x: f64) -> Option<(f64, f64)> {
    let (mut k, mut kx, mut ky, mut kxx, mut kxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for q in pts {
        let w = 1.0 / (q.dy * q.dy);
        k += w;
        kx += w * q.x;
        ky += w * q.y;
        kxx += w * q.x * q.x;
        kxy += w * q.x * q.y;
    }
    let delta = k * kxx - kx * kx;
    if delta.is_nan() || delta <= 0.0 {
        return None;
    }
    let y = (kxx * ky - kx * kxy) / delta + x * (k * kxy - kx * ky) / delta;
    let var = (kxx - 2.0 * x * kx + x * x * k) / delta;
    Some((y, var.max(0.0)))
}

/// Per-point terms `(y - Y)^2 / (dy^2 + dY^2)` for every point that has a
/// master-curve estimate.
pub fn collapse_terms(data: &FssInput, p_c: f64, nu: f64, zeta: f64) -> Result<Vec<f64>, AnalysisError> {
    let pts = scaled_points(data, p_c, nu, zeta)?;
    let mut groups = Vec::with_capacity(data.series.len());
    let mut start = 0;
    for s in &data.series {
        groups.push(&pts[start..start + s.points.len()]);
        start += s.points.len();
    }
    let mut terms = Vec::new();
    let mut neighbours = Vec::with_capacity(2 * groups.len());
    for (gi, g) in groups.iter().enumerate() {
        for q in g.iter() {
            neighbours.clear();
            for (gj, other) in groups.iter().enumerate() {
                if gi == gj {
                    continue;
                }
                // `x` is increasing within a group. An exact tie counts the
                // larger size as further left, which is the limit from
                // p_c + 0 (larger sizes move left faster as p_c grows).
                // Without this the quality at p_c on a grid value would match
                // neither one-sided limit.
                let k = other.partition_point(|o| o.x < q.x || (o.x == q.x && o.size > q.size));
                if k == 0 || k == other.len() {
                    continue;
                }
                neighbours.extend_from_slice(&other[k - 1..=k]);
            }
            if neighbours.is_empty() {
                continue;
            }
            if let Some((y, var)) = master_curve(&neighbours, q.x) {
                terms.push((q.y - y).powi(2) / (q.dy * q.dy + var));
            }
        }
    }
    if terms.is_empty() {
        return Err(AnalysisError::NoOverlap);
    }
    Ok(terms)
}

/// Collapse quality `S` at `(p_c, nu, zeta)`.
pub fn collapse_quality(data: &FssInput, p_c: f64, nu: f64, zeta: f64) -> Result<f64, AnalysisError> {
    let terms = collapse_terms(data, p_c, nu, zeta)?;
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

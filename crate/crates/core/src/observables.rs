//! Observables evaluated on a single stabilizer state.
//!
//! All correlators use the pure-state rule `Tr[ρOρO] = 1` if `O` commutes
//! with every generator and `0` otherwise, so they are sign-free.

use thiserror::Error;

use crate::lattice::{Lattice, StringKind};
use crate::pauli::{PauliError, PauliOperator};
use crate::regions::KpRegions;
use crate::tableau::Tableau;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObservableError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("tableau has {tableau} qubits but the lattice has {lattice} edges")]
    SizeMismatch { tableau: usize, lattice: usize },
    #[error("need at least 2 samples, got {0}")]
    InsufficientData(usize),
}

/// One snapshot of every observable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ObservableRecord {
    /// Topological entanglement entropy in bits.
    pub s_t: f64,
    pub chi_z: f64,
    pub chi_x: f64,
    pub w_loop: f64,
    pub t_loop: f64,
}

impl ObservableRecord {
    /// Component-wise mean of a non-empty slice of records.
    pub fn mean(records: &[ObservableRecord]) -> ObservableRecord {
        let n = records.len() as f64;
        let mut m = ObservableRecord::default();
        for r in records {
            m.s_t += r.s_t;
            m.chi_z += r.chi_z;
            m.chi_x += r.chi_x;
            m.w_loop += r.w_loop;
            m.t_loop += r.t_loop;
        }
        m.s_t /= n;
        m.chi_z /= n;
        m.chi_x /= n;
        m.w_loop /= n;
        m.t_loop /= n;
        m
    }
}

fn check_sizes(t: &Tableau, lat: &Lattice) -> Result<(), ObservableError> {
    if t.n_qubits() != lat.n_edges() {
        return Err(ObservableError::SizeMismatch { tableau: t.n_qubits(), lattice: lat.n_edges() });
    }
    Ok(())
}

/// Kitaev-Preskill combination
/// `S_A + S_B + S_C - S_AB - S_BC - S_CA + S_ABC`, in bits.
pub fn tee(t: &Tableau, regions: &KpRegions) -> Result<i64, ObservableError> {
    let [a, b, c, ab, bc, ca, abc] = regions.combinations();
    let s = |q: &[usize]| t.entanglement_entropy(q).map(|v| v as i64);
    Ok(s(&a)? + s(&b)? + s(&c)? - s(&ab)? - s(&bc)? - s(&ca)? + s(&abc)?)
}

/// Rényi-2 correlator `Tr[ρOρO]` of a pure stabilizer state: 1 when `o`
/// commutes with every generator, else 0.
pub fn renyi2(t: &Tableau, o: &PauliOperator) -> Result<u8, ObservableError> {
    if o.is_identity() {
        return Err(PauliError::Identity.into());
    }
    Ok(t.commutes_with_all(o)? as u8)
}

/// For each row `y` and length `r = 1..l_x`, whether the string
/// `(0, y) -> (r, y)` of `kind` commutes with all generators.
///
/// The strings in a row are nested, so each generator is scanned once per
/// row with a running parity.
fn string_commutation_table(t: &Tableau, lat: &Lattice, kind: StringKind) -> Vec<bool> {
    let (lx, ly) = (lat.l_x(), lat.l_y());
    let rows: Vec<Vec<usize>> = (0..ly).map(|y| lat.zigzag_string_edges(0, y, lx - 1).expect("valid string")).collect();
    let mut ok = vec![true; ly * lx];
    for g in 0..t.n_qubits() {
        for (y, edges) in rows.iter().enumerate() {
            let mut parity = false;
            for (k, pair) in edges.chunks_exact(2).enumerate() {
                for &e in pair {
                    // Z strings see X bits of the generator and vice versa.
                    parity ^= match kind {
                        StringKind::Wilson => t.x_bit(g, e),
                        StringKind::THooft => t.z_bit(g, e),
                    };
                }
                if parity {
                    ok[y * lx + k + 1] = false;
                }
            }
        }
    }
    ok
}

/// String susceptibility: mean of `renyi2` over the zigzag strings with
/// left end at `x = 0`, every row `y` and every length `r = 1..l_x - 1`.
pub fn string_susceptibility(t: &Tableau, lat: &Lattice, kind: StringKind) -> Result<f64, ObservableError> {
    check_sizes(t, lat)?;
    let (lx, ly) = (lat.l_x(), lat.l_y());
    let ok = string_commutation_table(t, lat, kind);
    let hits = (0..ly).flat_map(|y| (1..lx).map(move |r| (y, r))).filter(|&(y, r)| ok[y * lx + r]).count();
    Ok(hits as f64 / ((lx - 1) * ly) as f64)
}

/// Row average of `renyi2` for the non-contractible zigzag loops:
/// `W^c` for [`StringKind::Wilson`], `T^c` for [`StringKind::THooft`].
pub fn loop_average(t: &Tableau, lat: &Lattice, kind: StringKind) -> Result<f64, ObservableError> {
    check_sizes(t, lat)?;
    let mut hits = 0usize;
    for y in 0..lat.l_y() {
        let op = lat.zigzag_loop(y, kind).expect("row in range");
        hits += renyi2(t, &op)? as usize;
    }
    Ok(hits as f64 / lat.l_y() as f64)
}

/// Evaluates every observable on `t`.
pub fn observe(t: &Tableau, lat: &Lattice, regions: &KpRegions) -> Result<ObservableRecord, ObservableError> {
    check_sizes(t, lat)?;
    Ok(ObservableRecord {
        s_t: tee(t, regions)? as f64,
        chi_z: string_susceptibility(t, lat, StringKind::Wilson)?,
        chi_x: string_susceptibility(t, lat, StringKind::THooft)?,
        w_loop: loop_average(t, lat, StringKind::Wilson)?,
        t_loop: loop_average(t, lat, StringKind::THooft)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStats {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the mean.
    pub sem: f64,
}

pub fn ensemble_stats(values: &[f64]) -> Result<EnsembleStats, ObservableError> {
    let n = values.len();
    if n < 2 {
        return Err(ObservableError::InsufficientData(n));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    Ok(EnsembleStats { mean, variance, sem: (variance / nf).sqrt() })
}

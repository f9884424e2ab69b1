//! Measurement-only stabilizer circuits for the toric code on a periodic
//! triangular lattice, with topological-entropy and 1-form-symmetry
//! observables and finite-size-scaling analysis.

pub mod analysis;
pub mod circuit;
pub mod lattice;
pub mod observables;
pub mod pauli;
pub mod regions;
pub mod rng;
pub mod tableau;

pub use lattice::{Lattice, LatticeError, StringKind};
pub use pauli::{Pauli, PauliError, PauliOperator, Sign};
pub use regions::{KpRegions, Subsystem};
pub use tableau::{Basis, MeasurementOutcome, Membership, Projection, Tableau};

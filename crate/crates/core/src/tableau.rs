//! Stabilizer tableau without destabilizers.
//!
//! The state is fixed by `n` independent, mutually commuting generators.
//! Generator rows live in two flat row-major bit planes so that row products
//! and commutation checks are word operations.

use std::fmt::Write as _;

use rand::Rng;

use crate::pauli::{product_phase, words_for, PauliError, PauliOperator, Sign, WORD_BITS};

/// Single-qubit basis for product states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Z,
}

/// Result of testing a Pauli against the stabilizer group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    InGroupPlus,
    InGroupMinus,
    Anticommuting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MeasurementOutcome {
    pub value: Sign,
    pub deterministic: bool,
}

/// Outcome of [`Tableau::project`], which skips the sign lookup for
/// deterministic measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projection {
    /// The operator was already in the group (up to sign); state unchanged.
    Deterministic,
    /// The state collapsed onto the given eigenvalue.
    Random(Sign),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    signs: Vec<bool>,
}

impl Tableau {
    /// Product state with every qubit in the `sign` eigenstate of `basis`.
    pub fn product_state(n: usize, basis: Basis, sign: Sign) -> Result<Self, PauliError> {
        if n == 0 {
            return Err(PauliError::InvalidSize);
        }
        let words = words_for(n);
        let mut t =
            Tableau { n, words, x: vec![0; n * words], z: vec![0; n * words], signs: vec![sign.is_negative(); n] };
        let plane = match basis {
            Basis::X => &mut t.x,
            Basis::Z => &mut t.z,
        };
        for q in 0..n {
            plane[q * words + q / WORD_BITS] |= 1 << (q % WORD_BITS);
        }
        Ok(t)
    }

    /// Builds a tableau from explicit generators, checking that there are
    /// exactly `n` of them, that they commute, and that they are independent.
    pub fn from_generators(generators: &[PauliOperator]) -> Result<Self, PauliError> {
        let n = generators.first().ok_or(PauliError::InvalidSize)?.n_qubits();
        if generators.len() != n {
            return Err(PauliError::InvalidTableau(format!("{} generators for {n} qubits", generators.len())));
        }
        let words = words_for(n);
        let mut t = Tableau {
            n,
            words,
            x: Vec::with_capacity(n * words),
            z: Vec::with_capacity(n * words),
            signs: Vec::with_capacity(n),
        };
        for g in generators {
            if g.n_qubits() != n {
                return Err(PauliError::DimensionMismatch { left: n, right: g.n_qubits() });
            }
            t.x.extend_from_slice(&g.x);
            t.z.extend_from_slice(&g.z);
            t.signs.push(g.sign().is_negative());
        }
        t.validate()?;
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn generator(&self, i: usize) -> PauliOperator {
        PauliOperator::from_parts(self.n, self.row_x(i).to_vec(), self.row_z(i).to_vec(), Sign::from_bit(self.signs[i]))
    }

    pub fn generators(&self) -> impl Iterator<Item = PauliOperator> + '_ {
        (0..self.n).map(|i| self.generator(i))
    }

    /// X bit of generator `row` on `qubit`.
    #[inline]
    pub fn x_bit(&self, row: usize, qubit: usize) -> bool {
        self.x[row * self.words + qubit / WORD_BITS] >> (qubit % WORD_BITS) & 1 == 1
    }

    /// Z bit of generator `row` on `qubit`.
    #[inline]
    pub fn z_bit(&self, row: usize, qubit: usize) -> bool {
        self.z[row * self.words + qubit / WORD_BITS] >> (qubit % WORD_BITS) & 1 == 1
    }

    #[inline]
    fn row_x(&self, i: usize) -> &[u64] {
        &self.x[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    fn row_z(&self, i: usize) -> &[u64] {
        &self.z[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    fn bit(&self, row: usize, col: usize) -> bool {
        // Columns 0..n index the X plane, n..2n the Z plane.
        let (plane, q) = if col < self.n { (&self.x, col) } else { (&self.z, col - self.n) };
        plane[row * self.words + q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1
    }

    /// `row[target] <- row[source] * row[target]`. The rows must commute.
    fn row_multiply(&mut self, target: usize, source: usize) {
        debug_assert_ne!(target, source);
        let w = self.words;
        let (ts, ss) = (target * w, source * w);
        let phase = product_phase(&self.x[ss..ss + w], &self.z[ss..ss + w], &self.x[ts..ts + w], &self.z[ts..ts + w]);
        debug_assert!(phase & 1 == 0, "row product of anticommuting generators");
        self.signs[target] ^= self.signs[source] ^ (phase == 2);
        for k in 0..w {
            self.x[ts + k] ^= self.x[ss + k];
            self.z[ts + k] ^= self.z[ss + k];
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        for k in 0..w {
            self.x.swap(a * w + k, b * w + k);
            self.z.swap(a * w + k, b * w + k);
        }
        self.signs.swap(a, b);
    }

    fn check_operator(&self, p: &PauliOperator) -> Result<(), PauliError> {
        if p.n_qubits() != self.n {
            return Err(PauliError::DimensionMismatch { left: self.n, right: p.n_qubits() });
        }
        if p.is_identity() {
            return Err(PauliError::Identity);
        }
        Ok(())
    }

    /// Rows whose symplectic product with `p` is odd, in increasing order.
    fn anticommuting_rows(&self, p: &PauliOperator) -> Vec<usize> {
        let active = p.active_words();
        let w = self.words;
        (0..self.n)
            .filter(|&i| {
                let base = i * w;
                let mut acc = 0u64;
                for &k in &active {
                    acc ^= (self.x[base + k] & p.z[k]) ^ (self.z[base + k] & p.x[k]);
                }
                acc.count_ones() & 1 == 1
            })
            .collect()
    }

    /// `true` iff `p` commutes with every generator; for a pure state this
    /// means `±p` belongs to the stabilizer group.
    pub fn commutes_with_all(&self, p: &PauliOperator) -> Result<bool, PauliError> {
        if p.n_qubits() != self.n {
            return Err(PauliError::DimensionMismatch { left: self.n, right: p.n_qubits() });
        }
        let active = p.active_words();
        let w = self.words;
        Ok((0..self.n).all(|i| {
            let base = i * w;
            let mut acc = 0u64;
            for &k in &active {
                acc ^= (self.x[base + k] & p.z[k]) ^ (self.z[base + k] & p.x[k]);
            }
            acc.count_ones() & 1 == 0
        }))
    }

    /// Reduced row echelon copy of the generator matrix and its pivot
    /// columns (one per row, in row order).
    fn echelon(&self) -> (Tableau, Vec<usize>) {
        let mut t = self.clone();
        let mut pivots = Vec::with_capacity(self.n);
        let mut next = 0;
        for col in 0..2 * self.n {
            if next == self.n {
                break;
            }
            let Some(r) = (next..self.n).find(|&r| t.bit(r, col)) else {
                continue;
            };
            t.swap_rows(r, next);
            for other in 0..self.n {
                if other != next && t.bit(other, col) {
                    t.row_multiply(other, next);
                }
            }
            pivots.push(col);
            next += 1;
        }
        (t, pivots)
    }

    /// Checks pairwise commutation and GF(2) independence of the generators.
    pub fn validate(&self) -> Result<(), PauliError> {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if crate::pauli::symplectic_parity(self.row_x(i), self.row_z(i), self.row_x(j), self.row_z(j)) {
                    return Err(PauliError::InvalidTableau(format!("generators {i} and {j} anticommute")));
                }
            }
        }
        let rank = self.echelon().1.len();
        if rank != self.n {
            return Err(PauliError::InvalidTableau(format!("generators have rank {rank}, expected {}", self.n)));
        }
        Ok(())
    }

    /// Decides whether `p` or `-p` is in the stabilizer group, or neither.
    pub fn group_membership(&self, p: &PauliOperator) -> Result<Membership, PauliError> {
        self.check_operator(p)?;
        if !self.anticommuting_rows(p).is_empty() {
            return Ok(Membership::Anticommuting);
        }
        let (ech, pivots) = self.echelon();
        // Accumulate the generator product that reproduces p's bits.
        let mut acc = PauliOperator::identity(self.n);
        for (row, &col) in pivots.iter().enumerate() {
            if p.column_bit(col) != acc.column_bit(col) {
                acc = ech.generator(row).multiply(&acc)?;
            }
        }
        if !acc.same_letters(p) {
            return Err(PauliError::InvalidTableau("commuting operator outside the group; state is not pure".into()));
        }
        Ok(if acc.sign() == p.sign() { Membership::InGroupPlus } else { Membership::InGroupMinus })
    }

    /// Projective measurement of `p` (taken with sign `+1`), returning the
    /// outcome. Deterministic outcomes cost one Gaussian elimination.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        p: &PauliOperator,
        rng: &mut R,
    ) -> Result<MeasurementOutcome, PauliError> {
        let p = p.clone().with_sign(Sign::Plus);
        match self.project(&p, rng)? {
            Projection::Random(value) => Ok(MeasurementOutcome { value, deterministic: false }),
            Projection::Deterministic => {
                let value = match self.group_membership(&p)? {
                    Membership::InGroupPlus => Sign::Plus,
                    Membership::InGroupMinus => Sign::Minus,
                    Membership::Anticommuting => unreachable!("commuting operator"),
                };
                Ok(MeasurementOutcome { value, deterministic: true })
            }
        }
    }

    /// Projective measurement of `p` that leaves the outcome of a
    /// deterministic measurement unresolved. The post-measurement state is
    /// identical to [`Tableau::measure`].
    pub fn project<R: Rng + ?Sized>(&mut self, p: &PauliOperator, rng: &mut R) -> Result<Projection, PauliError> {
        self.check_operator(p)?;
        let anti = self.anticommuting_rows(p);
        let Some((&pivot, rest)) = anti.split_first() else {
            return Ok(Projection::Deterministic);
        };
        for &j in rest {
            self.row_multiply(j, pivot);
        }
        let outcome = Sign::from_bit(rng.gen::<bool>());
        let w = self.words;
        self.x[pivot * w..(pivot + 1) * w].copy_from_slice(&p.x);
        self.z[pivot * w..(pivot + 1) * w].copy_from_slice(&p.z);
        self.signs[pivot] = outcome.is_negative();
        Ok(Projection::Random(outcome))
    }

    /// Rank over GF(2) of the generator matrix restricted to the X and Z
    /// columns of `qubits`.
    pub fn rank_restricted(&self, qubits: &[usize]) -> Result<usize, PauliError> {
        if qubits.is_empty() {
            return Err(PauliError::EmptySubset);
        }
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.n) {
            return Err(PauliError::IndexOutOfRange { index: q, n: self.n });
        }
        let cols = 2 * qubits.len();
        let rw = words_for(cols);
        let mut rows: Vec<u64> = Vec::with_capacity(self.n * rw);
        let mut row = vec![0u64; rw];
        let mut n_rows = 0;
        for i in 0..self.n {
            row.iter_mut().for_each(|w| *w = 0);
            let base = i * self.words;
            let mut any = false;
            for (k, &q) in qubits.iter().enumerate() {
                let (w, b) = (q / WORD_BITS, q % WORD_BITS);
                let xb = self.x[base + w] >> b & 1;
                let zb = self.z[base + w] >> b & 1;
                if xb | zb != 0 {
                    any = true;
                    let c = 2 * k;
                    row[c / WORD_BITS] |= xb << (c % WORD_BITS);
                    row[(c + 1) / WORD_BITS] |= zb << ((c + 1) % WORD_BITS);
                }
            }
            if any {
                rows.extend_from_slice(&row);
                n_rows += 1;
            }
        }
        Ok(gf2_rank(&mut rows, n_rows, rw, cols))
    }

    /// Entanglement entropy of `qubits` in bits: `rank_restricted - |A|`.
    pub fn entanglement_entropy(&self, qubits: &[usize]) -> Result<usize, PauliError> {
        let rank = self.rank_restricted(qubits)?;
        Ok(rank - qubits.len())
    }

    /// One generator per line as a sign followed by `{I,X,Y,Z}` letters.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in self.generators() {
            let _ = writeln!(out, "{g}");
        }
        out
    }
}

impl std::fmt::Debug for Tableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tableau({} qubits)\n{}", self.n, self.dump())
    }
}

/// Rank of a packed `n_rows x cols` GF(2) matrix; the matrix is destroyed.
pub(crate) fn gf2_rank(rows: &mut [u64], n_rows: usize, row_words: usize, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        if rank == n_rows {
            break;
        }
        let (w, b) = (col / WORD_BITS, col % WORD_BITS);
        let mask = 1u64 << b;
        let Some(r) = (rank..n_rows).find(|&r| rows[r * row_words + w] & mask != 0) else {
            continue;
        };
        if r != rank {
            for k in 0..row_words {
                rows.swap(r * row_words + k, rank * row_words + k);
            }
        }
        let (head, tail) = rows.split_at_mut((rank + 1) * row_words);
        let pivot = &head[rank * row_words..];
        for other in tail.chunks_exact_mut(row_words) {
            if other[w] & mask != 0 {
                // Bits below `w` are already zero in the pivot row.
                for k in w..row_words {
                    other[k] ^= pivot[k];
                }
            }
        }
        rank += 1;
    }
    rank
}

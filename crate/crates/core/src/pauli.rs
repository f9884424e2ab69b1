//! Bit-packed Pauli operators in the binary-symplectic representation.
//!
//! An `n`-qubit Pauli is stored as two bit planes (`x` and `z`) packed into
//! 64-bit words, plus a sign. A qubit with both bits set carries `Y = iXZ`,
//! so every operator representable here is Hermitian.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qubit count must be positive")]
    InvalidSize,
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("operation is undefined for the identity operator")]
    Identity,
    #[error("product of anticommuting Paulis is not Hermitian")]
    NonHermitianProduct,
    #[error("qubit subset must be non-empty")]
    EmptySubset,
    #[error("invalid tableau: {0}")]
    InvalidTableau(String),
    #[error("cannot parse Pauli string: {0}")]
    Parse(String),
}

/// Overall sign of a Hermitian Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn from_bit(negative: bool) -> Self {
        if negative {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Minus
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flipped(self) -> Self {
        Sign::from_bit(!self.is_negative())
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bit(self.is_negative() ^ rhs.is_negative())
    }
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Exponent of `i` (mod 4) picked up when multiplying the Pauli words
/// `(x1, z1) * (x2, z2)` qubit by qubit, with `Y = iXZ`.
#[inline]
pub(crate) fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> i64 {
    let mut plus = 0i64;
    let mut minus = 0i64;
    for k in 0..x1.len() {
        let (a, b, c, d) = (x1[k], z1[k], x2[k], z2[k]);
        // XZ -> -iY, ZX -> iY, YZ -> iX, ZY -> -iX, XY -> iZ, YX -> -iZ
        let p = (a & b & !c & d) | (a & !b & c & d) | (!a & b & c & !d);
        let m = (a & b & c & !d) | (a & !b & !c & d) | (!a & b & c & d);
        plus += p.count_ones() as i64;
        minus += m.count_ones() as i64;
    }
    (plus - minus).rem_euclid(4)
}

#[inline]
pub(crate) fn symplectic_parity(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> bool {
    let mut acc = 0u64;
    for k in 0..x1.len() {
        acc ^= (x1[k] & z2[k]) ^ (z1[k] & x2[k]);
    }
    acc.count_ones() & 1 == 1
}

/// An `n`-qubit Hermitian Pauli operator with a `±1` sign.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    pub(crate) x: Vec<u64>,
    pub(crate) z: Vec<u64>,
    sign: Sign,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n);
        Self { n, x: vec![0; w], z: vec![0; w], sign: Sign::Plus }
    }

    /// A single-qubit operator `letter` on `qubit`.
    pub fn single(n: usize, qubit: usize, letter: Pauli) -> Result<Self, PauliError> {
        Self::uniform(n, &[qubit], letter)
    }

    /// `letter` on every qubit in `qubits` (repeats cancel pairwise), sign `+1`.
    pub fn uniform(n: usize, qubits: &[usize], letter: Pauli) -> Result<Self, PauliError> {
        if n == 0 {
            return Err(PauliError::InvalidSize);
        }
        let mut op = Self::identity(n);
        let (xb, zb) = letter.bits();
        for &q in qubits {
            if q >= n {
                return Err(PauliError::IndexOutOfRange { index: q, n });
            }
            let (w, b) = (q / WORD_BITS, q % WORD_BITS);
            if xb {
                op.x[w] ^= 1 << b;
            }
            if zb {
                op.z[w] ^= 1 << b;
            }
        }
        Ok(op)
    }

    pub fn x_type(n: usize, qubits: &[usize]) -> Result<Self, PauliError> {
        Self::uniform(n, qubits, Pauli::X)
    }

    pub fn z_type(n: usize, qubits: &[usize]) -> Result<Self, PauliError> {
        Self::uniform(n, qubits, Pauli::Z)
    }

    pub(crate) fn from_parts(n: usize, x: Vec<u64>, z: Vec<u64>, sign: Sign) -> Self {
        debug_assert_eq!(x.len(), words_for(n));
        debug_assert_eq!(z.len(), words_for(n));
        Self { n, x, z, sign }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self
    }

    pub fn negated(self) -> Self {
        let s = self.sign.flipped();
        self.with_sign(s)
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let (w, b) = (qubit / WORD_BITS, qubit % WORD_BITS);
        Pauli::from_bits(self.x[w] >> b & 1 == 1, self.z[w] >> b & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, letter: Pauli) -> Result<(), PauliError> {
        if qubit >= self.n {
            return Err(PauliError::IndexOutOfRange { index: qubit, n: self.n });
        }
        let (w, b) = (qubit / WORD_BITS, qubit % WORD_BITS);
        let (xb, zb) = letter.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
        Ok(())
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Same Pauli letters on every qubit, ignoring the sign.
    pub fn same_letters(&self, other: &PauliOperator) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    /// Qubits on which the operator acts non-trivially, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (x, z)) in self.x.iter().zip(&self.z).enumerate() {
            let mut bits = x | z;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(w * WORD_BITS + b);
                bits &= bits - 1;
            }
        }
        out
    }

    fn check_dims(&self, other: &PauliOperator) -> Result<(), PauliError> {
        if self.n != other.n {
            return Err(PauliError::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// `true` iff the symplectic inner product vanishes. Signs are ignored.
    pub fn commutes(&self, other: &PauliOperator) -> Result<bool, PauliError> {
        self.check_dims(other)?;
        Ok(!symplectic_parity(&self.x, &self.z, &other.x, &other.z))
    }

    /// The operator product `self * other`. Only defined for commuting
    /// operators, whose product is again Hermitian.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator, PauliError> {
        self.check_dims(other)?;
        let phase = product_phase(&self.x, &self.z, &other.x, &other.z);
        if phase & 1 == 1 {
            return Err(PauliError::NonHermitianProduct);
        }
        let negative = self.sign.is_negative() ^ other.sign.is_negative() ^ (phase == 2);
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        Ok(PauliOperator { n: self.n, x, z, sign: Sign::from_bit(negative) })
    }

    /// Bit `col` of the concatenated `x | z` planes (`0..2n`).
    #[inline]
    pub(crate) fn column_bit(&self, col: usize) -> bool {
        let (plane, q) = if col < self.n { (&self.x, col) } else { (&self.z, col - self.n) };
        plane[q / WORD_BITS] >> (q % WORD_BITS) & 1 == 1
    }

    /// Indices of the words where the operator has any support.
    pub(crate) fn active_words(&self) -> Vec<usize> {
        (0..self.x.len()).filter(|&w| self.x[w] | self.z[w] != 0).collect()
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign.is_negative() { '-' } else { '+' };
        write!(f, "{s}")?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;

    /// Parses `[+-]?[IXYZ_]+`, e.g. `-XIZ` or `XX`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (sign, body) = match s.as_bytes().first() {
            Some(b'+') => (Sign::Plus, &s[1..]),
            Some(b'-') => (Sign::Minus, &s[1..]),
            _ => (Sign::Plus, s),
        };
        if body.is_empty() {
            return Err(PauliError::Parse("empty operator".into()));
        }
        let n = body.chars().count();
        let mut op = PauliOperator::identity(n);
        for (q, c) in body.chars().enumerate() {
            let letter = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(PauliError::Parse(format!("unexpected character {other:?}"))),
            };
            op.set(q, letter)?;
        }
        Ok(op.with_sign(sign))
    }
}

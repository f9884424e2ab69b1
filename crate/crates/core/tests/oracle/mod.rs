//! Brute-force references for small stabilizer states: a dense state vector
//! and enumeration of the whole stabilizer group.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

use tricode_core::{Pauli, PauliOperator, Sign, Tableau};

/// Random non-identity Pauli operator with sign `+`.
pub fn random_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliOperator {
    loop {
        let mut p = PauliOperator::identity(n);
        for q in 0..n {
            let letter = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)];
            p.set(q, letter).unwrap();
        }
        if !p.is_identity() {
            return p;
        }
    }
}

/// Dense `2^n` amplitude vector; qubit `q` is bit `q` of the basis index.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub n: usize,
    pub amp: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`, the `+1` eigenstate of every `Z_q`.
    pub fn zeros(n: usize) -> Self {
        let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
        amp[0] = Complex64::new(1.0, 0.0);
        Self { n, amp }
    }

    /// `P |psi>` with `Y = iXZ`.
    pub fn apply(&self, p: &PauliOperator) -> Vec<Complex64> {
        let mut flip = 0usize;
        for q in 0..self.n {
            if matches!(p.get(q), Pauli::X | Pauli::Y) {
                flip |= 1 << q;
            }
        }
        let sign = if p.sign() == Sign::Minus { -1.0 } else { 1.0 };
        let mut out = vec![Complex64::new(0.0, 0.0); self.amp.len()];
        for (b, a) in self.amp.iter().enumerate() {
            let mut phase = Complex64::new(sign, 0.0);
            for q in 0..self.n {
                let bit = (b >> q) & 1 == 1;
                match p.get(q) {
                    Pauli::I | Pauli::X => {}
                    Pauli::Z if bit => phase = -phase,
                    Pauli::Z => {}
                    // Y|0> = i|1>, Y|1> = -i|0>
                    Pauli::Y => phase *= if bit { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) },
                }
            }
            out[b ^ flip] += phase * a;
        }
        out
    }

    /// `<psi|P|psi>`.
    pub fn expectation(&self, p: &PauliOperator) -> f64 {
        let pa = self.apply(p);
        self.amp.iter().zip(&pa).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
    }

    /// Projects onto the `outcome` eigenspace of `p` and renormalizes.
    /// Returns the Born probability of that outcome.
    pub fn project(&mut self, p: &PauliOperator, outcome: Sign) -> f64 {
        let s = if outcome == Sign::Minus { -1.0 } else { 1.0 };
        let pa = self.apply(p);
        for (a, b) in self.amp.iter_mut().zip(&pa) {
            *a = (*a + s * b) * 0.5;
        }
        let norm2: f64 = self.amp.iter().map(|a| a.norm_sqr()).sum();
        if norm2 > 0.0 {
            let k = 1.0 / norm2.sqrt();
            self.amp.iter_mut().for_each(|a| *a *= k);
        }
        norm2
    }

    /// `Tr rho_A^2` of the reduced state on `qubits`.
    pub fn purity(&self, qubits: &[usize]) -> f64 {
        let rest: Vec<usize> = (0..self.n).filter(|q| !qubits.contains(q)).collect();
        let (da, db) = (1usize << qubits.len(), 1usize << rest.len());
        let index = |ia: usize, ib: usize| {
            let mut b = 0;
            for (k, &q) in qubits.iter().enumerate() {
                b |= ((ia >> k) & 1) << q;
            }
            for (k, &q) in rest.iter().enumerate() {
                b |= ((ib >> k) & 1) << q;
            }
            b
        };
        // rho_A[i][j] = sum_b psi(i, b) conj(psi(j, b))
        let mut rho = vec![Complex64::new(0.0, 0.0); da * da];
        for i in 0..da {
            for j in 0..da {
                rho[i * da + j] = (0..db).map(|b| self.amp[index(i, b)] * self.amp[index(j, b)].conj()).sum();
            }
        }
        rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Entropy in bits from the purity; exact for stabilizer states, whose
    /// reduced spectra are flat.
    pub fn entropy_bits(&self, qubits: &[usize]) -> f64 {
        -self.purity(qubits).log2()
    }
}

/// Symplectic vector `(x | z)` of a Pauli operator.
fn bits(p: &PauliOperator) -> (Vec<bool>, Vec<bool>) {
    let n = p.n_qubits();
    let x = (0..n).map(|q| matches!(p.get(q), Pauli::X | Pauli::Y)).collect();
    let z = (0..n).map(|q| matches!(p.get(q), Pauli::Z | Pauli::Y)).collect();
    (x, z)
}

/// `2^-n` times the sum over all `2^n` stabilizer-group elements of `+1`
/// for elements commuting with `o` and `-1` otherwise, which is
/// `Tr[rho o rho o]` for the pure state. Elements are visited in Gray-code
/// order.
pub fn renyi2_by_enumeration(t: &Tableau, o: &PauliOperator) -> f64 {
    let n = t.n_qubits();
    let gens: Vec<(Vec<bool>, Vec<bool>)> = t.generators().map(|g| bits(&g)).collect();
    let (ox, oz) = bits(o);
    let mut cur_x = vec![false; n];
    let mut cur_z = vec![false; n];
    let mut total: i64 = 0;
    for k in 0u64..(1u64 << n) {
        if k > 0 {
            let g = &gens[k.trailing_zeros() as usize];
            for q in 0..n {
                cur_x[q] ^= g.0[q];
                cur_z[q] ^= g.1[q];
            }
        }
        let anti = (0..n).filter(|&q| (cur_x[q] && oz[q]) ^ (cur_z[q] && ox[q])).count() % 2 == 1;
        total += if anti { -1 } else { 1 };
    }
    total as f64 / (1u64 << n) as f64
}

/// Rank over GF(2) of symplectic vectors.
pub fn gf2_rank(ops: &[PauliOperator]) -> usize {
    let mut rows: Vec<Vec<bool>> = ops
        .iter()
        .map(|p| {
            let (mut x, z) = bits(p);
            x.extend(z);
            x
        })
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let src = rows[rank].clone();
                rows[r].iter_mut().zip(&src).for_each(|(a, b)| *a ^= *b);
            }
        }
        rank += 1;
    }
    rank
}

/// Summary of one random-circuit comparison.
#[derive(Debug, Default, Clone, Copy)]
pub struct OracleTally {
    pub circuits: usize,
    pub entropy_checks: usize,
    pub renyi_checks: usize,
    pub mismatches: usize,
}

/// Random measurement circuit on `n <= 6` qubits from `|0...0>`, checked
/// step by step against the state vector: Born probabilities, entropies of
/// every non-empty subset, and `renyi2` against `<P>^2`.
pub fn dense_circuit_check<R: Rng>(n: usize, depth: usize, rng: &mut R, tally: &mut OracleTally) {
    let mut t = Tableau::product_state(n, tricode_core::Basis::Z, Sign::Plus).unwrap();
    let mut psi = StateVector::zeros(n);
    for _ in 0..depth {
        let p = random_pauli(n, rng);
        let out = t.measure(&p, rng).unwrap();
        let prob = psi.project(&p, out.value);
        let expected = if out.deterministic { 1.0 } else { 0.5 };
        if (prob - expected).abs() > 1e-9 {
            tally.mismatches += 1;
        }
    }
    for mask in 1usize..(1 << n) {
        let qubits: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        let s = t.entanglement_entropy(&qubits).unwrap() as f64;
        tally.entropy_checks += 1;
        if (psi.entropy_bits(&qubits) - s).abs() > 1e-9 {
            tally.mismatches += 1;
        }
    }
    for _ in 0..8 {
        let o = random_pauli(n, rng);
        let r = tricode_core::observables::renyi2(&t, &o).unwrap() as f64;
        tally.renyi_checks += 1;
        if (psi.expectation(&o).powi(2) - r).abs() > 1e-9 {
            tally.mismatches += 1;
        }
    }
    tally.circuits += 1;
}

/// Random measurement circuit on `n <= 10` qubits; `renyi2` of random
/// operators against group enumeration.
pub fn enumeration_circuit_check<R: Rng>(n: usize, depth: usize, rng: &mut R, tally: &mut OracleTally) {
    let mut t = Tableau::product_state(n, tricode_core::Basis::X, Sign::Plus).unwrap();
    for _ in 0..depth {
        let p = random_pauli(n, rng);
        t.measure(&p, rng).unwrap();
    }
    for _ in 0..4 {
        let o = random_pauli(n, rng);
        let r = tricode_core::observables::renyi2(&t, &o).unwrap() as f64;
        tally.renyi_checks += 1;
        if renyi2_by_enumeration(&t, &o) != r {
            tally.mismatches += 1;
        }
    }
    // Generators themselves always give 1.
    let g = t.generator(rng.gen_range(0..n));
    tally.renyi_checks += 1;
    if renyi2_by_enumeration(&t, &g) != 1.0 {
        tally.mismatches += 1;
    }
    tally.circuits += 1;
}

//! Seeded random ensembles for tests, examples and benchmarks.

use rand::Rng;

use crate::linalg::{DenseOperator, C64};
use crate::pauli::{all_words, PauliLabel, SymbolicHamiltonian};

/// Hermitian Hamiltonian whose non-identity coefficients are uniform in the
/// unit square before symmetrization, normalized to `Σ|c|² = 1`.
pub fn random_hamiltonian<R: Rng>(rng: &mut R, d: u32, n: usize) -> SymbolicHamiltonian {
    random_filtered(rng, d, n, |_| true)
}

/// Random Hamiltonian restricted to words accepted by `keep`.
pub fn random_filtered<R: Rng>(
    rng: &mut R,
    d: u32,
    n: usize,
    keep: impl Fn(&[PauliLabel]) -> bool,
) -> SymbolicHamiltonian {
    let mut h = SymbolicHamiltonian::new(d, n);
    for w in all_words(n, d) {
        if w.iter().all(|l| l.is_identity()) || !keep(&w) {
            continue;
        }
        h.add_term(w, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    normalized(h.hermitian_part())
}

/// Random two-qudit Hamiltonian with a nonzero coupling.
pub fn random_entangling<R: Rng>(rng: &mut R, d: u32) -> SymbolicHamiltonian {
    loop {
        let h = random_hamiltonian(rng, d, 2);
        if !h.coupling_part().is_empty() {
            return h;
        }
    }
}

/// Every one- and two-body word, all-to-all.
pub fn random_two_body<R: Rng>(rng: &mut R, d: u32, n: usize) -> SymbolicHamiltonian {
    random_filtered(rng, d, n, |w| crate::pauli::support_of(w).len() <= 2)
}

/// Only nearest-neighbour couplings along a path `0 - 1 - … - (n−1)`.
pub fn random_chain<R: Rng>(rng: &mut R, d: u32, n: usize) -> SymbolicHamiltonian {
    random_filtered(rng, d, n, |w| {
        let s = crate::pauli::support_of(w);
        s.len() == 1 || (s.len() == 2 && s[1] == s[0] + 1)
    })
}

pub fn normalized(h: SymbolicHamiltonian) -> SymbolicHamiltonian {
    let norm: f64 = h.terms().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        h
    } else {
        h.scale(1.0 / norm)
    }
}

/// Dense Hermitian matrix with entries uniform in the unit square.
pub fn random_hermitian_dense<R: Rng>(rng: &mut R, dim: usize) -> DenseOperator {
    let a = DenseOperator::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + &a.adjoint()).scale_real(0.5)
}

/// Traceless version of [`random_hermitian_dense`].
pub fn random_traceless_hermitian<R: Rng>(rng: &mut R, dim: usize) -> DenseOperator {
    let a = random_hermitian_dense(rng, dim);
    let shift = a.trace() / dim as f64;
    &a - &DenseOperator::identity(dim).scale(shift)
}

/// `exp(−3iA)` for a random Hermitian `A`.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> DenseOperator {
    let h = random_hermitian_dense(rng, dim);
    crate::linalg::expm_hermitian(&h, 3.0).expect("hermitian")
}

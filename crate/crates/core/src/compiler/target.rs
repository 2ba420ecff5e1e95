//! Splitting an arbitrary two-qudit target into local and product parts.

use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, C64};
use crate::pauli::{all_labels, SymbolicHamiltonian};

/// Hermitian, trace-orthogonal basis of traceless single-qudit operators.
pub fn hermitian_basis(d: u32) -> Vec<DenseOperator> {
    let mut out = Vec::new();
    for w in all_labels(d).filter(|l| !l.is_identity()) {
        let (adj, _) = w.adjoint(d);
        let m = w.matrix(d);
        if adj == w {
            let c = C64::from_polar(1.0, std::f64::consts::PI * (w.j as f64) * (w.k as f64) / d as f64);
            out.push(m.scale(c));
        } else if (w.j, w.k) < (adj.j, adj.k) {
            let md = m.adjoint();
            out.push(&m + &md);
            out.push((&m - &md).scale(C64::new(0.0, 1.0)));
        }
    }
    out
}

/// `tr_0[(σ ⊗ I) K]` for a `D² × D²` operator `K`.
pub fn partial_contract(sigma: &DenseOperator, k: &DenseOperator) -> DenseOperator {
    let d = sigma.dim();
    DenseOperator::from_fn(d, |r, c| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                acc += sigma[(a, b)] * k[(b * d + r, a * d + c)];
            }
        }
        acc
    })
}

/// `K = K_id + K_loc + Σ_μ σ_μ ⊗ J'_μ`.
#[derive(Clone, Debug)]
pub struct TargetSplit {
    pub identity: C64,
    pub local: SymbolicHamiltonian,
    /// `(σ_μ, J'_μ)`, both Hermitian and traceless.
    pub products: Vec<(DenseOperator, DenseOperator)>,
}

pub fn split_target(k: &SymbolicHamiltonian) -> Result<TargetSplit> {
    if k.qudits() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected two qudits, got {}",
            k.qudits()
        )));
    }
    let defect = k.hermiticity_defect();
    if defect > 1e-9 * k.max_abs().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let d = k.dim();
    let k = k.hermitian_part();
    let coupling = k.coupling_part();
    let mut products = Vec::new();
    if !coupling.is_empty() {
        let dense = coupling.reconstruct()?;
        let scale = coupling.max_abs();
        for sigma in hermitian_basis(d) {
            let norm2 = sigma.matmul(&sigma).trace().re;
            let j = partial_contract(&sigma, &dense).scale_real(1.0 / norm2);
            let j = (&j + &j.adjoint()).scale_real(0.5);
            if j.max_abs() > 1e-12 * scale {
                products.push((sigma, j));
            }
        }
    }
    Ok(TargetSplit {
        identity: k.identity_coefficient(),
        local: k.local_part(),
        products,
    })
}

/// Positive `λ` with `K_coupling = λ·H_coupling`, if one exists.
pub fn proportional_coupling(k: &SymbolicHamiltonian, h: &SymbolicHamiltonian) -> Option<f64> {
    let (kc, hc) = (k.coupling_part(), h.coupling_part());
    if hc.is_empty() || kc.is_empty() {
        return None;
    }
    let dot: f64 = hc.terms().map(|(l, c)| (c.conj() * kc.coefficient(l)).re).sum();
    let norm: f64 = hc.terms().map(|(_, c)| c.norm_sqr()).sum();
    let lambda = dot / norm;
    let resid = kc.max_coefficient_diff(&hc.scale(lambda));
    (lambda > 0.0 && resid <= 1e-12 * kc.max_abs()).then_some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliLabel;

    fn label_pair(d: u32, j0: u32, k0: u32, j1: u32, k1: u32) -> Vec<PauliLabel> {
        vec![
            PauliLabel::new(j0 as i64, k0 as i64, d),
            PauliLabel::new(j1 as i64, k1 as i64, d),
        ]
    }

    #[test]
    fn basis_is_hermitian_orthogonal() {
        for d in 2..=5 {
            let b = hermitian_basis(d);
            assert_eq!(b.len(), (d * d - 1) as usize);
            for (i, x) in b.iter().enumerate() {
                assert!(x.hermiticity_defect() < 1e-12);
                assert!(x.trace().norm() < 1e-12);
                for y in &b[i + 1..] {
                    assert!(x.matmul(y).trace().norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn split_reconstructs() {
        let d = 3;
        let mut k = SymbolicHamiltonian::new(d, 2);
        k.add_term(label_pair(d, 1, 0, 0, 1), C64::new(0.4, 0.3));
        k.add_term(label_pair(d, 2, 0, 0, 2), C64::new(0.4, -0.3));
        k.add_term(label_pair(d, 0, 1, 0, 0), C64::new(0.2, 0.1));
        k.add_term(label_pair(d, 0, 2, 0, 0), C64::new(0.2, -0.1));
        k.add_term(label_pair(d, 0, 0, 0, 0), C64::new(0.5, 0.0));
        let split = split_target(&k).unwrap();
        let mut sum = split.local.reconstruct().unwrap();
        sum = &sum + &DenseOperator::identity(9).scale(split.identity);
        for (s, j) in &split.products {
            sum = &sum + &s.kron(j);
        }
        assert!(sum.max_abs_diff(&k.reconstruct().unwrap()) < 1e-12);
    }
}

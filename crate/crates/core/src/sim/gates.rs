//! Single-qudit gates and simultaneous gate layers.

use std::fmt;
use std::sync::Arc;

use crate::clifford::{conjugate_by_layer, CliffordGate};
use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, C64};
use crate::pauli::{all_labels, PauliLabel, SymbolicHamiltonian};

#[derive(Clone, Debug, PartialEq)]
pub enum LocalGate {
    Clifford(CliffordGate),
    Dense(Arc<DenseOperator>),
}

impl LocalGate {
    pub fn identity(d: u32) -> Self {
        LocalGate::Clifford(CliffordGate::identity(d))
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, LocalGate::Clifford(g) if g.is_identity())
    }

    pub fn matrix(&self) -> DenseOperator {
        match self {
            LocalGate::Clifford(g) => g.matrix(),
            LocalGate::Dense(m) => (**m).clone(),
        }
    }

    pub fn inverse(&self) -> LocalGate {
        match self {
            LocalGate::Clifford(g) => LocalGate::Clifford(g.inverse()),
            LocalGate::Dense(m) => LocalGate::Dense(Arc::new(m.adjoint())),
        }
    }

    /// `self` applied first, then `next`.
    pub fn then(&self, next: &LocalGate) -> LocalGate {
        match (self, next) {
            (a, b) if b.is_identity() => a.clone(),
            (a, b) if a.is_identity() => b.clone(),
            (LocalGate::Clifford(a), LocalGate::Clifford(b)) => LocalGate::Clifford(a.then(b)),
            (a, b) => LocalGate::Dense(Arc::new(b.matrix().matmul(&a.matrix()))),
        }
    }

    /// Serialized form: the Clifford grammar, or `U(re,im,...)` row-major.
    pub fn spec(&self) -> String {
        match self {
            LocalGate::Clifford(g) => g.to_string(),
            LocalGate::Dense(m) => {
                let parts: Vec<String> = m.data().iter().map(|z| format!("{},{}", z.re, z.im)).collect();
                format!("U({})", parts.join(","))
            }
        }
    }

    pub fn parse(spec: &str, d: u32) -> Result<LocalGate> {
        let spec = spec.trim();
        if let Some(inner) = spec.strip_prefix("U(").and_then(|s| s.strip_suffix(')')) {
            let nums: Vec<f64> = inner
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidArgument(format!("bad number `{x}` in dense gate")))
                })
                .collect::<Result<_>>()?;
            let du = d as usize;
            if nums.len() != 2 * du * du {
                return Err(Error::NonLocalGate(format!(
                    "dense gate has {} entries, expected {}",
                    nums.len() / 2,
                    du * du
                )));
            }
            let data = nums.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
            let m = DenseOperator::from_row_major(du, data)?;
            if m.unitarity_defect() > 1e-8 {
                return Err(Error::InvalidArgument("dense gate is not unitary".into()));
            }
            return Ok(LocalGate::Dense(Arc::new(m)));
        }
        Ok(LocalGate::Clifford(CliffordGate::parse(spec, d)?))
    }

    /// Pauli expansion of `U·(X^jZ^k)·U†` for every label, indexed by `j·D + k`.
    fn transfer(&self, d: u32) -> Vec<Vec<(PauliLabel, C64)>> {
        match self {
            LocalGate::Clifford(g) => all_labels(d)
                .map(|l| {
                    let (img, ph) = g.act_on_label(l);
                    vec![(img, ph.to_complex())]
                })
                .collect(),
            LocalGate::Dense(u) => all_labels(d)
                .map(|l| {
                    let conj = u.conjugate(&l.matrix(d));
                    let h = SymbolicHamiltonian::decompose_operator(&conj, d, 1).expect("dimension checked");
                    h.terms()
                        .filter(|(_, c)| c.norm() > 1e-14)
                        .map(|(w, c)| (w[0], *c))
                        .collect()
                })
                .collect(),
        }
    }
}

impl fmt::Display for LocalGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalGate::Clifford(g) => write!(f, "{g}"),
            LocalGate::Dense(_) => write!(f, "U[dense]"),
        }
    }
}

/// One gate per qudit, applied simultaneously.
#[derive(Clone, Debug, PartialEq)]
pub struct GateLayer {
    d: u32,
    gates: Vec<LocalGate>,
}

impl GateLayer {
    pub fn identity(d: u32, n: usize) -> Self {
        Self {
            d,
            gates: vec![LocalGate::identity(d); n],
        }
    }

    pub fn new(d: u32, gates: Vec<LocalGate>) -> Result<Self> {
        for (q, g) in gates.iter().enumerate() {
            match g {
                LocalGate::Clifford(c) if c.dim() != d => {
                    return Err(Error::NonLocalGate(format!("qudit {q}: gate dimension {}", c.dim())));
                }
                LocalGate::Dense(m) if m.dim() != d as usize => {
                    return Err(Error::NonLocalGate(format!(
                        "qudit {q}: {0}x{0} matrix on a {d}-level qudit",
                        m.dim()
                    )));
                }
                _ => {}
            }
        }
        Ok(Self { d, gates })
    }

    pub fn cliffords(gates: Vec<CliffordGate>) -> Self {
        let d = gates.first().map(|g| g.dim()).unwrap_or(2);
        Self::new(d, gates.into_iter().map(LocalGate::Clifford).collect()).expect("uniform dimension")
    }

    /// `gate` on `qudit`, identity elsewhere.
    pub fn single(d: u32, n: usize, qudit: usize, gate: LocalGate) -> Result<Self> {
        let mut gates = vec![LocalGate::identity(d); n];
        gates[qudit] = gate;
        Self::new(d, gates)
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    /// Place gate `i` of `self` on qudit `sites[i]` of an `n_total`-qudit layer.
    pub fn embed(&self, n_total: usize, sites: &[usize]) -> Self {
        assert_eq!(sites.len(), self.gates.len());
        let mut out = Self::identity(self.d, n_total);
        for (g, &s) in self.gates.iter().zip(sites) {
            out.gates[s] = g.clone();
        }
        out
    }

    pub fn qudits(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[LocalGate] {
        &self.gates
    }

    pub fn is_identity(&self) -> bool {
        self.gates.iter().all(LocalGate::is_identity)
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(|g| matches!(g, LocalGate::Clifford(_)))
    }

    pub fn inverse(&self) -> Self {
        Self {
            d: self.d,
            gates: self.gates.iter().map(LocalGate::inverse).collect(),
        }
    }

    pub fn then(&self, next: &GateLayer) -> Self {
        assert_eq!(self.gates.len(), next.gates.len());
        Self {
            d: self.d,
            gates: self.gates.iter().zip(&next.gates).map(|(a, b)| a.then(b)).collect(),
        }
    }

    pub fn set(&mut self, qudit: usize, gate: LocalGate) {
        self.gates[qudit] = gate;
    }

    pub fn dense(&self) -> DenseOperator {
        let mats: Vec<DenseOperator> = self.gates.iter().map(LocalGate::matrix).collect();
        DenseOperator::kron_all(&mats)
    }

    /// `U·H·U†` computed in the Pauli basis.
    pub fn conjugate(&self, h: &SymbolicHamiltonian) -> SymbolicHamiltonian {
        assert_eq!(h.qudits(), self.gates.len());
        if self.is_identity() {
            return h.clone();
        }
        if self.is_clifford() {
            let layer: Vec<CliffordGate> = self
                .gates
                .iter()
                .map(|g| match g {
                    LocalGate::Clifford(c) => c.clone(),
                    LocalGate::Dense(_) => unreachable!(),
                })
                .collect();
            return conjugate_by_layer(h, &layer).pruned();
        }
        let d = self.d;
        let tables: Vec<Option<Vec<Vec<(PauliLabel, C64)>>>> = self
            .gates
            .iter()
            .map(|g| (!g.is_identity()).then(|| g.transfer(d)))
            .collect();
        let mut out = SymbolicHamiltonian::new(d, h.qudits());
        for (labels, c) in h.terms() {
            let mut partial: Vec<(Vec<PauliLabel>, C64)> = vec![(Vec::with_capacity(labels.len()), *c)];
            for (q, l) in labels.iter().enumerate() {
                let images: Vec<(PauliLabel, C64)> = match &tables[q] {
                    None => vec![(*l, C64::new(1.0, 0.0))],
                    Some(t) => t[(l.j * d + l.k) as usize].clone(),
                };
                let mut next = Vec::with_capacity(partial.len() * images.len());
                for (prefix, pc) in &partial {
                    for (img, ic) in &images {
                        let mut p = prefix.clone();
                        p.push(*img);
                        next.push((p, pc * ic));
                    }
                }
                partial = next;
            }
            for (w, v) in partial {
                out.add_term(w, v);
            }
        }
        out.pruned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::Generator;
    use crate::linalg::expm_hermitian;

    #[test]
    fn dense_conjugation_matches_matrix() {
        let d = 3;
        let mut h = SymbolicHamiltonian::new(d, 2);
        h.add_term(
            vec![PauliLabel { j: 1, k: 0 }, PauliLabel { j: 0, k: 1 }],
            C64::new(0.5, 0.2),
        );
        h = h.hermitian_part();
        let gen = DenseOperator::from_fn(3, |r, c| C64::new((r + 2 * c) as f64 * 0.1, 0.0));
        let gen = (&gen + &gen.adjoint()).scale_real(0.5);
        let u = expm_hermitian(&gen, 1.3).unwrap();
        let layer = GateLayer::new(
            d,
            vec![
                LocalGate::Dense(Arc::new(u)),
                LocalGate::Clifford(CliffordGate::fourier(d)),
            ],
        )
        .unwrap();
        let sym = layer.conjugate(&h).reconstruct().unwrap();
        let dense = layer.dense().conjugate(&h.reconstruct().unwrap());
        assert!(sym.max_abs_diff(&dense) < 1e-12);
    }

    #[test]
    fn spec_round_trip() {
        let g = LocalGate::Clifford(CliffordGate::new(5, vec![Generator::Fourier, Generator::Multiplier(2)]).unwrap());
        assert_eq!(LocalGate::parse(&g.spec(), 5).unwrap(), g);
        let u = LocalGate::Dense(Arc::new(CliffordGate::fourier(3).matrix()));
        assert_eq!(LocalGate::parse(&u.spec(), 3).unwrap(), u);
        assert!(LocalGate::parse("U(1,0,0,0)", 2).is_err());
    }

    #[test]
    fn wrong_dimension_rejected() {
        let m = LocalGate::Dense(Arc::new(DenseOperator::identity(4)));
        assert!(matches!(GateLayer::new(2, vec![m]), Err(Error::NonLocalGate(_))));
    }
}

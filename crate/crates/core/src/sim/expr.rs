//! Simulation expressions: what effective Hamiltonian a control sequence
//! realizes, built from the primitive evolution by conjugation, weighted sums
//! and free local terms.

use std::collections::HashMap;
use std::sync::Arc;

use crate::clifford::CliffordGate;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::pauli::{all_words, support_of, PauliLabel, PauliWord, SymbolicHamiltonian};

use super::gates::{GateLayer, LocalGate};

#[derive(Debug)]
pub enum Node {
    /// Evolution under the resource Hamiltonian.
    Primitive,
    /// `U·(body)·U†`.
    Conj { layer: GateLayer, body: SimExpr },
    /// `Σ w_i·body_i`.
    Sum(Vec<(f64, SimExpr)>),
    /// Single-qudit terms, realized by local gates alone.
    Local(SymbolicHamiltonian),
}

/// Shared handle to an expression node. Cloning is cheap and sub-expressions
/// are reused by reference.
#[derive(Clone, Debug)]
pub struct SimExpr(Arc<Node>);

impl SimExpr {
    pub fn primitive() -> Self {
        SimExpr(Arc::new(Node::Primitive))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn key(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &SimExpr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// The zero Hamiltonian: no evolution, no gates.
    pub fn zero(d: u32, n: usize) -> Self {
        SimExpr(Arc::new(Node::Local(SymbolicHamiltonian::new(d, n))))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Local(h) if h.is_empty())
    }

    pub fn conj(layer: GateLayer, body: SimExpr) -> Self {
        if layer.is_identity() {
            return body;
        }
        SimExpr(Arc::new(Node::Conj { layer, body }))
    }

    pub fn conj_clifford(layer: Vec<CliffordGate>, body: SimExpr) -> Self {
        Self::conj(GateLayer::cliffords(layer), body)
    }

    pub fn weighted_sum(terms: Vec<(f64, SimExpr)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("weighted sum needs at least one term".into()));
        }
        if let Some((w, _)) = terms.iter().find(|(w, _)| !w.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite weight {w}")));
        }
        if terms.len() == 1 && terms[0].0 == 1.0 {
            return Ok(terms.into_iter().next().unwrap().1);
        }
        Ok(SimExpr(Arc::new(Node::Sum(terms))))
    }

    /// Purely local Hermitian terms.
    pub fn local(h: SymbolicHamiltonian) -> Result<Self> {
        if let Some((labels, _)) = h.terms().find(|(l, _)| support_of(l).len() != 1) {
            return Err(Error::InvalidArgument(format!(
                "local node term acts on {} qudits",
                support_of(labels).len()
            )));
        }
        let defect = h.hermiticity_defect();
        if defect > 1e-10 * h.max_abs().max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(SimExpr(Arc::new(Node::Local(h))))
    }

    pub fn scaled(&self, w: f64) -> Result<Self> {
        Self::weighted_sum(vec![(w, self.clone())])
    }

    /// Total time under the resource Hamiltonian per unit simulated time.
    pub fn time_cost(&self) -> f64 {
        let mut memo = HashMap::new();
        self.fold(&mut memo, &|node, sub| match node {
            Node::Primitive => 1.0,
            Node::Conj { body, .. } => sub(body),
            Node::Sum(terms) => terms.iter().map(|(w, b)| w.abs() * sub(b)).sum(),
            Node::Local(_) => 0.0,
        })
    }

    /// Number of primitive evolutions in the fully expanded expression.
    pub fn expanded_term_count(&self) -> f64 {
        let mut memo = HashMap::new();
        self.fold(&mut memo, &|node, sub| match node {
            Node::Primitive => 1.0,
            Node::Conj { body, .. } => sub(body),
            Node::Sum(terms) => terms.iter().filter(|(w, _)| *w != 0.0).map(|(_, b)| sub(b)).sum(),
            Node::Local(_) => 0.0,
        })
    }

    /// Count of distinct nodes reachable from `self`.
    pub fn node_count(&self) -> usize {
        let mut memo = HashMap::new();
        self.fold(&mut memo, &|node, sub| match node {
            Node::Primitive | Node::Local(_) => 1.0,
            Node::Conj { body, .. } => sub(body),
            Node::Sum(terms) => terms.iter().map(|(_, b)| sub(b)).sum(),
        });
        memo.len()
    }

    pub fn min_weight(&self) -> f64 {
        let mut memo = HashMap::new();
        self.fold(&mut memo, &|node, sub| match node {
            Node::Primitive | Node::Local(_) => f64::INFINITY,
            Node::Conj { body, .. } => sub(body),
            Node::Sum(terms) => terms.iter().map(|(w, b)| w.min(sub(b))).fold(f64::INFINITY, f64::min),
        })
    }

    fn fold(&self, memo: &mut HashMap<usize, f64>, f: &dyn Fn(&Node, &mut dyn FnMut(&SimExpr) -> f64) -> f64) -> f64 {
        if let Some(v) = memo.get(&self.key()) {
            return *v;
        }
        let v = {
            let mut sub = |e: &SimExpr| e.fold(memo, f);
            f(self.node(), &mut sub)
        };
        memo.insert(self.key(), v);
        v
    }
}

/// Effective Hamiltonian realized by an expression over resource `h`.
pub fn effective_hamiltonian(e: &SimExpr, h: &SymbolicHamiltonian) -> SymbolicHamiltonian {
    let mut memo: HashMap<usize, SymbolicHamiltonian> = HashMap::new();
    effective_rec(e, h, &mut memo)
}

fn effective_rec(
    e: &SimExpr,
    h: &SymbolicHamiltonian,
    memo: &mut HashMap<usize, SymbolicHamiltonian>,
) -> SymbolicHamiltonian {
    if let Some(v) = memo.get(&e.key()) {
        return v.clone();
    }
    let out = match e.node() {
        Node::Primitive => h.clone(),
        Node::Conj { layer, body } => layer.conjugate(&effective_rec(body, h, memo)),
        Node::Sum(terms) => {
            let mut acc = SymbolicHamiltonian::new(h.dim(), h.qudits());
            for (w, b) in terms {
                if *w != 0.0 {
                    acc.accumulate(&effective_rec(b, h, memo), *w);
                }
            }
            acc.pruned()
        }
        Node::Local(l) => l.clone(),
    };
    memo.insert(e.key(), out.clone());
    out
}

fn pauli_layer(labels: &[PauliLabel], d: u32) -> GateLayer {
    GateLayer::new(
        d,
        labels
            .iter()
            .map(|l| LocalGate::Clifford(CliffordGate::pauli(d, *l)))
            .collect(),
    )
    .expect("labels share the dimension")
}

/// Sum of `e` conjugated by every non-identity word on `n` qudits, each with
/// weight one. The effective Hamiltonian is `−J + D^n·tr(J)·I`.
pub fn negate(e: &SimExpr, d: u32, n: usize) -> Result<SimExpr> {
    let terms: Vec<(f64, SimExpr)> = all_words(n, d)
        .into_iter()
        .filter(|w| w.iter().any(|l| !l.is_identity()))
        .map(|w| (1.0, SimExpr::conj(pauli_layer(&w, d), e.clone())))
        .collect();
    SimExpr::weighted_sum(terms)
}

/// Negation together with the identity component it introduces. Fails if the
/// negated expression differs from `−J` by anything other than identity, or
/// the identity component exceeds `bound`.
pub fn negate_checked(e: &SimExpr, h: &SymbolicHamiltonian, bound: f64) -> Result<(SimExpr, C64)> {
    let (d, n) = (h.dim(), h.qudits());
    let neg = negate(e, d, n)?;
    let j = effective_hamiltonian(e, h);
    let got = effective_hamiltonian(&neg, h);
    let mut residual = got.clone();
    residual.accumulate(&j, 1.0);
    let lambda = residual.identity_coefficient();
    let off = residual.without_identity().max_abs();
    let scale = j.max_abs().max(1.0);
    if off > 1e-9 * scale || lambda.norm() > bound + 1e-12 * scale {
        return Err(Error::TraceBookkeeping {
            found: lambda.norm().max(off),
            bound,
        });
    }
    Ok((neg, lambda))
}

/// Rewrite every negative-weight term `w·b` as `|w|·negate(b)`.
pub fn resolve_negations(e: &SimExpr, d: u32, n: usize) -> Result<SimExpr> {
    let mut memo: HashMap<usize, SimExpr> = HashMap::new();
    resolve_rec(e, d, n, &mut memo)
}

fn resolve_rec(e: &SimExpr, d: u32, n: usize, memo: &mut HashMap<usize, SimExpr>) -> Result<SimExpr> {
    if let Some(v) = memo.get(&e.key()) {
        return Ok(v.clone());
    }
    let out = match e.node() {
        Node::Primitive | Node::Local(_) => e.clone(),
        Node::Conj { layer, body } => SimExpr::conj(layer.clone(), resolve_rec(body, d, n, memo)?),
        Node::Sum(terms) => {
            let mut out = Vec::with_capacity(terms.len());
            for (w, b) in terms {
                let rb = resolve_rec(b, d, n, memo)?;
                if *w < 0.0 {
                    out.push((-w, negate(&rb, d, n)?));
                } else {
                    out.push((*w, rb));
                }
            }
            SimExpr(Arc::new(Node::Sum(out)))
        }
    };
    memo.insert(e.key(), out.clone());
    Ok(out)
}

/// Re-express `e` on `n_total` qudits with qudit `i` at `sites[i]`, replacing
/// every primitive by `primitive`.
pub fn embed_expr(e: &SimExpr, n_total: usize, sites: &[usize], primitive: &SimExpr) -> SimExpr {
    let mut memo = HashMap::new();
    embed_rec(e, n_total, sites, primitive, &mut memo)
}

fn embed_rec(
    e: &SimExpr,
    n_total: usize,
    sites: &[usize],
    primitive: &SimExpr,
    memo: &mut HashMap<usize, SimExpr>,
) -> SimExpr {
    if let Some(v) = memo.get(&e.key()) {
        return v.clone();
    }
    let out = match e.node() {
        Node::Primitive => primitive.clone(),
        Node::Conj { layer, body } => SimExpr::conj(
            layer.embed(n_total, sites),
            embed_rec(body, n_total, sites, primitive, memo),
        ),
        Node::Sum(terms) => SimExpr(Arc::new(Node::Sum(
            terms
                .iter()
                .map(|(w, b)| (*w, embed_rec(b, n_total, sites, primitive, memo)))
                .collect(),
        ))),
        Node::Local(h) => SimExpr(Arc::new(Node::Local(h.embed(n_total, sites)))),
    };
    memo.insert(e.key(), out.clone());
    out
}

/// Pauli word conjugation as an expression layer.
pub fn conj_by_word(w: &PauliWord, e: SimExpr) -> SimExpr {
    SimExpr::conj(pauli_layer(&w.labels, w.dim()), e)
}

//! First-order Trotter lowering of expressions to schedules.
//!
//! One slice of length `Δ = t/n` is lowered recursively: a conjugation becomes
//! `U†`-layer, body, `U`-layer; a sum runs its terms in declaration order, each
//! for `w·Δ`; a primitive evolves for `Δ`. Every sub-expression lowered at a
//! given duration becomes one named block, so shared sub-trees are emitted
//! once. The slice block is then repeated `n` times.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::expm_hermitian;
use crate::pauli::{support_of, SymbolicHamiltonian};

use super::expr::{Node, SimExpr};
use super::gates::{GateLayer, LocalGate};
use super::schedule::{push_gates, PulseSchedule, Step};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrotterConfig {
    pub n: usize,
    pub t: f64,
}

impl TrotterConfig {
    pub fn new(t: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("slice count must be at least 1".into()));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "simulation time must be positive, got {t}"
            )));
        }
        Ok(Self { n, t })
    }

    pub fn delta(&self) -> f64 {
        self.t / self.n as f64
    }
}

/// Exact gate layer `exp(−iτ·h)` for purely local `h`.
pub fn local_evolution_layer(h: &SymbolicHamiltonian, tau: f64) -> Result<GateLayer> {
    let (d, n) = (h.dim(), h.qudits());
    let mut layer = GateLayer::identity(d, n);
    for q in 0..n {
        let part = h.filter(|l| support_of(l) == [q]);
        if part.is_empty() {
            continue;
        }
        let single = part.restrict(&[q]);
        let u = expm_hermitian(&single.reconstruct()?, tau)?;
        layer.set(q, LocalGate::Dense(std::sync::Arc::new(u)));
    }
    Ok(layer)
}

struct Lowerer {
    sched: PulseSchedule,
    memo: HashMap<(usize, u64), usize>,
}

fn append(out: &mut Vec<Step>, steps: Vec<Step>) {
    for s in steps {
        match s {
            Step::Gates(l) => push_gates(out, &l),
            other => out.push(other),
        }
    }
}

impl Lowerer {
    fn steps_for(&mut self, e: &SimExpr, tau: f64) -> Result<Vec<Step>> {
        let mut out = Vec::new();
        match e.node() {
            Node::Primitive => out.push(Step::Evolve(tau)),
            Node::Local(h) => {
                if !h.is_empty() && tau != 0.0 {
                    push_gates(&mut out, &local_evolution_layer(h, tau)?);
                }
            }
            Node::Conj { layer, body } => {
                push_gates(&mut out, &layer.inverse());
                let inner = self.reference(body, tau)?;
                append(&mut out, inner);
                push_gates(&mut out, layer);
            }
            Node::Sum(terms) => {
                for (w, b) in terms {
                    if *w < 0.0 {
                        return Err(Error::NegativeWeight(*w));
                    }
                    if *w == 0.0 {
                        continue;
                    }
                    let inner = self.reference(b, w * tau)?;
                    append(&mut out, inner);
                }
            }
        }
        Ok(out)
    }

    fn reference(&mut self, e: &SimExpr, tau: f64) -> Result<Vec<Step>> {
        let inline = match e.node() {
            Node::Primitive | Node::Local(_) => true,
            Node::Conj { body, .. } => matches!(body.node(), Node::Primitive),
            Node::Sum(_) => false,
        };
        if inline {
            return self.steps_for(e, tau);
        }
        let key = (e.key(), tau.to_bits());
        if let Some(id) = self.memo.get(&key) {
            return Ok(vec![Step::Call(*id)]);
        }
        let steps = self.steps_for(e, tau)?;
        let name = format!("b{}", self.sched.blocks.len());
        let id = self.sched.add_block(name, steps);
        self.memo.insert(key, id);
        Ok(vec![Step::Call(id)])
    }
}

/// Lower `e` for `n` slices of total time `t` on `n_qudits` qudits of dimension `d`.
pub fn lower(e: &SimExpr, d: u32, n_qudits: usize, cfg: TrotterConfig) -> Result<PulseSchedule> {
    let w = e.min_weight();
    if w < 0.0 {
        return Err(Error::NegativeWeight(w));
    }
    let mut lw = Lowerer {
        sched: PulseSchedule::empty(d, n_qudits),
        memo: HashMap::new(),
    };
    lw.sched.t = cfg.t;
    lw.sched.slices = cfg.n;
    let slice = lw.steps_for(e, cfg.delta())?;
    let id = lw.sched.add_block("slice", slice);
    lw.sched.steps.push(Step::Repeat {
        count: cfg.n,
        block: id,
    });
    Ok(lw.sched)
}

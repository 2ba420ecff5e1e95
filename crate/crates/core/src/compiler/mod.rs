//! Compiling arbitrary two-qudit Hamiltonians over a fixed entangling resource.

pub mod pipeline;
pub mod target;

use std::fmt;

use crate::clifford::{peg_reduce, CliffordGate};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::modular::{gcd, inv_mod, is_prime};
use crate::pauli::{PauliLabel, PauliWord, SymbolicHamiltonian};
use crate::sim::expr::conj_by_word;
use crate::sim::{effective_hamiltonian, lower, GateLayer, PulseSchedule, SimExpr, TrotterConfig};

pub use pipeline::{
    beta_vector, find_coupling, h8_expr, kappa_expr, plan_kappa, product_decompositions, step1_secure_zz,
    step2_diagonal_twirl, step3_power_filter, step4_pair_isolation, step6_product, CouplingParams, GammaVector,
    KappaPlan, Pipeline,
};
pub use target::{hermitian_basis, proportional_coupling, split_target, TargetSplit};

/// Snapshot of one stage with its structural certification residual.
#[derive(Clone, Debug)]
pub struct StageRecord {
    pub name: &'static str,
    pub expr: SimExpr,
    pub hamiltonian: SymbolicHamiltonian,
    pub residual: f64,
}

#[derive(Clone, Debug, Default)]
pub struct CompilationTrace {
    pub coupling: Option<PauliWord>,
    pub params: Option<CouplingParams>,
    pub gamma: Option<GammaVector>,
    pub stages: Vec<StageRecord>,
    pub kappa_plans: Vec<KappaPlan>,
    /// Coupling pairs realized directly from stage 6.
    pub pair_terms: usize,
    /// `(σ, J')` products realized through stage 8.
    pub product_terms: usize,
    /// `K_coupling = λ·H_coupling` shortcut.
    pub proportional: Option<f64>,
    pub dropped_identity: f64,
    /// Largest coefficient difference between the compiled effective
    /// Hamiltonian and the target, identity excluded.
    pub final_residual: f64,
    pub time_cost: f64,
    pub expanded_terms: f64,
}

impl CompilationTrace {
    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn max_stage_residual(&self) -> f64 {
        self.stages.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    pub fn degenerate_kappa(&self) -> bool {
        self.kappa_plans.iter().any(|p| p.degenerate)
    }
}

impl fmt::Display for CompilationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(w) = &self.coupling {
            let labels: Vec<String> = w.labels.iter().map(|l| l.to_string()).collect();
            writeln!(f, "coupling {}", labels.join(" ⊗ "))?;
        }
        if let Some(p) = &self.params {
            writeln!(
                f,
                "params a={} b={} c={} d={} f={} l={} m={}",
                p.a, p.b, p.c, p.dd, p.f, p.l, p.m
            )?;
        }
        if let Some(g) = &self.gamma {
            let e: Vec<String> = g.entries.iter().map(|x| format!("{x:.6}")).collect();
            writeln!(
                f,
                "gamma [{}] offset {:.6} max_imag {:.2e}",
                e.join(", "),
                g.offset,
                g.max_imag
            )?;
        }
        for s in &self.stages {
            writeln!(
                f,
                "stage {} terms {} residual {:.2e}",
                s.name,
                s.hamiltonian.len(),
                s.residual
            )?;
        }
        if let Some(l) = self.proportional {
            writeln!(f, "proportional {l:.6}")?;
        }
        writeln!(f, "pair_terms {}", self.pair_terms)?;
        writeln!(f, "product_terms {}", self.product_terms)?;
        writeln!(
            f,
            "kappa_fallback {}",
            self.kappa_plans.iter().filter(|p| p.fallback).count()
        )?;
        writeln!(f, "kappa_degenerate {}", self.degenerate_kappa())?;
        writeln!(f, "time_cost {:.6}", self.time_cost)?;
        writeln!(f, "expanded_terms {}", self.expanded_terms)?;
        writeln!(f, "dropped_identity {:.6e}", self.dropped_identity)?;
        write!(f, "final_residual {:.2e}", self.final_residual)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    /// Realize coupling pairs Clifford-equivalent to the secured `Z^a ⊗ Z^b`
    /// straight from stage 6 instead of through stage 8.
    pub pair_shortcut: bool,
    /// Use the proportional shortcut when `K_coupling = λ·H_coupling`.
    pub proportional_shortcut: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            pair_shortcut: true,
            proportional_shortcut: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Compilation {
    pub expr: SimExpr,
    pub effective: SymbolicHamiltonian,
    pub trace: CompilationTrace,
}

fn residual(got: &SymbolicHamiltonian, want: &SymbolicHamiltonian) -> f64 {
    got.without_identity().max_coefficient_diff(&want.without_identity())
}

/// Structural certification of stages 1–8.
pub fn certify_stages(p: &Pipeline) -> Result<Vec<StageRecord>> {
    let prm = &p.params;
    let d = p.d as i64;
    let alpha = p.resource.coefficient(&p.coupling.labels);
    let h1_ab = p.h1.coefficient(&prm.power_label(prm.f as i64));
    let r1 = (h1_ab.norm() - alpha.norm()).abs();
    let h2_pred = p.h1.filter(|l| l.iter().all(|x| x.j == 0));
    let h3_pred =
        p.h2.filter(|l| (prm.dd as i64 * l[0].k as i64 - prm.c as i64 * l[1].k as i64).rem_euclid(d) == 0);
    let beta = beta_vector(&p.h3, prm);
    let mult = if prm.self_adjoint() { 2.0 } else { 1.0 };
    let mut h4_pred = SymbolicHamiltonian::new(p.d, 2);
    h4_pred.add_term(prm.power_label(prm.f as i64), beta[prm.f as usize] * mult);
    if !prm.self_adjoint() {
        h4_pred.add_term(
            prm.power_label(-(prm.f as i64)),
            beta[(p.d - prm.f) as usize % p.d as usize],
        );
    }
    let (e6, _) = p.h6(C64::new(1.0, 0.0))?;
    let h6 = effective_hamiltonian(&e6, &p.resource);
    let e8 = h8_expr(&e6, p.d)?;
    let h8 = effective_hamiltonian(&e8, &p.resource);
    let stage = |name, expr: &SimExpr, h: &SymbolicHamiltonian, residual| StageRecord {
        name,
        expr: expr.clone(),
        hamiltonian: h.clone(),
        residual,
    };
    Ok(vec![
        stage("H1", &p.e1, &p.h1, r1),
        stage("H2", &p.e2, &p.h2, residual(&p.h2, &h2_pred)),
        stage("H3", &p.e3, &p.h3, residual(&p.h3, &h3_pred)),
        stage("H4", &p.e4, &p.h4, residual(&p.h4, &h4_pred)),
        stage("H6", &e6, &h6, residual(&h6, &p.predicted_h6(C64::new(1.0, 0.0)))),
        stage("H8", &e8, &h8, residual(&h8, &p.predicted_h8()?)),
    ])
}

/// Unit `u` with `u·g ≡ target (mod d)`.
fn unit_multiplier(d: u32, g: u32, target: u32) -> Option<u32> {
    (1..d).find(|&u| gcd(u as i64, d as i64) == 1 && (u as u64 * g as u64) % d as u64 == target as u64)
}

/// Clifford mapping `label` to a phase times `Z^target`, if one exists.
fn clifford_to_power(d: u32, label: PauliLabel, target: u32) -> Result<Option<CliffordGate>> {
    let (gate, g) = peg_reduce(d, label.j, label.k)?;
    let Some(u) = unit_multiplier(d, g, target) else {
        return Ok(None);
    };
    // M(x) sends Z^g to Z^{x⁻¹ g}.
    let x = inv_mod(u as i64, d as i64).expect("unit");
    Ok(Some(if x == 1 {
        gate
    } else {
        gate.then(&CliffordGate::multiplier(d, x)?)
    }))
}

/// Conjugate pairs `{W, W†}` of coupling words, one representative each.
fn coupling_pairs(k: &SymbolicHamiltonian) -> Vec<(Vec<PauliLabel>, C64, bool)> {
    let d = k.dim();
    let mut out = Vec::new();
    for (labels, c) in k.coupling_part().terms() {
        let adj: Vec<PauliLabel> = labels.iter().map(|l| l.adjoint(d).0).collect();
        if &adj == labels {
            out.push((labels.clone(), *c, true));
        } else if labels < &adj {
            out.push((labels.clone(), *c, false));
        }
    }
    out
}

/// Compile `K` into an expression over the resource `H` on two qudits.
pub fn compile_two_qudit(h: &SymbolicHamiltonian, k: &SymbolicHamiltonian) -> Result<Compilation> {
    compile_two_qudit_with(h, k, CompileOptions::default())
}

pub fn compile_two_qudit_with(
    h: &SymbolicHamiltonian,
    k: &SymbolicHamiltonian,
    opts: CompileOptions,
) -> Result<Compilation> {
    if h.dim() != k.dim() || h.qudits() != 2 || k.qudits() != 2 {
        return Err(Error::InvalidArgument(
            "resource and target must both be two-qudit of equal D".into(),
        ));
    }
    let d = h.dim();
    let split = split_target(k)?;
    let mut trace = CompilationTrace::default();
    let mut terms: Vec<(f64, SimExpr)> = Vec::new();
    let mut local = split.local.clone();

    let lambda = if opts.proportional_shortcut {
        proportional_coupling(k, h)
    } else {
        None
    };
    if let Some(lambda) = lambda {
        trace.proportional = Some(lambda);
        terms.push((lambda, SimExpr::primitive()));
        local = local.sub(&h.local_part().scale(lambda)).pruned();
    } else if !split.products.is_empty() {
        let pipe = Pipeline::build(h)?;
        trace.coupling = Some(pipe.coupling.clone());
        trace.params = Some(pipe.params);
        trace.gamma = Some(pipe.gamma.clone());
        trace.stages = certify_stages(&pipe)?;
        let prm = pipe.params;
        let target_k = k.hermitian_part();
        let mut rest = SymbolicHamiltonian::new(d, 2);
        for (labels, alpha, sa) in coupling_pairs(&target_k) {
            let gates = if opts.pair_shortcut {
                match (
                    clifford_to_power(d, labels[0], prm.a)?,
                    clifford_to_power(d, labels[1], prm.b)?,
                ) {
                    (Some(g0), Some(g1)) => Some((g0, g1)),
                    _ => None,
                }
            } else {
                None
            };
            let Some((g0, g1)) = gates else {
                rest.add_term(labels.clone(), alpha);
                if !sa {
                    let adj: Vec<PauliLabel> = labels.iter().map(|l| l.adjoint(d).0).collect();
                    rest.add_term(adj.clone(), target_k.coefficient(&adj));
                }
                continue;
            };
            let (_, ph0) = g0.act_on_label(labels[0]);
            let (_, ph1) = g1.act_on_label(labels[1]);
            let phi = ph0.compose(ph1).to_complex();
            let kappa = if sa { alpha * phi * 0.5 } else { alpha * phi };
            let (e6, plan) = pipe.h6(kappa)?;
            trace.kappa_plans.push(plan);
            trace.pair_terms += 1;
            if !e6.is_zero() {
                terms.push((1.0, SimExpr::conj_clifford(vec![g0.inverse(), g1.inverse()], e6)));
            }
        }
        if !rest.is_empty() {
            let rest_split = split_target(&rest)?;
            let e8 = pipe.h8()?;
            trace.kappa_plans.push(pipe.kappa_plan(C64::new(1.0, 0.0))?);
            for (sigma, jp) in &rest_split.products {
                let (dec, decp) = product_decompositions(&prm, sigma, jp)?;
                let e = pipeline::product_from_decompositions(&e8, d, &dec, &decp)?;
                trace.product_terms += 1;
                if !e.is_zero() {
                    terms.push((1.0, e));
                }
            }
        }
    }
    if !local.is_empty() {
        terms.insert(0, (1.0, SimExpr::local(local.hermitian_part())?));
    }
    let expr = if terms.is_empty() {
        SimExpr::zero(d, 2)
    } else {
        SimExpr::weighted_sum(terms)?
    };
    let effective = effective_hamiltonian(&expr, h);
    trace.final_residual = residual(&effective, k);
    trace.dropped_identity = (effective.identity_coefficient() - k.identity_coefficient()).norm();
    trace.time_cost = expr.time_cost();
    trace.expanded_terms = expr.expanded_term_count();
    Ok(Compilation { expr, effective, trace })
}

/// Compile `K`, lower it to `n` slices over time `t`, and return all artifacts.
pub fn compile_full(
    h: &SymbolicHamiltonian,
    k: &SymbolicHamiltonian,
    t: f64,
    n: usize,
) -> Result<(SimExpr, PulseSchedule, CompilationTrace)> {
    let c = compile_two_qudit(h, k)?;
    let mut schedule = lower(&c.expr, h.dim(), 2, TrotterConfig::new(t, n)?)?;
    schedule.dropped_identity = c.trace.dropped_identity * t;
    Ok((c.expr, schedule, c.trace))
}

/// Prime-dimension route to stage 3: secure `Z ⊗ Z` directly and filter with
/// `Σ_l (X^l ⊗ X^{−l}) · (X^{−l} ⊗ X^l)`.
#[derive(Clone, Debug)]
pub struct FastPath {
    pub gates: [CliffordGate; 2],
    pub e1: SimExpr,
    pub e2: SimExpr,
    pub e3: SimExpr,
    pub h3: SymbolicHamiltonian,
}

pub fn prime_fast_path(h: &SymbolicHamiltonian) -> Result<FastPath> {
    let d = h.dim();
    if !is_prime(d) {
        return Err(Error::InvalidArgument(format!(
            "prime fast path needs prime D, got {d}"
        )));
    }
    let coupling = find_coupling(h)?;
    let g0 = clifford_to_power(d, coupling.labels[0], 1)?.expect("prime D");
    let g1 = clifford_to_power(d, coupling.labels[1], 1)?.expect("prime D");
    let e1 = SimExpr::conj_clifford(vec![g0.clone(), g1.clone()], SimExpr::primitive());
    let e2 = step2_diagonal_twirl(&e1, d)?;
    let w = 1.0 / d as f64;
    let terms = (0..d as i64)
        .map(|l| {
            let word = PauliWord::new(vec![PauliLabel::new(l, 0, d), PauliLabel::new(-l, 0, d)], d);
            (w, conj_by_word(&word, e2.clone()))
        })
        .collect();
    let e3 = SimExpr::weighted_sum(terms)?;
    let h3 = effective_hamiltonian(&e3, h);
    Ok(FastPath {
        gates: [g0, g1],
        e1,
        e2,
        e3,
        h3,
    })
}

/// `π(I − SWAP)/2` as a two-qudit Hamiltonian; its evolution for unit time
/// is SWAP up to phase.
pub fn swap_generator(d: u32) -> Result<SymbolicHamiltonian> {
    let du = d as usize;
    let swap = crate::linalg::DenseOperator::from_fn(du * du, |r, c| {
        let (r0, r1) = (r / du, r % du);
        if c == r1 * du + r0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let id = crate::linalg::DenseOperator::identity(du * du);
    let gen = (&id - &swap).scale_real(std::f64::consts::FRAC_PI_2);
    SymbolicHamiltonian::decompose_operator(&gen, d, 2)
}

/// Dense matrix of the resource after a layer, for oracle checks.
pub fn layer_of(gates: &[CliffordGate]) -> GateLayer {
    GateLayer::cliffords(gates.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{execute_schedule, target_unitary, unitary_distance};

    fn lab(j: u32, k: u32) -> PauliLabel {
        PauliLabel { j, k }
    }

    fn xx_resource() -> SymbolicHamiltonian {
        let mut h = SymbolicHamiltonian::new(2, 2);
        h.add_term(vec![lab(1, 0), lab(1, 0)], C64::new(1.0, 0.0));
        h.add_term(vec![lab(0, 1), lab(0, 0)], C64::new(0.3, 0.0));
        h
    }

    fn zz(d: u32) -> SymbolicHamiltonian {
        let mut k = SymbolicHamiltonian::new(d, 2);
        k.add_term(vec![lab(0, 1), lab(0, 1)], C64::new(0.5, 0.0));
        k.add_term(vec![lab(0, d - 1), lab(0, d - 1)], C64::new(0.5, 0.0));
        k.pruned()
    }

    #[test]
    fn qubit_zz_from_xx() {
        let h = xx_resource();
        let k = zz(2);
        let (_, s, trace) = compile_full(&h, &k, 1.0, 256).unwrap();
        assert!(trace.final_residual < 1e-10, "{trace}");
        assert!(trace.max_stage_residual() < 1e-9, "{trace}");
        let u = execute_schedule(&s, &h).unwrap();
        let dist = unitary_distance(&u, &target_unitary(&k, 1.0).unwrap()).unwrap();
        assert!(dist < 1e-2, "{dist}");
    }

    #[test]
    fn proportional_target() {
        let h = xx_resource();
        let c = compile_two_qudit(&h, &h).unwrap();
        assert_eq!(c.trace.proportional, Some(1.0));
        assert!(c.trace.final_residual < 1e-12);
    }

    #[test]
    fn step6_path_matches_target() {
        let mut h = SymbolicHamiltonian::new(3, 2);
        h.add_term(vec![lab(1, 1), lab(1, 0)], C64::new(0.8, 0.1));
        h = h.hermitian_part().scale(2.0);
        h.add_term(vec![lab(0, 1), lab(0, 0)], C64::new(0.2, 0.0));
        h.add_term(vec![lab(0, 2), lab(0, 0)], C64::new(0.2, 0.0));
        let mut k = SymbolicHamiltonian::new(3, 2);
        k.add_term(vec![lab(1, 0), lab(0, 1)], C64::new(0.3, 0.4));
        k.add_term(vec![lab(1, 2), lab(2, 0)], C64::new(-0.2, 0.1));
        let k = k.hermitian_part().scale(2.0);
        for pair_shortcut in [true, false] {
            let opts = CompileOptions {
                pair_shortcut,
                proportional_shortcut: true,
            };
            let c = compile_two_qudit_with(&h, &k, opts).unwrap();
            assert!(c.trace.final_residual < 1e-8, "{}", c.trace);
            assert!(c.expr.min_weight() >= 0.0);
            if !pair_shortcut {
                assert!(c.trace.product_terms > 0);
            }
        }
    }

    #[test]
    fn swap_generator_unitary() {
        for d in 2..=4 {
            let g = swap_generator(d).unwrap();
            let u = target_unitary(&g, 1.0).unwrap();
            let du = d as usize;
            let swap = crate::linalg::DenseOperator::from_fn(du * du, |r, c| {
                if c == (r % du) * du + r / du {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            assert!(unitary_distance(&u, &swap).unwrap() < 1e-10);
        }
    }

    #[test]
    fn fast_path_proportional_to_general() {
        let mut h = SymbolicHamiltonian::new(5, 2);
        h.add_term(vec![lab(2, 3), lab(1, 4)], C64::new(0.7, 0.2));
        h.add_term(vec![lab(0, 2), lab(3, 3)], C64::new(0.3, -0.5));
        h.add_term(vec![lab(1, 1), lab(0, 0)], C64::new(0.4, 0.0));
        let h = h.hermitian_part();
        let fast = prime_fast_path(&h).unwrap();
        let pipe = Pipeline::build(&h).unwrap();
        let mapped = layer_of(&[
            CliffordGate::multiplier(5, pipe.params.a as i64).unwrap(),
            CliffordGate::multiplier(5, pipe.params.b as i64).unwrap(),
        ])
        .conjugate(&pipe.h3);
        assert!(mapped.max_coefficient_diff(&fast.h3) < 1e-12);
        assert!(fast
            .h3
            .terms()
            .all(|(l, _)| l[0].j == 0 && l[1].j == 0 && l[0].k == l[1].k));
    }
}

//! Stage-by-stage construction from an entangling resource to any
//! `J ⊗ J'` product Hamiltonian.
//!
//! Stage expressions are built bottom-up, each wrapping the previous one:
//!
//! | stage | effective Hamiltonian |
//! |-------|-----------------------|
//! | 1 | resource with a secured `Z^a ⊗ Z^b` coupling |
//! | 2 | diagonal part `Σ α_jk Z^j ⊗ Z^k` |
//! | 3 | powers `Σ β_n (Z^c ⊗ Z^d)^n` |
//! | 4 | `β Z^a⊗Z^b + β* Z^{-a}⊗Z^{-b}` |
//! | 6 | `κ Z^a⊗Z^b + κ* Z^{-a}⊗Z^{-b}` for any complex `κ` |
//! | 8 | `(Z^a + Z^{-a}) ⊗ (Z^b + Z^{-b})` |

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::clifford::{peg_reduce, CliffordGate};
use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, C64};
use crate::majorization::{traceless_decompose, UhlmannDecomposition};
use crate::modular::{ext_gcd, gcd, modp};
use crate::pauli::{PauliLabel, PauliPhase, PauliWord, SymbolicHamiltonian};
use crate::sim::expr::conj_by_word;
use crate::sim::{effective_hamiltonian, GateLayer, LocalGate, SimExpr};

/// Exponents carried between stages: `a = f·c`, `b = f·d`, `l·c + m·d ≡ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CouplingParams {
    pub d: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub dd: u32,
    pub f: u32,
    pub l: u32,
    pub m: u32,
}

impl CouplingParams {
    pub fn from_exponents(dim: u32, a: u32, b: u32) -> Result<Self> {
        let (a, b) = (a % dim, b % dim);
        let (c, dd, f) = if b == 0 {
            (1, 0, a)
        } else {
            let g = gcd(a as i64, b as i64) as u32;
            (a / g, b / g, g)
        };
        let e = ext_gcd(c as i64, dd as i64)?;
        if e.g != 1 {
            return Err(Error::NotCoprime {
                l: c as i64,
                m: dd as i64,
                gcd: e.g,
            });
        }
        Ok(Self {
            d: dim,
            a,
            b,
            c,
            dd,
            f,
            l: modp(e.r, dim as i64) as u32,
            m: modp(e.s, dim as i64) as u32,
        })
    }

    /// `Z^{nc} ⊗ Z^{nd}`.
    pub fn power_label(&self, n: i64) -> Vec<PauliLabel> {
        vec![
            PauliLabel::new(0, n * self.c as i64, self.d),
            PauliLabel::new(0, n * self.dd as i64, self.d),
        ]
    }

    /// `(Z^a ⊗ Z^b)` equals its own inverse label.
    pub fn self_adjoint(&self) -> bool {
        (2 * self.a).is_multiple_of(self.d) && (2 * self.b).is_multiple_of(self.d)
    }
}

/// Real solution of `M γ = e_f + e_{−f}` with `M_nj = ω^{nj}`, and the
/// non-negative weights actually emitted.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaVector {
    pub entries: Vec<f64>,
    /// Largest imaginary part of the complex solve before truncation.
    pub max_imag: f64,
    /// Constant added to every entry so all weights are non-negative. It only
    /// changes the identity component.
    pub offset: f64,
}

impl GammaVector {
    pub fn solve(d: u32, f: u32) -> Result<Self> {
        let du = d as usize;
        let mut rhs = vec![C64::new(0.0, 0.0); du];
        rhs[f as usize % du] += 1.0;
        rhs[(du - f as usize % du) % du] += 1.0;
        // M⁻¹ = M*/D.
        let raw: Vec<C64> = (0..du)
            .map(|j| {
                (0..du)
                    .map(|n| Complex64::from_polar(1.0, -2.0 * PI * ((n * j) % du) as f64 / d as f64) * rhs[n])
                    .sum::<C64>()
                    / d as f64
            })
            .collect();
        let max_imag = raw.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if max_imag > 1e-10 {
            return Err(Error::ComplexGamma(max_imag));
        }
        let mut entries: Vec<f64> = raw.iter().map(|z| z.re).collect();
        for j in 1..du {
            let sym = 0.5 * (entries[j] + entries[du - j]);
            entries[j] = sym;
            entries[du - j] = sym;
        }
        let offset = -entries.iter().copied().fold(0.0, f64::min);
        Ok(Self {
            entries,
            max_imag,
            offset,
        })
    }

    pub fn weights(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|g| {
                let w = g + self.offset;
                if w.abs() < 1e-14 {
                    0.0
                } else {
                    w
                }
            })
            .collect()
    }
}

/// The genuine coupling term used to seed the pipeline: the lexicographically
/// smallest among terms within 10% of the largest coupling magnitude.
pub fn find_coupling(h: &SymbolicHamiltonian) -> Result<PauliWord> {
    if h.qudits() != 2 {
        return Err(Error::InvalidArgument(format!(
            "expected two qudits, got {}",
            h.qudits()
        )));
    }
    let couplings: Vec<(&Vec<PauliLabel>, f64)> = h
        .terms()
        .filter(|(l, _)| !l[0].is_identity() && !l[1].is_identity())
        .map(|(l, c)| (l, c.norm()))
        .collect();
    let max = couplings.iter().map(|(_, n)| *n).fold(0.0, f64::max);
    if max <= 1e-12 * h.max_abs().max(1e-300) || couplings.is_empty() {
        return Err(Error::NotEntangling);
    }
    let best = couplings
        .iter()
        .filter(|(_, n)| *n >= 0.9 * max)
        .map(|(l, _)| *l)
        .min_by_key(|l| (l[0].j, l[0].k, l[1].j, l[1].k))
        .expect("max attained");
    Ok(PauliWord::new(best.clone(), h.dim()))
}

/// Conjugation sending the coupling to `Z^a ⊗ Z^b`.
pub fn step1_secure_zz(coupling: &PauliWord) -> Result<(SimExpr, CouplingParams, [CliffordGate; 2])> {
    let d = coupling.dim();
    let (g0, a) = peg_reduce(d, coupling.labels[0].j, coupling.labels[0].k)?;
    let (g1, b) = peg_reduce(d, coupling.labels[1].j, coupling.labels[1].k)?;
    let params = CouplingParams::from_exponents(d, a, b)?;
    let e1 = SimExpr::conj_clifford(vec![g0.clone(), g1.clone()], SimExpr::primitive());
    Ok((e1, params, [g0, g1]))
}

fn word2(d: u32, l0: PauliLabel, l1: PauliLabel) -> PauliWord {
    PauliWord::new(vec![l0, l1], d)
}

/// Average over conjugation by every `Z^l ⊗ Z^m`.
pub fn step2_diagonal_twirl(e1: &SimExpr, d: u32) -> Result<SimExpr> {
    let w = 1.0 / (d * d) as f64;
    let mut terms = Vec::with_capacity((d * d) as usize);
    for l in 0..d {
        for m in 0..d {
            let word = word2(d, PauliLabel { j: 0, k: l }, PauliLabel { j: 0, k: m });
            terms.push((w, conj_by_word(&word, e1.clone())));
        }
    }
    SimExpr::weighted_sum(terms)
}

/// Average over conjugation by `(X^{−d} ⊗ X^{c})^l`.
pub fn step3_power_filter(e2: &SimExpr, p: &CouplingParams) -> Result<SimExpr> {
    let d = p.d;
    let w = 1.0 / d as f64;
    let terms = (0..d as i64)
        .map(|l| {
            let word = word2(
                d,
                PauliLabel::new(-(p.dd as i64) * l, 0, d),
                PauliLabel::new(p.c as i64 * l, 0, d),
            );
            (w, conj_by_word(&word, e2.clone()))
        })
        .collect();
    SimExpr::weighted_sum(terms)
}

/// Coefficients `β_n` of `(Z^c ⊗ Z^d)^n` in a stage-3 Hamiltonian.
pub fn beta_vector(h3: &SymbolicHamiltonian, p: &CouplingParams) -> Vec<C64> {
    (0..p.d as i64).map(|n| h3.coefficient(&p.power_label(n))).collect()
}

/// `Σ_j γ_j (X^{−l} ⊗ X^{−m})^j (·) (X^{l} ⊗ X^{m})^j`, keeping only the
/// `±f` powers.
pub fn step4_pair_isolation(e3: &SimExpr, p: &CouplingParams, beta: &[C64]) -> Result<(SimExpr, GammaVector)> {
    let d = p.d;
    let scale = beta.iter().map(|b| b.norm()).fold(0.0, f64::max);
    if beta[p.f as usize].norm() <= 1e-12 * scale.max(1e-300) {
        return Err(Error::InvalidArgument("stage-3 coefficient β_f vanishes".into()));
    }
    let gamma = GammaVector::solve(d, p.f)?;
    let mut terms = Vec::new();
    for (j, w) in gamma.weights().into_iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let j = j as i64;
        let word = word2(
            d,
            PauliLabel::new(-(p.l as i64) * j, 0, d),
            PauliLabel::new(-(p.m as i64) * j, 0, d),
        );
        terms.push((w, conj_by_word(&word, e3.clone())));
    }
    Ok((SimExpr::weighted_sum(terms)?, gamma))
}

/// Rotations `X^{−r} ⊗ X^{−s}` and non-negative weights realizing a given κ.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaPlan {
    pub kappa: C64,
    /// `(r, s, weight)`.
    pub rotations: Vec<(u32, u32, f64)>,
    /// `ω^a` is real, so `β` and `β ω^a` do not span the complex plane.
    pub degenerate: bool,
    /// The preferred pair `{I, X^{−1} ⊗ I}` could not be used.
    pub fallback: bool,
}

/// Non-negative combination of rotated copies of the stage-4 coefficient
/// `beta4` equal to the stage-6 target.
pub fn plan_kappa(p: &CouplingParams, beta4: C64, kappa: C64) -> Result<KappaPlan> {
    let d = p.d;
    let sa = p.self_adjoint();
    let target = if sa { C64::new(2.0 * kappa.re, 0.0) } else { kappa };
    let degenerate = (2 * p.a).is_multiple_of(d);
    let mut plan = KappaPlan {
        kappa,
        rotations: vec![],
        degenerate,
        fallback: false,
    };
    let scale = beta4.norm().max(target.norm());
    if target.norm() <= 1e-14 * scale.max(1e-300) {
        return Ok(plan);
    }
    // Exponent e = r·a + s·b reachable by X^{−r} ⊗ X^{−s}, first (r, s) found.
    let mut reach: Vec<(u32, (u32, u32))> = Vec::new();
    for s in 0..d {
        for r in 0..d {
            let e = (r * p.a + s * p.b) % d;
            if !reach.iter().any(|(x, _)| *x == e) {
                reach.push((e, (r, s)));
            }
        }
    }
    let value = |e: u32| beta4 * PauliPhase::omega_pow(e as i64, d).to_complex();
    let solve = |e1: u32, e2: u32| -> Option<(f64, f64)> {
        let (v1, v2) = (value(e1), value(e2));
        let det = v1.re * v2.im - v1.im * v2.re;
        if det.abs() < 1e-12 * v1.norm() * v2.norm() {
            return None;
        }
        let x = (target.re * v2.im - target.im * v2.re) / det;
        let y = (v1.re * target.im - v1.im * target.re) / det;
        let tol = -1e-12 * target.norm() / beta4.norm();
        (x >= tol && y >= tol).then_some((x.max(0.0), y.max(0.0)))
    };
    let lookup = |e: u32| reach.iter().find(|(x, _)| *x == e).unwrap().1;
    let push = |plan: &mut KappaPlan, e: u32, w: f64| {
        if w > 1e-15 * target.norm() / beta4.norm() {
            let (r, s) = lookup(e);
            plan.rotations.push((r, s, w));
        }
    };

    if let Some((x, y)) = solve(0, p.a) {
        push(&mut plan, 0, x);
        push(&mut plan, p.a, y);
        return Ok(plan);
    }
    plan.fallback = true;
    // Single ray.
    for (e, _) in &reach {
        let v = value(*e);
        let ratio = target / v;
        if ratio.im.abs() <= 1e-12 * ratio.norm() && ratio.re > 0.0 {
            push(&mut plan, *e, ratio.re);
            return Ok(plan);
        }
    }
    // Adjacent pair in angle with a cone containing the target.
    let mut by_angle: Vec<(f64, u32)> = reach.iter().map(|(e, _)| (value(*e).arg(), *e)).collect();
    by_angle.sort_by(|x, y| x.0.total_cmp(&y.0));
    for i in 0..by_angle.len() {
        let e1 = by_angle[i].1;
        let e2 = by_angle[(i + 1) % by_angle.len()].1;
        if e1 == e2 {
            continue;
        }
        if let Some((x, y)) = solve(e1, e2) {
            push(&mut plan, e1, x);
            push(&mut plan, e2, y);
            return Ok(plan);
        }
    }
    Err(Error::DegenerateKappa(format!("{kappa}")))
}

pub fn rotation_word(d: u32, r: u32, s: u32) -> PauliWord {
    word2(
        d,
        PauliLabel::new(-(r as i64), 0, d),
        PauliLabel::new(-(s as i64), 0, d),
    )
}

pub fn kappa_expr(e4: &SimExpr, plan: &KappaPlan, d: u32) -> Result<SimExpr> {
    if plan.rotations.is_empty() {
        return Ok(SimExpr::zero(d, 2));
    }
    let terms = plan
        .rotations
        .iter()
        .map(|&(r, s, w)| (w, conj_by_word(&rotation_word(d, r, s), e4.clone())))
        .collect();
    SimExpr::weighted_sum(terms)
}

/// `(Z^a + Z^{−a}) ⊗ (Z^b + Z^{−b})` from the unit stage-6 expression.
pub fn h8_expr(e6_unit: &SimExpr, d: u32) -> Result<SimExpr> {
    let flip = GateLayer::cliffords(vec![CliffordGate::identity(d), CliffordGate::multiplier(d, -1)?]);
    SimExpr::weighted_sum(vec![
        (1.0, e6_unit.clone()),
        (1.0, SimExpr::conj(flip, e6_unit.clone())),
    ])
}

/// `Z^a + Z^{−a}` as a dense matrix.
pub fn cosine_operator(d: u32, a: u32) -> DenseOperator {
    let z = PauliLabel { j: 0, k: a % d }.matrix(d);
    &z + &z.adjoint()
}

/// Decompositions of `J` against `Z^a + Z^{−a}` and `J'` against
/// `Z^b + Z^{−b}`.
pub fn product_decompositions(
    p: &CouplingParams,
    j: &DenseOperator,
    jp: &DenseOperator,
) -> Result<(UhlmannDecomposition, UhlmannDecomposition)> {
    Ok((
        traceless_decompose(j, &cosine_operator(p.d, p.a))?,
        traceless_decompose(jp, &cosine_operator(p.d, p.b))?,
    ))
}

fn dense_gate(u: &DenseOperator) -> LocalGate {
    if u.max_abs_diff(&DenseOperator::identity(u.dim())) < 1e-14 {
        LocalGate::identity(u.dim() as u32)
    } else {
        LocalGate::Dense(std::sync::Arc::new(u.clone()))
    }
}

/// `Σ_{nm} c_n c'_m (U_n ⊗ V_m) H8 (U_n ⊗ V_m)†`, i.e. `J ⊗ J'`.
pub fn step6_product(e8: &SimExpr, p: &CouplingParams, j: &DenseOperator, jp: &DenseOperator) -> Result<SimExpr> {
    let (dec, decp) = product_decompositions(p, j, jp)?;
    product_from_decompositions(e8, p.d, &dec, &decp)
}

pub fn product_from_decompositions(
    e8: &SimExpr,
    d: u32,
    dec: &UhlmannDecomposition,
    decp: &UhlmannDecomposition,
) -> Result<SimExpr> {
    if dec.is_empty() || decp.is_empty() {
        return Ok(SimExpr::zero(d, 2));
    }
    let mut terms = Vec::with_capacity(dec.len() * decp.len());
    for (w, u) in dec.weights.iter().zip(&dec.unitaries) {
        for (wp, v) in decp.weights.iter().zip(&decp.unitaries) {
            let layer = GateLayer::new(d, vec![dense_gate(u), dense_gate(v)])?;
            terms.push((w * wp, SimExpr::conj(layer, e8.clone())));
        }
    }
    SimExpr::weighted_sum(terms)
}

/// Stages 1–4 built once for a resource, reusable for any κ and product target.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub d: u32,
    pub resource: SymbolicHamiltonian,
    pub coupling: PauliWord,
    pub step1_gates: [CliffordGate; 2],
    pub params: CouplingParams,
    pub gamma: GammaVector,
    pub e1: SimExpr,
    pub e2: SimExpr,
    pub e3: SimExpr,
    pub e4: SimExpr,
    pub h1: SymbolicHamiltonian,
    pub h2: SymbolicHamiltonian,
    pub h3: SymbolicHamiltonian,
    pub h4: SymbolicHamiltonian,
    /// Coefficient of `Z^a ⊗ Z^b` in stage 4.
    pub beta4: C64,
}

impl Pipeline {
    pub fn build(h: &SymbolicHamiltonian) -> Result<Self> {
        let coupling = find_coupling(h)?;
        let d = h.dim();
        let (e1, params, step1_gates) = step1_secure_zz(&coupling)?;
        let h1 = effective_hamiltonian(&e1, h);
        let e2 = step2_diagonal_twirl(&e1, d)?;
        let h2 = effective_hamiltonian(&e2, h);
        let e3 = step3_power_filter(&e2, &params)?;
        let h3 = effective_hamiltonian(&e3, h);
        let beta = beta_vector(&h3, &params);
        let (e4, gamma) = step4_pair_isolation(&e3, &params, &beta)?;
        let h4 = effective_hamiltonian(&e4, h);
        let beta4 = h4.coefficient(&params.power_label(params.f as i64));
        Ok(Self {
            d,
            resource: h.clone(),
            coupling,
            step1_gates,
            params,
            gamma,
            e1,
            e2,
            e3,
            e4,
            h1,
            h2,
            h3,
            h4,
            beta4,
        })
    }

    pub fn kappa_plan(&self, kappa: C64) -> Result<KappaPlan> {
        plan_kappa(&self.params, self.beta4, kappa)
    }

    /// Stage 6 for the given κ.
    pub fn h6(&self, kappa: C64) -> Result<(SimExpr, KappaPlan)> {
        let plan = self.kappa_plan(kappa)?;
        Ok((kappa_expr(&self.e4, &plan, self.d)?, plan))
    }

    /// Stage 8 built from the unit-κ stage 6.
    pub fn h8(&self) -> Result<SimExpr> {
        let (e6, _) = self.h6(C64::new(1.0, 0.0))?;
        h8_expr(&e6, self.d)
    }

    /// Predicted stage-6 Hamiltonian, identity excluded.
    pub fn predicted_h6(&self, kappa: C64) -> SymbolicHamiltonian {
        let p = &self.params;
        let mut out = SymbolicHamiltonian::new(self.d, 2);
        out.add_term(p.power_label(p.f as i64), kappa);
        out.add_term(p.power_label(-(p.f as i64)), kappa.conj());
        out.pruned()
    }

    /// Predicted stage-8 Hamiltonian.
    pub fn predicted_h8(&self) -> Result<SymbolicHamiltonian> {
        let p = &self.params;
        let dense = cosine_operator(self.d, p.a).kron(&cosine_operator(self.d, p.b));
        SymbolicHamiltonian::decompose_operator(&dense, self.d, 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(j: u32, k: u32) -> PauliLabel {
        PauliLabel { j, k }
    }

    #[test]
    fn coupling_choice() {
        let mut h = SymbolicHamiltonian::new(3, 2);
        h.add_term(vec![lab(1, 0), lab(0, 0)], C64::new(0.1, 0.0));
        h.add_term(vec![lab(2, 0), lab(0, 0)], C64::new(0.1, 0.0));
        h.add_term(vec![lab(1, 1), lab(0, 2)], C64::new(0.9, 0.0));
        h.add_term(vec![lab(2, 2), lab(0, 1)], C64::new(0.9, 0.0));
        let w = find_coupling(&h).unwrap();
        assert_eq!(w.labels, vec![lab(1, 1), lab(0, 2)]);
        let mut local = SymbolicHamiltonian::new(2, 2);
        local.add_term(vec![lab(1, 0), lab(0, 0)], C64::new(1.0, 0.0));
        local.add_term(vec![lab(0, 0), lab(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(find_coupling(&local).unwrap_err(), Error::NotEntangling);
    }

    #[test]
    fn params_d6() {
        let w = PauliWord::new(vec![lab(4, 2), lab(3, 0)], 6);
        let (_, p, _) = step1_secure_zz(&w).unwrap();
        assert_eq!((p.a, p.b), (2, 3));
        assert_eq!((p.c, p.dd, p.f), (2, 3, 1));
        assert_eq!((p.l as i64 * 2 + p.m as i64 * 3).rem_euclid(6), 1);
    }

    #[test]
    fn gamma_qubit() {
        let g = GammaVector::solve(2, 1).unwrap();
        assert_eq!(g.entries, vec![1.0, -1.0]);
        assert_eq!(g.weights(), vec![2.0, 0.0]);
    }

    #[test]
    fn gamma_real_up_to_eight() {
        for d in 2..=8u32 {
            for f in 1..d {
                let g = GammaVector::solve(d, f).unwrap();
                assert!(g.max_imag < 1e-10);
                assert!(g.weights().iter().all(|w| *w >= 0.0));
            }
        }
    }

    #[test]
    fn kappa_preferred_pair() {
        let p = CouplingParams::from_exponents(3, 1, 1).unwrap();
        let beta = C64::new(1.0, 0.0);
        let plan = plan_kappa(&p, beta, C64::new(0.0, 1.0)).unwrap();
        assert!(!plan.fallback);
        let w = PauliPhase::omega_pow(1, 3).to_complex();
        let got: C64 = plan
            .rotations
            .iter()
            .map(|&(r, s, x)| beta * PauliPhase::omega_pow((r * p.a + s * p.b) as i64, 3).to_complex() * x)
            .sum();
        assert!((got - C64::new(0.0, 1.0)).norm() < 1e-12);
        let plan = plan_kappa(&p, beta, w).unwrap();
        assert_eq!(plan.rotations, vec![(1, 0, 1.0)]);
        let plan = plan_kappa(&p, beta, beta).unwrap();
        assert_eq!(plan.rotations, vec![(0, 0, 1.0)]);
    }

    #[test]
    fn kappa_outside_preferred_cone() {
        let p = CouplingParams::from_exponents(3, 1, 1).unwrap();
        let plan = plan_kappa(&p, C64::new(1.0, 0.0), C64::new(-1.0, -0.2)).unwrap();
        assert!(plan.fallback);
        assert!(plan.rotations.iter().all(|r| r.2 >= 0.0));
    }
}

//! Generalized Pauli group on qudits of dimension `D`.
//!
//! `X|z⟩ = |z+1⟩`, `Z|z⟩ = ω^z|z⟩` with `ω = e^{2πi/D}`. Products are kept in
//! normal order `X^j Z^k`. Exact phases live in [`PauliPhase`], which counts
//! half-powers of `ω` so that the even-dimension phase gate stays exact.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{check_dense_limit, DenseOperator, C64, DEFAULT_DENSE_LIMIT};
use crate::modular::modp;

/// `e^{iπ·numerator/D}`, numerator kept in `[0, 2D)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliPhase {
    numerator: u32,
    d: u32,
}

impl PauliPhase {
    pub fn new(numerator: i64, d: u32) -> Self {
        Self {
            numerator: modp(numerator, 2 * d as i64) as u32,
            d,
        }
    }

    pub fn one(d: u32) -> Self {
        Self { numerator: 0, d }
    }

    /// `ω^e` as a phase, i.e. numerator `2e`.
    pub fn omega_pow(e: i64, d: u32) -> Self {
        Self::new(2 * e, d)
    }

    pub fn numerator(&self) -> u32 {
        self.numerator
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn is_one(&self) -> bool {
        self.numerator == 0
    }

    pub fn compose(self, other: Self) -> Self {
        debug_assert_eq!(self.d, other.d);
        Self::new(self.numerator as i64 + other.numerator as i64, self.d)
    }

    pub fn inverse(self) -> Self {
        Self::new(-(self.numerator as i64), self.d)
    }

    pub fn to_complex(&self) -> C64 {
        Complex64::from_polar(1.0, PI * self.numerator as f64 / self.d as f64)
    }
}

impl fmt::Display for PauliPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.numerator.is_multiple_of(2) {
            write!(f, "ω^{}", self.numerator / 2)
        } else {
            write!(f, "ω^({}/2)", self.numerator)
        }
    }
}

/// Exponents of `X^j Z^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliLabel {
    pub j: u32,
    pub k: u32,
}

impl PauliLabel {
    pub const IDENTITY: PauliLabel = PauliLabel { j: 0, k: 0 };

    pub fn new(j: i64, k: i64, d: u32) -> Self {
        Self {
            j: modp(j, d as i64) as u32,
            k: modp(k, d as i64) as u32,
        }
    }

    pub fn x(d: u32) -> Self {
        Self::new(1, 0, d)
    }

    pub fn z(d: u32) -> Self {
        Self::new(0, 1, d)
    }

    pub fn is_identity(&self) -> bool {
        self.j == 0 && self.k == 0
    }

    pub fn checked(j: u32, k: u32, d: u32) -> Result<Self> {
        if j >= d || k >= d {
            return Err(Error::Range(format!("label ({j},{k}) outside [0,{d})")));
        }
        Ok(Self { j, k })
    }

    /// Label of the adjoint together with its phase: `(X^jZ^k)† = ω^{jk} X^{-j}Z^{-k}`.
    pub fn adjoint(&self, d: u32) -> (PauliLabel, PauliPhase) {
        (
            PauliLabel::new(-(self.j as i64), -(self.k as i64), d),
            PauliPhase::omega_pow(self.j as i64 * self.k as i64, d),
        )
    }

    /// `D × D` matrix of `X^j Z^k`.
    pub fn matrix(&self, d: u32) -> DenseOperator {
        let du = d as usize;
        let mut m = DenseOperator::zeros(du);
        for c in 0..du {
            let r = (c + self.j as usize) % du;
            m[(r, c)] = PauliPhase::omega_pow(self.k as i64 * c as i64, d).to_complex();
        }
        m
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.j, self.k) {
            (0, 0) => write!(f, "I"),
            (j, 0) => write!(f, "X^{j}"),
            (0, k) => write!(f, "Z^{k}"),
            (j, k) => write!(f, "X^{j}Z^{k}"),
        }
    }
}

/// Product `p·q` in normal order. The reordering phase is `ω^{k_p j_q}`.
pub fn compose_labels(p: PauliLabel, q: PauliLabel, d: u32) -> (PauliLabel, PauliPhase) {
    let label = PauliLabel::new(p.j as i64 + q.j as i64, p.k as i64 + q.k as i64, d);
    (label, PauliPhase::omega_pow(p.k as i64 * q.j as i64, d))
}

/// Phase `φ` with `p q = φ q p`, equal to `ω^{k_p j_q − j_p k_q}`.
pub fn commutation_phase(p: PauliLabel, q: PauliLabel, d: u32) -> PauliPhase {
    PauliPhase::omega_pow(p.k as i64 * q.j as i64 - p.j as i64 * q.k as i64, d)
}

fn word_commutation_exponent(p: &[PauliLabel], q: &[PauliLabel]) -> i64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| a.k as i64 * b.j as i64 - a.j as i64 * b.k as i64)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliWord {
    pub labels: Vec<PauliLabel>,
    pub phase: PauliPhase,
}

impl PauliWord {
    pub fn new(labels: Vec<PauliLabel>, d: u32) -> Self {
        Self {
            labels,
            phase: PauliPhase::one(d),
        }
    }

    pub fn identity(n: usize, d: u32) -> Self {
        Self::new(vec![PauliLabel::IDENTITY; n], d)
    }

    pub fn dim(&self) -> u32 {
        self.phase.dim()
    }

    /// Single non-identity `label` on `qudit`.
    pub fn single(n: usize, qudit: usize, label: PauliLabel, d: u32) -> Self {
        let mut labels = vec![PauliLabel::IDENTITY; n];
        labels[qudit] = label;
        Self::new(labels, d)
    }

    pub fn with_phase(mut self, phase: PauliPhase) -> Self {
        self.phase = phase;
        self
    }

    pub fn support(&self) -> Vec<usize> {
        support_of(&self.labels)
    }

    /// Phase `φ` with `self·other = φ·other·self`.
    pub fn commutation_phase(&self, other: &[PauliLabel]) -> PauliPhase {
        PauliPhase::omega_pow(word_commutation_exponent(&self.labels, other), self.dim())
    }

    pub fn compose(&self, other: &PauliWord) -> PauliWord {
        let d = self.dim();
        let mut phase = self.phase.compose(other.phase);
        let labels = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(p, q)| {
                let (l, ph) = compose_labels(*p, *q, d);
                phase = phase.compose(ph);
                l
            })
            .collect();
        PauliWord { labels, phase }
    }

    pub fn pow(&self, e: u32) -> PauliWord {
        let mut acc = PauliWord::identity(self.labels.len(), self.dim());
        for _ in 0..e {
            acc = acc.compose(self);
        }
        acc
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.phase.is_one() {
            write!(f, "{}·", self.phase)?;
        }
        let parts: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

pub fn support_of(labels: &[PauliLabel]) -> Vec<usize> {
    labels
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_identity())
        .map(|(i, _)| i)
        .collect()
}

/// Every single-qudit label in lexicographic `(j, k)` order.
pub fn all_labels(d: u32) -> impl Iterator<Item = PauliLabel> {
    (0..d).flat_map(move |j| (0..d).map(move |k| PauliLabel { j, k }))
}

/// Every `n`-qudit label tuple, lexicographic with qudit 0 most significant.
pub fn all_words(n: usize, d: u32) -> Vec<Vec<PauliLabel>> {
    let singles: Vec<PauliLabel> = all_labels(d).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * singles.len());
        for w in &out {
            for l in &singles {
                let mut v = w.clone();
                v.push(*l);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Monomial form of a Pauli word: column `c` maps to row `perm[c]` with
/// entry `value[c]`.
struct Monomial {
    perm: Vec<usize>,
    value: Vec<C64>,
}

fn monomial(labels: &[PauliLabel], d: u32) -> Monomial {
    let du = d as usize;
    let n = labels.len();
    let dim = du.pow(n as u32);
    let mut perm = vec![0usize; dim];
    let mut value = vec![C64::new(0.0, 0.0); dim];
    let roots: Vec<C64> = (0..du)
        .map(|e| PauliPhase::omega_pow(e as i64, d).to_complex())
        .collect();
    for c in 0..dim {
        let mut rem = c;
        let mut row = 0usize;
        let mut stride = 1usize;
        let mut exp = 0usize;
        for q in (0..n).rev() {
            let digit = rem % du;
            rem /= du;
            let l = labels[q];
            row += ((digit + l.j as usize) % du) * stride;
            exp += l.k as usize * digit;
            stride *= du;
        }
        perm[c] = row;
        value[c] = roots[exp % du];
    }
    Monomial { perm, value }
}

/// Dense matrix of a phased Pauli word.
pub fn matrix_of_word(w: &PauliWord, limit: usize) -> Result<DenseOperator> {
    let d = w.dim();
    let dim = (d as usize).pow(w.labels.len() as u32);
    check_dense_limit(dim, limit)?;
    let mono = monomial(&w.labels, d);
    let phase = w.phase.to_complex();
    let mut m = DenseOperator::zeros(dim);
    for c in 0..dim {
        m[(mono.perm[c], c)] = mono.value[c] * phase;
    }
    Ok(m)
}

pub fn matrix_of_labels(labels: &[PauliLabel], d: u32) -> DenseOperator {
    let dim = (d as usize).pow(labels.len() as u32);
    let mono = monomial(labels, d);
    let mut m = DenseOperator::zeros(dim);
    for c in 0..dim {
        m[(mono.perm[c], c)] = mono.value[c];
    }
    m
}

/// Relative prune tolerance applied after symbolic operations.
pub const PRUNE_TOL: f64 = 1e-12;

/// Sparse Pauli expansion `Σ α_w · w` of an operator on `n` qudits.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicHamiltonian {
    d: u32,
    n: usize,
    terms: BTreeMap<Vec<PauliLabel>, C64>,
}

impl SymbolicHamiltonian {
    pub fn new(d: u32, n: usize) -> Self {
        Self {
            d,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(d: u32, n: usize, terms: impl IntoIterator<Item = (Vec<PauliLabel>, C64)>) -> Self {
        let mut h = Self::new(d, n);
        for (labels, c) in terms {
            h.add_term(labels, c);
        }
        h.prune();
        h
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn qudits(&self) -> usize {
        self.n
    }

    pub fn dense_dim(&self) -> usize {
        (self.d as usize).pow(self.n as u32)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<PauliLabel>, &C64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, labels: &[PauliLabel]) -> C64 {
        self.terms.get(labels).copied().unwrap_or_default()
    }

    /// Add `c` to the coefficient of `labels`, without pruning.
    pub fn add_term(&mut self, labels: Vec<PauliLabel>, c: C64) {
        assert_eq!(labels.len(), self.n, "word length must match qudit count");
        *self.terms.entry(labels).or_default() += c;
    }

    /// Add a phased word; the word's phase is folded into the coefficient.
    pub fn add_word(&mut self, w: &PauliWord, c: C64) {
        self.add_term(w.labels.clone(), c * w.phase.to_complex());
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop coefficients below `PRUNE_TOL` relative to the largest.
    pub fn prune(&mut self) {
        let cut = PRUNE_TOL * self.max_abs();
        self.terms.retain(|_, c| c.norm() > cut && c.norm() > 0.0);
    }

    pub fn pruned(mut self) -> Self {
        self.prune();
        self
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            d: self.d,
            n: self.n,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
        }
    }

    /// `self += w·other` without pruning.
    pub fn accumulate(&mut self, other: &Self, w: f64) {
        assert_eq!((self.d, self.n), (other.d, other.n));
        for (k, v) in &other.terms {
            *self.terms.entry(k.clone()).or_default() += v * w;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.accumulate(other, 1.0);
        out.pruned()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.accumulate(other, -1.0);
        out.pruned()
    }

    /// Largest coefficient difference against another expansion.
    pub fn max_coefficient_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, v) in &self.terms {
            worst = worst.max((v - other.coefficient(k)).norm());
        }
        for (k, v) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    pub fn identity_coefficient(&self) -> C64 {
        self.coefficient(&vec![PauliLabel::IDENTITY; self.n])
    }

    pub fn without_identity(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&vec![PauliLabel::IDENTITY; self.n]);
        out
    }

    /// Symbolic adjoint, using `(X^jZ^k)† = ω^{jk}X^{-j}Z^{-k}` per qudit.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::new(self.d, self.n);
        for (labels, c) in &self.terms {
            let mut phase = PauliPhase::one(self.d);
            let adj: Vec<PauliLabel> = labels
                .iter()
                .map(|l| {
                    let (a, ph) = l.adjoint(self.d);
                    phase = phase.compose(ph);
                    a
                })
                .collect();
            out.add_term(adj, c.conj() * phase.to_complex());
        }
        out
    }

    /// Largest coefficient of `H − H†`; zero exactly for Hermitian operators.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_coefficient_diff(&self.adjoint())
    }

    /// `(H + H†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let mut out = self.clone();
        out.accumulate(&self.adjoint(), 1.0);
        out.scale(0.5).pruned()
    }

    pub fn conjugate_by_pauli_word(&self, w: &PauliWord) -> Self {
        assert_eq!(w.labels.len(), self.n);
        let mut out = Self::new(self.d, self.n);
        for (labels, c) in &self.terms {
            let phase = w.commutation_phase(labels);
            out.terms.insert(labels.clone(), c * phase.to_complex());
        }
        out
    }

    /// Group average `(1/|G|) Σ_g g H g†`.
    pub fn twirl(&self, group: &[PauliWord]) -> Self {
        assert!(!group.is_empty(), "twirl group must be nonempty");
        let inv = 1.0 / group.len() as f64;
        let mut out = Self::new(self.d, self.n);
        for (labels, c) in &self.terms {
            let avg: C64 = group
                .iter()
                .map(|g| g.commutation_phase(labels).to_complex())
                .sum::<C64>()
                * inv;
            if avg.norm() > 1e-13 {
                out.terms.insert(labels.clone(), c * avg);
            }
        }
        out.pruned()
    }

    /// Dense realization `Σ α_w · matrix(w)`.
    pub fn to_dense(&self, limit: usize) -> Result<DenseOperator> {
        let dim = self.dense_dim();
        check_dense_limit(dim, limit)?;
        let mut m = DenseOperator::zeros(dim);
        for (labels, c) in &self.terms {
            let mono = monomial(labels, self.d);
            for col in 0..dim {
                m[(mono.perm[col], col)] += mono.value[col] * c;
            }
        }
        Ok(m)
    }

    pub fn reconstruct(&self) -> Result<DenseOperator> {
        self.to_dense(DEFAULT_DENSE_LIMIT)
    }

    /// Pauli expansion of a dense operator, `α_w = tr(w† M) / D^N`.
    pub fn decompose_operator(m: &DenseOperator, d: u32, n: usize) -> Result<Self> {
        let dim = (d as usize).pow(n as u32);
        if m.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.dim(),
            });
        }
        let mut out = Self::new(d, n);
        let inv = 1.0 / dim as f64;
        for labels in all_words(n, d) {
            let mono = monomial(&labels, d);
            let mut acc = C64::new(0.0, 0.0);
            for col in 0..dim {
                acc += mono.value[col].conj() * m[(mono.perm[col], col)];
            }
            if acc.norm() > 0.0 {
                out.terms.insert(labels, acc * inv);
            }
        }
        Ok(out.pruned())
    }

    /// Embed on `n_total` qudits, placing qudit `i` of `self` at `sites[i]`.
    pub fn embed(&self, n_total: usize, sites: &[usize]) -> Self {
        assert_eq!(sites.len(), self.n);
        let mut out = Self::new(self.d, n_total);
        for (labels, c) in &self.terms {
            let mut big = vec![PauliLabel::IDENTITY; n_total];
            for (i, &s) in sites.iter().enumerate() {
                big[s] = labels[i];
            }
            out.add_term(big, *c);
        }
        out
    }

    /// Restrict to words supported inside `sites`, re-indexed in `sites` order.
    pub fn restrict(&self, sites: &[usize]) -> Self {
        let mut out = Self::new(self.d, sites.len());
        for (labels, c) in &self.terms {
            let inside = labels
                .iter()
                .enumerate()
                .all(|(q, l)| l.is_identity() || sites.contains(&q));
            if inside {
                out.add_term(sites.iter().map(|&s| labels[s]).collect(), *c);
            }
        }
        out
    }

    /// Terms acting on at most one qudit, excluding the identity.
    pub fn local_part(&self) -> Self {
        self.filter(|labels| support_of(labels).len() == 1)
    }

    /// Terms acting on at least two qudits.
    pub fn coupling_part(&self) -> Self {
        self.filter(|labels| support_of(labels).len() >= 2)
    }

    pub fn filter(&self, keep: impl Fn(&[PauliLabel]) -> bool) -> Self {
        Self {
            d: self.d,
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    pub fn map_coefficients(&self, f: impl Fn(&[PauliLabel], C64) -> C64) -> Self {
        Self {
            d: self.d,
            n: self.n,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), f(k, *v))).collect(),
        }
        .pruned()
    }
}

impl fmt::Display for SymbolicHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| {
                let w: Vec<String> = k.iter().map(|l| l.to_string()).collect();
                format!("({:.6}{:+.6}i)·{}", v.re, v.im, w.join("⊗"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Every word on `n` qudits as an unphased [`PauliWord`].
pub fn full_pauli_group(n: usize, d: u32) -> Vec<PauliWord> {
    all_words(n, d).into_iter().map(|l| PauliWord::new(l, d)).collect()
}

/// Ditwise group: the same single-qudit label on each qudit of `subset`.
pub fn ditwise_group(n: usize, subset: &[usize], d: u32) -> Vec<PauliWord> {
    all_labels(d)
        .map(|l| {
            let mut labels = vec![PauliLabel::IDENTITY; n];
            for &q in subset {
                labels[q] = l;
            }
            PauliWord::new(labels, d)
        })
        .collect()
}

/// Residual of `Σ_w w J w† = D^n·tr(J)·I` over every `n`-qudit word, in
/// Frobenius norm. `J` must have dimension `D^n`.
pub fn full_pauli_twirl_identity_check(j: &DenseOperator, d: u32, n: usize) -> Result<f64> {
    let dim = (d as usize).pow(n as u32);
    if j.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: j.dim(),
        });
    }
    let mut sum = DenseOperator::zeros(dim);
    for labels in all_words(n, d) {
        let mono = monomial(&labels, d);
        // (W J W†)[p(r), p(c)] = v_r J[r, c] conj(v_c)
        for r in 0..dim {
            for c in 0..dim {
                sum[(mono.perm[r], mono.perm[c])] += mono.value[r] * j[(r, c)] * mono.value[c].conj();
            }
        }
    }
    let expected = DenseOperator::identity(dim).scale(j.trace() * dim as f64);
    Ok((&sum - &expected).frobenius_norm())
}

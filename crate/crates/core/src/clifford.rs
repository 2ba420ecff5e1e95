//! Single-qudit normalizer gates with exact symbolic action on Pauli labels.
//!
//! A [`CliffordGate`] is a list of generators applied left to right, so the
//! unitary is `U = G_n ⋯ G_1`. The action `U (X^jZ^k) U† = φ·X^{j'}Z^{k'}` is
//! tracked exactly, phase included.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, C64};
use crate::modular::{gcd, inv_mod, modp};
use crate::pauli::{PauliLabel, PauliPhase, SymbolicHamiltonian};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `|j⟩ → Σ_k ω^{jk}|k⟩/√D`.
    Fourier,
    FourierInverse,
    /// `ω^{j(j−1)/2}` for odd `D`, `ω^{j²/2}` for even `D`.
    Phase,
    PhaseInverse,
    /// `|j⟩ → |aj⟩` with `gcd(a, D) = 1`.
    Multiplier(u32),
    /// The Pauli operator `X^j Z^k` itself.
    Pauli(u32, u32),
}

impl Generator {
    fn act(&self, p: PauliLabel, d: u32) -> (PauliLabel, PauliPhase) {
        let (j, k) = (p.j as i64, p.k as i64);
        let di = d as i64;
        let even = d.is_multiple_of(2);
        match *self {
            Generator::Fourier => (PauliLabel::new(-k, j, d), PauliPhase::new(-2 * j * k, d)),
            Generator::FourierInverse => (PauliLabel::new(k, -j, d), PauliPhase::new(-2 * j * k, d)),
            Generator::Phase => {
                let num = if even { j * j } else { j * (j - 1) };
                (PauliLabel::new(j, k + j, d), PauliPhase::new(num, d))
            }
            Generator::PhaseInverse => {
                let num = if even { -j * j } else { -j * (j - 1) };
                (PauliLabel::new(j, k - j, d), PauliPhase::new(num, d))
            }
            Generator::Multiplier(a) => {
                let inv = inv_mod(a as i64, di).expect("multiplier validated at construction");
                (PauliLabel::new(a as i64 * j, inv * k, d), PauliPhase::one(d))
            }
            Generator::Pauli(j0, k0) => (p, PauliPhase::omega_pow(k0 as i64 * j - j0 as i64 * k, d)),
        }
    }

    fn inverse(&self, d: u32) -> Generator {
        match *self {
            Generator::Fourier => Generator::FourierInverse,
            Generator::FourierInverse => Generator::Fourier,
            Generator::Phase => Generator::PhaseInverse,
            Generator::PhaseInverse => Generator::Phase,
            Generator::Multiplier(a) => Generator::Multiplier(inv_mod(a as i64, d as i64).expect("validated") as u32),
            Generator::Pauli(j, k) => {
                Generator::Pauli(modp(-(j as i64), d as i64) as u32, modp(-(k as i64), d as i64) as u32)
            }
        }
    }

    pub fn matrix(&self, d: u32) -> DenseOperator {
        let du = d as usize;
        let omega = |e: f64| Complex64::from_polar(1.0, 2.0 * PI * e / d as f64);
        match *self {
            Generator::Fourier => {
                let s = 1.0 / (d as f64).sqrt();
                DenseOperator::from_fn(du, |r, c| omega(((r * c) % du) as f64) * s)
            }
            Generator::FourierInverse => Generator::Fourier.matrix(d).adjoint(),
            Generator::Phase => {
                let diag: Vec<C64> = (0..du)
                    .map(|j| {
                        if d.is_multiple_of(2) {
                            Complex64::from_polar(1.0, PI * ((j * j) % (2 * du)) as f64 / d as f64)
                        } else {
                            omega(((j * j.saturating_sub(1) / 2) % du) as f64)
                        }
                    })
                    .collect();
                DenseOperator::diagonal(&diag)
            }
            Generator::PhaseInverse => Generator::Phase.matrix(d).adjoint(),
            Generator::Multiplier(a) => {
                let mut m = DenseOperator::zeros(du);
                for j in 0..du {
                    m[((a as usize * j) % du, j)] = C64::new(1.0, 0.0);
                }
                m
            }
            Generator::Pauli(j, k) => PauliLabel { j, k }.matrix(d),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Fourier => write!(f, "F"),
            Generator::FourierInverse => write!(f, "F'"),
            Generator::Phase => write!(f, "P"),
            Generator::PhaseInverse => write!(f, "P'"),
            Generator::Multiplier(a) => write!(f, "M({a})"),
            Generator::Pauli(j, k) => write!(f, "W({j},{k})"),
        }
    }
}

/// Images of `X` and `Z` under conjugation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabelAction {
    pub x: (PauliLabel, PauliPhase),
    pub z: (PauliLabel, PauliPhase),
}

impl LabelAction {
    /// Determinant of the induced exponent map mod `D`.
    pub fn determinant(&self, d: u32) -> u32 {
        let (x, z) = (self.x.0, self.z.0);
        modp(x.j as i64 * z.k as i64 - x.k as i64 * z.j as i64, d as i64) as u32
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordGate {
    d: u32,
    generators: Vec<Generator>,
}

impl CliffordGate {
    pub fn identity(d: u32) -> Self {
        Self {
            d,
            generators: Vec::new(),
        }
    }

    pub fn new(d: u32, generators: Vec<Generator>) -> Result<Self> {
        for g in &generators {
            match *g {
                Generator::Multiplier(a) if gcd(a as i64, d as i64) != 1 || a >= d => {
                    return Err(Error::NonCoprimeMultiplier { a, d });
                }
                Generator::Pauli(j, k) if j >= d || k >= d => {
                    return Err(Error::Range(format!("W({j},{k}) outside [0,{d})")));
                }
                _ => {}
            }
        }
        Ok(Self { d, generators })
    }

    pub fn fourier(d: u32) -> Self {
        Self {
            d,
            generators: vec![Generator::Fourier],
        }
    }

    pub fn phase(d: u32) -> Self {
        Self {
            d,
            generators: vec![Generator::Phase],
        }
    }

    pub fn multiplier(d: u32, a: i64) -> Result<Self> {
        Self::new(d, vec![Generator::Multiplier(modp(a, d as i64) as u32)])
    }

    pub fn pauli(d: u32, label: PauliLabel) -> Self {
        if label.is_identity() {
            return Self::identity(d);
        }
        Self {
            d,
            generators: vec![Generator::Pauli(label.j, label.k)],
        }
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_identity(&self) -> bool {
        self.generators.is_empty()
    }

    /// `self` applied first, then `next`.
    pub fn then(&self, next: &CliffordGate) -> CliffordGate {
        assert_eq!(self.d, next.d);
        let mut generators = self.generators.clone();
        generators.extend_from_slice(&next.generators);
        CliffordGate { d: self.d, generators }
    }

    pub fn push(&mut self, g: Generator) {
        self.generators.push(g);
    }

    /// Inverse up to a global phase.
    pub fn inverse(&self) -> CliffordGate {
        CliffordGate {
            d: self.d,
            generators: self.generators.iter().rev().map(|g| g.inverse(self.d)).collect(),
        }
    }

    pub fn act_on_label(&self, p: PauliLabel) -> (PauliLabel, PauliPhase) {
        let mut label = p;
        let mut phase = PauliPhase::one(self.d);
        for g in &self.generators {
            let (l, ph) = g.act(label, self.d);
            label = l;
            phase = phase.compose(ph);
        }
        (label, phase)
    }

    pub fn label_action(&self) -> LabelAction {
        LabelAction {
            x: self.act_on_label(PauliLabel::x(self.d)),
            z: self.act_on_label(PauliLabel::z(self.d)),
        }
    }

    pub fn matrix(&self) -> DenseOperator {
        let mut m = DenseOperator::identity(self.d as usize);
        for g in &self.generators {
            m = g.matrix(self.d).matmul(&m);
        }
        m
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

impl CliffordGate {
    /// Parse the `F.P.M(3).W(1,0)` grammar; `I` is the identity.
    pub fn parse(s: &str, d: u32) -> Result<Self> {
        let s = s.trim();
        if s == "I" || s.is_empty() {
            return Ok(Self::identity(d));
        }
        let mut gens = Vec::new();
        for tok in s.split('.') {
            let tok = tok.trim();
            let g = match tok {
                "F" => Generator::Fourier,
                "F'" => Generator::FourierInverse,
                "P" => Generator::Phase,
                "P'" => Generator::PhaseInverse,
                _ => {
                    let args = |prefix: &str| -> Result<Vec<u32>> {
                        let inner = tok
                            .strip_prefix(prefix)
                            .and_then(|r| r.strip_suffix(')'))
                            .ok_or_else(|| Error::InvalidArgument(format!("bad generator `{tok}`")))?;
                        inner
                            .split(',')
                            .map(|x| {
                                u32::from_str(x.trim())
                                    .map_err(|_| Error::InvalidArgument(format!("bad integer in `{tok}`")))
                            })
                            .collect()
                    };
                    if tok.starts_with("M(") {
                        let a = args("M(")?;
                        if a.len() != 1 {
                            return Err(Error::InvalidArgument(format!("bad generator `{tok}`")));
                        }
                        Generator::Multiplier(a[0])
                    } else if tok.starts_with("W(") {
                        let a = args("W(")?;
                        if a.len() != 2 {
                            return Err(Error::InvalidArgument(format!("bad generator `{tok}`")));
                        }
                        Generator::Pauli(a[0], a[1])
                    } else {
                        return Err(Error::InvalidArgument(format!("unknown generator `{tok}`")));
                    }
                }
            };
            gens.push(g);
        }
        Self::new(d, gens)
    }
}

/// Gate `g` with `g (X^jZ^k) g† ∝ Z^{gcd(j,k)}`, following Euclid's algorithm
/// on the exponents. Returns the gate and the gcd.
pub fn peg_reduce(d: u32, j: u32, k: u32) -> Result<(CliffordGate, u32)> {
    let (j, k) = (j % d, k % d);
    if j == 0 && k == 0 {
        return Err(Error::IdentityLabel);
    }
    let mut gate = CliffordGate::identity(d);
    let (mut a, mut b) = (j, k);
    while a != 0 && b != 0 {
        if a >= b {
            let q = a / b;
            gate.push(Generator::Fourier);
            for _ in 0..q {
                gate.push(Generator::Phase);
            }
            gate.push(Generator::FourierInverse);
            a -= q * b;
        } else {
            let q = b / a;
            for _ in 0..q {
                gate.push(Generator::PhaseInverse);
            }
            b -= q * a;
        }
    }
    if b == 0 {
        gate.push(Generator::Fourier);
        b = a;
    }
    Ok((gate, b))
}

/// Conjugate each term by a layer of single-qudit Clifford gates.
pub fn conjugate_by_layer(h: &SymbolicHamiltonian, layer: &[CliffordGate]) -> SymbolicHamiltonian {
    assert_eq!(layer.len(), h.qudits());
    let d = h.dim();
    let mut out = SymbolicHamiltonian::new(d, h.qudits());
    for (labels, c) in h.terms() {
        let mut phase = PauliPhase::one(d);
        let image: Vec<PauliLabel> = labels
            .iter()
            .zip(layer)
            .map(|(l, g)| {
                let (img, ph) = g.act_on_label(*l);
                phase = phase.compose(ph);
                img
            })
            .collect();
        out.add_term(image, c * phase.to_complex());
    }
    out
}

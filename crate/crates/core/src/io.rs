//! Text formats for Hamiltonians and dense matrices.
//!
//! ```text
//! qudit-ham v1
//! D 2 N 2
//! term 0 1 0 1 1.0 0.0     # Z ⊗ Z
//! ```
//!
//! ```text
//! qudit-matrix v1
//! dim 2
//! row 0.5 0 0.5 0
//! row 0.5 0 0.5 0
//! ```

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{DenseOperator, C64};
use crate::pauli::{PauliLabel, SymbolicHamiltonian};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn word_string(labels: &[PauliLabel]) -> String {
    labels
        .iter()
        .map(|l| format!("({},{})", l.j, l.k))
        .collect::<Vec<_>>()
        .join("")
}

/// Relative tolerance for the Hermiticity check on parsed coefficients.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Parse and validate a `qudit-ham v1` file. Non-Hermitian input is rejected.
pub fn parse_hamiltonian(text: &str) -> Result<SymbolicHamiltonian> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "qudit-ham v1")) => {}
        Some((ln, _)) => return Err(perr(ln, "expected `qudit-ham v1`")),
        None => return Err(perr(1, "empty Hamiltonian file")),
    }
    let (ln, meta) = lines.next().ok_or_else(|| perr(2, "missing `D <int> N <int>` line"))?;
    let toks: Vec<&str> = meta.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "D" || toks[2] != "N" {
        return Err(perr(ln, "expected `D <int> N <int>`"));
    }
    let d: u32 = toks[1].parse().map_err(|_| perr(ln, "bad D"))?;
    let n: usize = toks[3].parse().map_err(|_| perr(ln, "bad N"))?;
    if d < 2 || n == 0 {
        return Err(perr(ln, "D must be at least 2 and N at least 1"));
    }
    let mut h = SymbolicHamiltonian::new(d, n);
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] != "term" {
            return Err(perr(ln, format!("unknown directive `{}`", toks[0])));
        }
        if toks.len() != 2 * n + 3 {
            return Err(perr(
                ln,
                format!("expected {} label exponents and a complex coefficient", 2 * n),
            ));
        }
        let mut labels = Vec::with_capacity(n);
        for q in 0..n {
            let j: u32 = toks[1 + 2 * q].parse().map_err(|_| perr(ln, "bad label exponent"))?;
            let k: u32 = toks[2 + 2 * q].parse().map_err(|_| perr(ln, "bad label exponent"))?;
            labels.push(
                PauliLabel::checked(j, k, d)
                    .map_err(|_| Error::Range(format!("line {ln}: label ({j},{k}) on qudit {q} outside [0,{d})")))?,
            );
        }
        let re: f64 = toks[2 * n + 1].parse().map_err(|_| perr(ln, "bad real part"))?;
        let im: f64 = toks[2 * n + 2].parse().map_err(|_| perr(ln, "bad imaginary part"))?;
        if !(re.is_finite() && im.is_finite()) {
            return Err(perr(ln, "coefficient must be finite"));
        }
        h.add_term(labels, C64::new(re, im));
    }
    check_hermitian(&h)?;
    Ok(h)
}

/// Reject `h` unless every coefficient matches its conjugate partner.
pub fn check_hermitian(h: &SymbolicHamiltonian) -> Result<()> {
    let adj = h.adjoint();
    let tol = HERMITICITY_TOL * h.max_abs().max(1.0);
    for (labels, c) in h.terms() {
        let expect = adj.coefficient(labels);
        if (c - expect).norm() > tol {
            let partner: Vec<PauliLabel> = labels.iter().map(|l| l.adjoint(h.dim()).0).collect();
            return Err(Error::HermiticityViolation {
                term: word_string(labels),
                partner: word_string(&partner),
            });
        }
    }
    Ok(())
}

/// Canonical `qudit-ham v1` text: terms in label order, zero terms omitted.
pub fn emit_hamiltonian(h: &SymbolicHamiltonian) -> String {
    let mut s = String::new();
    writeln!(s, "qudit-ham v1").unwrap();
    writeln!(s, "D {} N {}", h.dim(), h.qudits()).unwrap();
    for (labels, c) in h.terms() {
        if c.norm() == 0.0 {
            continue;
        }
        write!(s, "term").unwrap();
        for l in labels {
            write!(s, " {} {}", l.j, l.k).unwrap();
        }
        writeln!(s, " {:?} {:?}", c.re, c.im).unwrap();
    }
    s
}

pub fn parse_matrix(text: &str) -> Result<DenseOperator> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, "qudit-matrix v1")) => {}
        Some((ln, _)) => return Err(perr(ln, "expected `qudit-matrix v1`")),
        None => return Err(perr(1, "empty matrix file")),
    }
    let (ln, meta) = lines.next().ok_or_else(|| perr(2, "missing `dim <int>` line"))?;
    let dim: usize = match meta.split_whitespace().collect::<Vec<_>>()[..] {
        ["dim", v] => v.parse().map_err(|_| perr(ln, "bad dim"))?,
        _ => return Err(perr(ln, "expected `dim <int>`")),
    };
    let mut data = Vec::with_capacity(dim * dim);
    let mut rows = 0;
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] != "row" || toks.len() != 2 * dim + 1 {
            return Err(perr(ln, format!("expected `row` with {dim} complex entries")));
        }
        for pair in toks[1..].chunks(2) {
            let re: f64 = pair[0].parse().map_err(|_| perr(ln, "bad real part"))?;
            let im: f64 = pair[1].parse().map_err(|_| perr(ln, "bad imaginary part"))?;
            data.push(C64::new(re, im));
        }
        rows += 1;
    }
    if rows != dim {
        return Err(perr(text.lines().count(), format!("expected {dim} rows, found {rows}")));
    }
    DenseOperator::from_row_major(dim, data)
}

pub fn emit_matrix(m: &DenseOperator) -> String {
    let mut s = format!("qudit-matrix v1\ndim {}\n", m.dim());
    for r in 0..m.dim() {
        s.push_str("row");
        for c in 0..m.dim() {
            write!(s, " {:?} {:?}", m[(r, c)].re, m[(r, c)].im).unwrap();
        }
        s.push('\n');
    }
    s
}

/// A matrix file, or a Hamiltonian file reconstructed densely.
pub fn parse_operator(text: &str) -> Result<DenseOperator> {
    match content_lines(text).next() {
        Some((_, "qudit-ham v1")) => parse_hamiltonian(text)?.reconstruct(),
        _ => parse_matrix(text),
    }
}

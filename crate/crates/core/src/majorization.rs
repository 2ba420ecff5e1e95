//! Majorization of spectra and the constructive Uhlmann decomposition
//! `A = Σ_n p_n U_n B U_n†`.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, DenseOperator, HermitianEigen, C64};

const SPECTRUM_TOL: f64 = 1e-10;
const STOCHASTIC_TOL: f64 = 1e-10;
const ENTRY_FLOOR: f64 = 1e-13;

/// Non-increasing rearrangement.
pub fn sorted_desc(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `x ≺ y`: partial sums of `x↓` never exceed those of `y↓`, totals equal.
pub fn majorizes(x: &[f64], y: &[f64]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            found: x.len(),
        });
    }
    let scale = y.iter().chain(x).map(|v| v.abs()).fold(1.0, f64::max);
    let tol = SPECTRUM_TOL * scale;
    let (xs, ys) = (sorted_desc(x), sorted_desc(y));
    let (mut px, mut py) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        px += a;
        py += b;
        if px > py + tol {
            return Ok(false);
        }
    }
    Ok((px - py).abs() <= tol)
}

pub type Matrix = Vec<Vec<f64>>;

fn identity_matrix(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Doubly stochastic `S` with `x↓ = S·y↓`, as a product of at most `D − 1`
/// two-coordinate averaging steps.
pub fn doubly_stochastic_map(x: &[f64], y: &[f64]) -> Result<Matrix> {
    if !majorizes(x, y)? {
        return Err(Error::NotMajorized {
            x: x.to_vec(),
            y: y.to_vec(),
        });
    }
    let n = x.len();
    let xs = sorted_desc(x);
    let mut z = sorted_desc(y);
    let scale = z.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let tol = 1e-13 * scale;
    let mut s = identity_matrix(n);
    for _ in 0..n {
        let Some(j) = (0..n).find(|&i| (z[i] - xs[i]).abs() > tol) else {
            break;
        };
        let Some(k) = (j + 1..n).find(|&i| z[i] < xs[i] - tol) else {
            break;
        };
        let delta = (z[j] - xs[j]).min(xs[k] - z[k]);
        let lambda = 1.0 - delta / (z[j] - z[k]);
        let mut t = identity_matrix(n);
        t[j][j] = lambda;
        t[k][k] = lambda;
        t[j][k] = 1.0 - lambda;
        t[k][j] = 1.0 - lambda;
        z = mat_vec(&t, &z);
        s = mat_mul(&t, &s);
    }
    Ok(s)
}

fn stochastic_defect(s: &Matrix) -> f64 {
    let n = s.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        if s[i].len() != n {
            return f64::INFINITY;
        }
        worst = worst.max((s[i].iter().sum::<f64>() - 1.0).abs());
        worst = worst.max(((0..n).map(|r| s[r][i]).sum::<f64>() - 1.0).abs());
        for v in &s[i] {
            worst = worst.max(-v);
        }
    }
    worst
}

/// Kuhn augmenting path search on rows `row` given allowed edges.
fn augment(
    row: usize,
    allowed: &dyn Fn(usize, usize) -> bool,
    n: usize,
    seen: &mut [bool],
    col_owner: &mut [Option<usize>],
) -> bool {
    for c in 0..n {
        if allowed(row, c) && !seen[c] {
            seen[c] = true;
            if col_owner[c].is_none_or(|r| augment(r, allowed, n, seen, col_owner)) {
                col_owner[c] = Some(row);
                return true;
            }
        }
    }
    false
}

fn has_perfect_matching(n: usize, rows: &[usize], allowed: &dyn Fn(usize, usize) -> bool) -> bool {
    let mut owner = vec![None; n];
    rows.iter()
        .all(|&r| augment(r, allowed, n, &mut vec![false; n], &mut owner))
}

/// Lexicographically smallest permutation using only allowed entries.
fn lexicographic_matching(n: usize, allowed: &dyn Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for row in 0..n {
        let rest: Vec<usize> = (row + 1..n).collect();
        let mut chosen = None;
        for c in 0..n {
            if used[c] || !allowed(row, c) {
                continue;
            }
            used[c] = true;
            let ok = has_perfect_matching(n, &rest, &|r, cc| !used[cc] && allowed(r, cc));
            used[c] = false;
            if ok {
                chosen = Some(c);
                break;
            }
        }
        let c = chosen?;
        used[c] = true;
        perm.push(c);
    }
    Some(perm)
}

/// Convex decomposition `S = Σ w·P` into permutation matrices; `perm[i]` is
/// the column of the 1 in row `i`.
pub fn birkhoff_decompose(s: &Matrix) -> Result<Vec<(f64, Vec<usize>)>> {
    let defect = stochastic_defect(s);
    if defect > STOCHASTIC_TOL {
        return Err(Error::NotDoublyStochastic { defect });
    }
    let n = s.len();
    let mut r: Matrix = s.iter().map(|row| row.iter().map(|v| v.max(0.0)).collect()).collect();
    let mut out = Vec::new();
    let all_rows: Vec<usize> = (0..n).collect();
    for _ in 0..n * n + 1 {
        let mass: f64 = r.iter().flatten().sum::<f64>() / n as f64;
        if mass < 1e-12 {
            break;
        }
        let mut levels: Vec<f64> = r.iter().flatten().copied().filter(|v| *v > ENTRY_FLOOR).collect();
        levels.sort_by(|a, b| b.total_cmp(a));
        levels.dedup();
        // Largest threshold that still admits a perfect matching.
        let feasible = |theta: f64| has_perfect_matching(n, &all_rows, &|i, j| r[i][j] >= theta);
        let (mut lo, mut hi) = (0usize, levels.len());
        if hi == 0 || !feasible(levels[hi - 1]) {
            break;
        }
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if feasible(levels[mid - 1]) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let theta = if feasible(levels[lo]) {
            levels[lo]
        } else {
            levels[hi - 1]
        };
        let Some(perm) = lexicographic_matching(n, &|i, j| r[i][j] >= theta) else {
            break;
        };
        let w = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| r[i][j])
            .fold(f64::INFINITY, f64::min);
        for (i, &j) in perm.iter().enumerate() {
            r[i][j] -= w;
            if r[i][j] < ENTRY_FLOOR {
                r[i][j] = 0.0;
            }
        }
        out.push((w, perm));
    }
    Ok(out)
}

pub fn permutation_matrix(perm: &[usize]) -> DenseOperator {
    let mut m = DenseOperator::zeros(perm.len());
    for (i, &j) in perm.iter().enumerate() {
        m[(i, j)] = C64::new(1.0, 0.0);
    }
    m
}

#[derive(Clone, Debug)]
pub struct UhlmannDecomposition {
    pub weights: Vec<f64>,
    pub unitaries: Vec<DenseOperator>,
    /// Scale `c` with `A ≺ cB`; 1 for the plain decomposition.
    pub scale: f64,
}

impl UhlmannDecomposition {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ w_n U_n B U_n†`.
    pub fn reconstruct(&self, b: &DenseOperator) -> DenseOperator {
        let mut acc = DenseOperator::zeros(b.dim());
        for (w, u) in self.weights.iter().zip(&self.unitaries) {
            acc.add_scaled(&u.conjugate(b), C64::new(*w, 0.0));
        }
        acc
    }
}

/// Eigenbasis with columns in non-increasing eigenvalue order, each column's
/// first significant entry made real positive.
fn descending_basis(m: &DenseOperator) -> Result<(Vec<f64>, DenseOperator)> {
    let HermitianEigen { values, vectors } = hermitian_eig(m)?;
    let n = values.len();
    let desc: Vec<f64> = values.iter().rev().copied().collect();
    let mut v = DenseOperator::from_fn(n, |r, c| vectors[(r, n - 1 - c)]);
    for c in 0..n {
        if let Some(r) = (0..n).find(|&r| v[(r, c)].norm() > 1e-8) {
            let ph = v[(r, c)].conj() / v[(r, c)].norm();
            for rr in 0..n {
                v[(rr, c)] *= ph;
            }
        }
    }
    Ok((desc, v))
}

/// `A = Σ p_n U_n B U_n†` with `U_n = V P_n W†`, requiring `λ(A) ≺ λ(B)`.
pub fn uhlmann_decompose(a: &DenseOperator, b: &DenseOperator) -> Result<UhlmannDecomposition> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            found: a.dim(),
        });
    }
    let (la, v) = descending_basis(a)?;
    let (lb, w) = descending_basis(b)?;
    let s = doubly_stochastic_map(&la, &lb)?;
    let terms = birkhoff_decompose(&s)?;
    let w_dag = w.adjoint();
    let mut weights = Vec::with_capacity(terms.len());
    let mut unitaries = Vec::with_capacity(terms.len());
    for (p, perm) in terms {
        unitaries.push(v.matmul(&permutation_matrix(&perm)).matmul(&w_dag));
        weights.push(p);
    }
    Ok(UhlmannDecomposition {
        weights,
        unitaries,
        scale: 1.0,
    })
}

/// Smallest `c` making `A ≺ cB` for traceless `A`, `B`: the largest ratio of
/// leading partial sums over `k = 1..D−1`.
pub fn traceless_scale(la_desc: &[f64], lb_desc: &[f64]) -> f64 {
    let n = la_desc.len();
    let (mut pa, mut pb) = (0.0, 0.0);
    let mut c: f64 = 0.0;
    for k in 0..n.saturating_sub(1) {
        pa += la_desc[k];
        pb += lb_desc[k];
        c = c.max(pa / pb);
    }
    c
}

/// `A = Σ c_n U_n B U_n†`, `c_n ≥ 0`, for traceless Hermitian `A` and nonzero
/// traceless Hermitian `B`.
pub fn traceless_decompose(a: &DenseOperator, b: &DenseOperator) -> Result<UhlmannDecomposition> {
    for m in [a, b] {
        let tr = m.trace().norm();
        if tr > 1e-10 * m.frobenius_norm().max(1.0) {
            return Err(Error::NotTraceless { trace: tr });
        }
    }
    if b.frobenius_norm() < 1e-12 {
        return Err(Error::ZeroReference);
    }
    if a.frobenius_norm() < 1e-12 {
        return Ok(UhlmannDecomposition {
            weights: vec![],
            unitaries: vec![],
            scale: 1.0,
        });
    }
    let la = sorted_desc(&hermitian_eig(a)?.values);
    let lb = sorted_desc(&hermitian_eig(b)?.values);
    let c = traceless_scale(&la, &lb);
    let mut dec = uhlmann_decompose(a, &b.scale_real(c))?;
    for w in &mut dec.weights {
        *w *= c;
    }
    dec.scale = c;
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majorization_examples() {
        assert!(majorizes(&[0.5, 0.5], &[1.0, 0.0]).unwrap());
        assert!(majorizes(&[0.3, 0.2, 0.5], &[0.3, 0.2, 0.5]).unwrap());
        assert!(!majorizes(&[0.6, 0.4], &[0.5, 0.5]).unwrap());
        assert!(majorizes(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn map_examples() {
        let s = doubly_stochastic_map(&[0.2, 0.7], &[0.7, 0.2]).unwrap();
        assert_eq!(s, identity_matrix(2));
        let s = doubly_stochastic_map(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        for row in &s {
            for v in row {
                assert!((v - 0.5).abs() < 1e-15);
            }
        }
        let y = [0.7, 0.2, 0.1];
        let s = doubly_stochastic_map(&[0.5, 0.3, 0.2], &y).unwrap();
        let x = mat_vec(&s, &y);
        for (a, b) in x.iter().zip([0.5, 0.3, 0.2]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(stochastic_defect(&s) < 1e-12);
        assert!(doubly_stochastic_map(&[1.0, 0.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn birkhoff_examples() {
        let terms = birkhoff_decompose(&identity_matrix(3)).unwrap();
        assert_eq!(terms, vec![(1.0, vec![0, 1, 2])]);
        let terms = birkhoff_decompose(&vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(terms, vec![(0.5, vec![0, 1]), (0.5, vec![1, 0])]);
        assert!(birkhoff_decompose(&vec![vec![0.9, 0.0], vec![0.1, 1.0]]).is_err());
    }

    #[test]
    fn qubit_uhlmann_example() {
        let a = DenseOperator::real_diagonal(&[0.5, 0.5]);
        let b = DenseOperator::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let dec = uhlmann_decompose(&a, &b).unwrap();
        assert!(dec.len() <= 2);
        assert!(dec.reconstruct(&b).max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn same_operator_single_identity_term() {
        let a = DenseOperator::real_diagonal(&[2.0, -0.5, 1.0]);
        let dec = uhlmann_decompose(&a, &a).unwrap();
        assert_eq!(dec.len(), 1);
        assert!(dec.unitaries[0].max_abs_diff(&DenseOperator::identity(3)) < 1e-12);
    }

    #[test]
    fn traceless_examples() {
        let a = DenseOperator::real_diagonal(&[1.0, -1.0]);
        let b = DenseOperator::real_diagonal(&[2.0, -2.0]);
        let dec = traceless_decompose(&a, &b).unwrap();
        assert!((dec.scale - 0.5).abs() < 1e-15);
        assert_eq!(dec.len(), 1);
        assert!(dec.reconstruct(&b).max_abs_diff(&a) < 1e-12);
        let zero = DenseOperator::zeros(2);
        assert!(traceless_decompose(&zero, &b).unwrap().is_empty());
        assert_eq!(traceless_decompose(&a, &zero).unwrap_err(), Error::ZeroReference);
        assert!(matches!(
            traceless_decompose(&DenseOperator::identity(2), &b),
            Err(Error::NotTraceless { .. })
        ));
    }
}

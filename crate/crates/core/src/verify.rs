//! Dense execution of schedules and fidelity reporting.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::linalg::{check_dense_limit, hermitian_eig, DenseOperator, HermitianEigen, C64, DEFAULT_DENSE_LIMIT};
use crate::pauli::SymbolicHamiltonian;
use crate::sim::{effective_hamiltonian, lower, PulseSchedule, SimExpr, Step, TrotterConfig};

/// Executes schedules against one resource Hamiltonian, caching its
/// eigendecomposition and the evolution operators for each distinct duration.
pub struct Executor {
    d: u32,
    n: usize,
    eig: HermitianEigen,
    evolutions: HashMap<u64, DenseOperator>,
}

impl Executor {
    pub fn new(h: &SymbolicHamiltonian) -> Result<Self> {
        Self::with_limit(h, DEFAULT_DENSE_LIMIT)
    }

    pub fn with_limit(h: &SymbolicHamiltonian, limit: usize) -> Result<Self> {
        let dense = h.to_dense(limit)?;
        Ok(Self {
            d: h.dim(),
            n: h.qudits(),
            eig: hermitian_eig(&dense)?,
            evolutions: HashMap::new(),
        })
    }

    fn evolution(&mut self, tau: f64) -> &DenseOperator {
        let eig = &self.eig;
        self.evolutions
            .entry(tau.to_bits())
            .or_insert_with(|| eig.evolution(tau))
    }

    /// Ordered product of the schedule's steps; the first step acts first.
    pub fn run(&mut self, s: &PulseSchedule) -> Result<DenseOperator> {
        if s.d != self.d || s.n != self.n {
            return Err(Error::MalformedSchedule(format!(
                "schedule is for D={} N={}, resource is D={} N={}",
                s.d, s.n, self.d, self.n
            )));
        }
        s.validate()?;
        let mut blocks: Vec<DenseOperator> = Vec::with_capacity(s.blocks.len());
        for b in &s.blocks {
            let u = self.run_steps(&b.steps, &blocks);
            blocks.push(u);
        }
        Ok(self.run_steps(&s.steps, &blocks))
    }

    fn run_steps(&mut self, steps: &[Step], blocks: &[DenseOperator]) -> DenseOperator {
        let dim = self.eig.values.len();
        let mut u = DenseOperator::identity(dim);
        for step in steps {
            match step {
                Step::Gates(layer) => {
                    for (q, g) in layer.gates().iter().enumerate() {
                        if !g.is_identity() {
                            u.left_apply_local(&g.matrix(), q, self.n);
                        }
                    }
                }
                Step::Evolve(tau) => u = self.evolution(*tau).matmul(&u),
                Step::Call(b) => u = blocks[*b].matmul(&u),
                Step::Repeat { count, block } => u = matrix_power(&blocks[*block], *count).matmul(&u),
            }
        }
        u
    }
}

pub fn matrix_power(m: &DenseOperator, mut e: usize) -> DenseOperator {
    let mut acc = DenseOperator::identity(m.dim());
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = base.matmul(&acc);
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base);
        }
    }
    acc
}

/// Unitary realized by a schedule over resource `h`.
pub fn execute_schedule(s: &PulseSchedule, h: &SymbolicHamiltonian) -> Result<DenseOperator> {
    check_dense_limit((s.d as usize).pow(s.n as u32), DEFAULT_DENSE_LIMIT)?;
    Executor::new(h)?.run(s)
}

/// `‖U − e^{iφ}V‖` in operator norm with `e^{iφ}` aligned to `tr(V†U)`.
pub fn unitary_distance(u: &DenseOperator, v: &DenseOperator) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    let overlap: C64 = (0..u.dim())
        .flat_map(|r| (0..u.dim()).map(move |c| (r, c)))
        .map(|(r, c)| v[(r, c)].conj() * u[(r, c)])
        .sum();
    let phase = if overlap.norm() > 1e-12 * u.dim() as f64 {
        overlap / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    Ok((u - &v.scale(phase)).operator_norm())
}

/// `exp(−i t H)` for a symbolic Hamiltonian.
pub fn target_unitary(k: &SymbolicHamiltonian, t: f64) -> Result<DenseOperator> {
    Ok(hermitian_eig(&k.reconstruct()?)?.evolution(t))
}

#[derive(Clone, Debug)]
pub struct FidelityReport {
    pub distance: f64,
    /// Distance divided by the slice count.
    pub per_slice_error: f64,
    pub dropped_identity: f64,
    pub wall_clock: Duration,
    pub slices: usize,
    pub tolerance: Option<f64>,
}

impl FidelityReport {
    pub fn passes(&self) -> bool {
        self.tolerance.is_none_or(|tol| self.distance <= tol)
    }
}

impl fmt::Display for FidelityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "distance {:.6e}", self.distance)?;
        writeln!(f, "slices {}", self.slices)?;
        writeln!(f, "per_slice_error {:.6e}", self.per_slice_error)?;
        writeln!(f, "dropped_identity {:.6e}", self.dropped_identity)?;
        writeln!(f, "wall_clock_s {:.3}", self.wall_clock.as_secs_f64())?;
        if let Some(tol) = self.tolerance {
            writeln!(f, "tolerance {tol:.6e}")?;
            writeln!(f, "status {}", if self.passes() { "pass" } else { "fail" })?;
        }
        Ok(())
    }
}

/// Execute `s` over `h` and compare with `exp(−i t K)`.
pub fn verify_schedule(
    s: &PulseSchedule,
    h: &SymbolicHamiltonian,
    k: &SymbolicHamiltonian,
    t: f64,
    tolerance: Option<f64>,
) -> Result<FidelityReport> {
    let start = Instant::now();
    let u = execute_schedule(s, h)?;
    let target = target_unitary(k, t)?;
    let distance = unitary_distance(&u, &target)?;
    Ok(FidelityReport {
        distance,
        per_slice_error: distance / s.slices.max(1) as f64,
        dropped_identity: s.dropped_identity,
        wall_clock: start.elapsed(),
        slices: s.slices,
        tolerance,
    })
}

/// Executed-schedule error against `exp(−i t H_eff(e))` for each slice count.
pub fn trotter_error_scan(e: &SimExpr, h: &SymbolicHamiltonian, t: f64, slices: &[usize]) -> Result<Vec<(usize, f64)>> {
    let eff = effective_hamiltonian(e, h);
    let target = target_unitary(&eff, t)?;
    let mut exec = Executor::new(h)?;
    slices
        .iter()
        .map(|&n| {
            let s = lower(e, h.dim(), h.qudits(), TrotterConfig::new(t, n)?)?;
            Ok((n, unitary_distance(&exec.run(&s)?, &target)?))
        })
        .collect()
}

/// Successive error ratios `ε(n_i)/ε(n_{i+1})`.
pub fn convergence_ratios(scan: &[(usize, f64)]) -> Vec<f64> {
    scan.windows(2).map(|w| w[0].1 / w[1].1).collect()
}

/// Least-squares `C` in `ε(n) ≈ C·t²/n`.
pub fn first_order_fit(scan: &[(usize, f64)], t: f64) -> f64 {
    let xs: Vec<f64> = scan.iter().map(|(n, _)| t * t / *n as f64).collect();
    let num: f64 = xs.iter().zip(scan).map(|(x, (_, e))| x * e).sum();
    let den: f64 = xs.iter().map(|x| x * x).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordGate;
    use crate::linalg::expm_hermitian;
    use crate::pauli::PauliLabel;
    use crate::sim::{FlatStep, GateLayer};

    fn lab(j: u32, k: u32) -> PauliLabel {
        PauliLabel { j, k }
    }

    fn qubit_h() -> SymbolicHamiltonian {
        let mut h = SymbolicHamiltonian::new(2, 2);
        h.add_term(vec![lab(0, 1), lab(0, 1)], C64::new(1.0, 0.0));
        h.add_term(vec![lab(1, 0), lab(0, 0)], C64::new(0.7, 0.0));
        h
    }

    #[test]
    fn distance_examples() {
        let i = DenseOperator::identity(2);
        let x = lab(1, 0).matrix(2);
        assert!(unitary_distance(&i, &i).unwrap() < 1e-15);
        assert!(unitary_distance(&i, &i.scale_real(-1.0)).unwrap() < 1e-15);
        assert!((unitary_distance(&i, &x).unwrap() - 2.0).abs() < 1e-12);
        assert!(unitary_distance(&i, &DenseOperator::identity(3)).is_err());
    }

    #[test]
    fn execution_examples() {
        let h = qubit_h();
        let empty = PulseSchedule::empty(2, 2);
        assert!(
            execute_schedule(&empty, &h)
                .unwrap()
                .max_abs_diff(&DenseOperator::identity(4))
                < 1e-15
        );

        let s = lower(&SimExpr::primitive(), 2, 2, TrotterConfig::new(0.8, 1).unwrap()).unwrap();
        assert_eq!(s.flatten(), vec![FlatStep::Evolve(0.8)]);
        let expected = expm_hermitian(&h.reconstruct().unwrap(), 0.8).unwrap();
        assert!(execute_schedule(&s, &h).unwrap().max_abs_diff(&expected) < 1e-12);

        let layer = GateLayer::cliffords(vec![CliffordGate::fourier(2), CliffordGate::phase(2)]);
        let e = SimExpr::conj(layer.clone(), SimExpr::primitive());
        let s = lower(&e, 2, 2, TrotterConfig::new(0.8, 1).unwrap()).unwrap();
        let flat = s.flatten();
        assert_eq!(flat.len(), 3);
        assert_eq!(flat[0], FlatStep::Gates(layer.inverse()));
        let u = layer.dense();
        let sandwich = u.matmul(&expected).matmul(&u.adjoint());
        assert!(unitary_distance(&execute_schedule(&s, &h).unwrap(), &sandwich).unwrap() < 1e-12);
    }

    #[test]
    fn two_term_sum_interleaves() {
        let h = qubit_h();
        let layer = GateLayer::cliffords(vec![CliffordGate::fourier(2), CliffordGate::identity(2)]);
        let e = SimExpr::weighted_sum(vec![
            (1.0, SimExpr::primitive()),
            (1.0, SimExpr::conj(layer, SimExpr::primitive())),
        ])
        .unwrap();
        let s = lower(&e, 2, 2, TrotterConfig::new(1.0, 4).unwrap()).unwrap();
        let evolves = s.flatten().iter().filter(|f| matches!(f, FlatStep::Evolve(_))).count();
        assert_eq!(evolves, 8);
        assert!((s.total_evolve_time() - 2.0).abs() < 1e-12);
        let scan = trotter_error_scan(&e, &h, 1.0, &[8, 16, 32, 64]).unwrap();
        for r in convergence_ratios(&scan) {
            assert!(r >= 1.5, "{scan:?}");
        }
        assert!(first_order_fit(&scan, 1.0) > 0.0);
    }

    #[test]
    fn commuting_terms_are_exact() {
        let mut h = SymbolicHamiltonian::new(2, 2);
        h.add_term(vec![lab(0, 1), lab(0, 0)], C64::new(1.0, 0.0));
        let swap_roles = GateLayer::cliffords(vec![CliffordGate::identity(2), CliffordGate::identity(2)]);
        let e = SimExpr::weighted_sum(vec![
            (0.3, SimExpr::primitive()),
            (0.7, SimExpr::conj(swap_roles, SimExpr::primitive())),
        ])
        .unwrap();
        for (_, err) in trotter_error_scan(&e, &h, 1.0, &[1, 4]).unwrap() {
            assert!(err < 1e-12);
        }
    }
}

// Build an expression with the composition laws, lower it to a pulse
// schedule and watch the Trotter error fall as 1/n.

use qudit_sim::clifford::CliffordGate;
use qudit_sim::linalg::C64;
use qudit_sim::pauli::{PauliLabel, SymbolicHamiltonian};
use qudit_sim::sim::{effective_hamiltonian, lower, SimExpr, TrotterConfig};
use qudit_sim::verify::{convergence_ratios, trotter_error_scan};

pub fn run_example() -> qudit_sim::Result<()> {
    let d = 2;
    let z = PauliLabel::z(d);
    let h = SymbolicHamiltonian::from_terms(d, 2, [(vec![z, z], C64::new(1.0, 0.0))]);

    // H/2 + (F⊗I) H (F⊗I)†, i.e. ZZ/2 + XZ, two anticommuting terms.
    let f = qudit_sim::compiler::layer_of(&[CliffordGate::fourier(d), CliffordGate::identity(d)]);
    let e = SimExpr::weighted_sum(vec![
        (0.5, SimExpr::primitive()),
        (1.0, SimExpr::conj(f, SimExpr::primitive())),
    ])?;
    println!("effective H = {}", effective_hamiltonian(&e, &h));
    println!("time cost {}", e.time_cost());

    let s = lower(&e, d, 2, TrotterConfig::new(1.0, 4)?)?;
    print!("{}", s.to_text());

    let scan = trotter_error_scan(&e, &h, 1.0, &[8, 16, 32, 64])?;
    for ((n, err), r) in scan
        .iter()
        .zip(std::iter::once(f64::NAN).chain(convergence_ratios(&scan)))
    {
        println!("n={n:<3} error {err:.3e} ratio {r:.2}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> qudit_sim::Result<()> {
    run_example()
}

// Exact Pauli arithmetic on qudits: composition phases, commutation, and
// twirling a Hamiltonian with the ditwise group.

use qudit_sim::linalg::C64;
use qudit_sim::pauli::{commutation_phase, compose_labels, ditwise_group, PauliLabel, SymbolicHamiltonian};

pub fn run_example() -> qudit_sim::Result<()> {
    let d = 3;
    let (x, z) = (PauliLabel::x(d), PauliLabel::z(d));
    let (xz, ph) = compose_labels(x, z, d);
    let (zx, ph2) = compose_labels(z, x, d);
    println!("X·Z = {} {}   Z·X = {} {}", ph.to_complex(), xz, ph2.to_complex(), zx);
    println!("Z X = {} X Z", commutation_phase(z, x, d).to_complex());

    // Twirling both qudits with the same label keeps only words whose
    // labels cancel, here X⊗X² and its partner.
    let mut h = SymbolicHamiltonian::new(d, 2);
    h.add_term(vec![x, x], C64::new(1.0, 0.0));
    h.add_term(vec![x, PauliLabel::new(2, 0, d)], C64::new(0.75, 0.0));
    h.add_term(vec![z, z], C64::new(0.5, 0.0));
    h.add_term(vec![x, PauliLabel::IDENTITY], C64::new(0.25, 0.0));
    let h = h.hermitian_part();
    println!("H          = {h}");
    let twirled = h.twirl(&ditwise_group(2, &[0, 1], d));
    println!("twirled H  = {twirled}");

    let dense = h.reconstruct()?;
    println!(
        "dense dim {} hermiticity defect {:.1e}",
        dense.dim(),
        dense.hermiticity_defect()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> qudit_sim::Result<()> {
    run_example()
}

// Reduce a Pauli label to a power of Z with Clifford gates, and check the
// result densely.

use qudit_sim::clifford::{peg_reduce, CliffordGate};
use qudit_sim::modular::lemma_witness;
use qudit_sim::pauli::PauliLabel;

pub fn run_example() -> qudit_sim::Result<()> {
    let (d, j, k) = (105, 104, 80);
    let (gate, g) = peg_reduce(d, j, k)?;
    let (image, phase) = gate.act_on_label(PauliLabel { j, k });
    println!("D={d}: X^{j} Z^{k} -> {} {image}  via  {gate}", phase.to_complex());

    let u = gate.matrix();
    let lhs = u.conjugate(&PauliLabel { j, k }.matrix(d));
    let rhs = PauliLabel { j: 0, k: g }.matrix(d).scale(phase.to_complex());
    println!("dense residual {:.2e}", lhs.max_abs_diff(&rhs));

    // Any X^j Z^k with j·m ≡ k·l is a power of X^l Z^m.
    let (l, m) = (2, 3);
    for (j, k) in [(4, 6), (1, 0), (3, 2)] {
        match lemma_witness(j, k, l, m, 7) {
            Ok(n) => println!("D=7: X^{j}Z^{k} ∝ (X^{l}Z^{m})^{n}"),
            Err(e) => println!("D=7: X^{j}Z^{k}: {e}"),
        }
    }

    let g = CliffordGate::parse("F.P.P.M(2)", 5)?;
    let act = g.label_action();
    println!(
        "D=5 gate {g}: X -> {}, Z -> {}, det {}",
        act.x.0,
        act.z.0,
        act.determinant(5)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> qudit_sim::Result<()> {
    run_example()
}

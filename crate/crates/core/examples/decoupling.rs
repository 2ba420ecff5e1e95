// Isolate one pair of qudits in a many-body Hamiltonian by nested ditwise
// twirls, generic and lattice flavours.

use rand::SeedableRng;

use qudit_sim::decoupling::{
    apply_plan, generic_recursive_plan, interaction_graph, lattice_graph, lattice_partition, partition_plan,
};
use qudit_sim::pauli::support_of;
use qudit_sim::random::{random_filtered, random_two_body};

pub fn run_example() -> qudit_sim::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);

    let h = random_two_body(&mut rng, 2, 6);
    let plan = generic_recursive_plan(6, (2, 4))?;
    print!("{plan}");
    let out = apply_plan(&h, &plan)?;
    println!(
        "terms {} -> {}, off-pair residue {:.1e}",
        h.len(),
        out.hamiltonian.len(),
        out.off_principal
    );
    println!("pair Hamiltonian: {}\n", out.principal);

    // Parity classes of a grid give at most four rounds whatever its size.
    let graph = lattice_graph(&[3, 3], false);
    let h = random_filtered(&mut rng, 2, 9, |w| {
        let s = support_of(w);
        s.len() == 1 || (s.len() == 2 && graph.has_edge(s[0], s[1]))
    });
    println!("interaction graph connected: {}", interaction_graph(&h)?.is_connected());
    let part = lattice_partition(&[3, 3], false)?.without((4, 5));
    print!("{}", part.to_text());
    let plan = partition_plan(&graph, &part, (4, 5))?;
    let out = apply_plan(&h, &plan)?;
    println!(
        "{} rounds, {} conjugations, off-pair residue {:.1e}",
        plan.depth(),
        plan.flattened_count(2),
        out.off_principal
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> qudit_sim::Result<()> {
    run_example()
}

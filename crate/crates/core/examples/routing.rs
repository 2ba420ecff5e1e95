// Drive an interaction between the two ends of a four-qubit chain by
// swapping one end inward.

use rand::SeedableRng;

use qudit_sim::decoupling::{chain_plan, compile_routed, interaction_graph, route_swap};
use qudit_sim::random::{random_chain, random_hamiltonian};
use qudit_sim::verify::verify_schedule;

pub fn run_example() -> qudit_sim::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let h = random_chain(&mut rng, 2, 4);
    let k = random_hamiltonian(&mut rng, 2, 2);
    let graph = interaction_graph(&h)?;
    println!(
        "path 0 -> 3: {:?}, swaps {:?}",
        graph.shortest_path(0, 3)?,
        route_swap(&graph, 0, 3)?
    );

    let routed = compile_routed(&h, &|p| chain_plan(4, p), (0, 3), &k, 1.0, 256)?;
    println!("interaction realized on {:?}", routed.interaction_pair);
    for (i, t) in routed.traces.iter().enumerate() {
        println!(
            "compilation {i}: time cost {:.2}, residual {:.1e}",
            t.time_cost, t.final_residual
        );
    }
    print!(
        "{}",
        verify_schedule(&routed.schedule, &h, &k.embed(4, &[0, 3]), 1.0, Some(5e-2))?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> qudit_sim::Result<()> {
    run_example()
}

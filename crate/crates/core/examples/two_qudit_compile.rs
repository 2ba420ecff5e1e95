// Compile the SWAP generator from a random qutrit resource and verify the
// executed schedule.

use rand::SeedableRng;

use qudit_sim::compiler::{compile_full, swap_generator};
use qudit_sim::random::random_entangling;
use qudit_sim::verify::verify_schedule;

pub fn run_example() -> qudit_sim::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let d = 3;
    let h = random_entangling(&mut rng, d);
    let k = swap_generator(d)?;
    println!("resource has {} terms", h.len());

    let (_, schedule, trace) = compile_full(&h, &k, 1.0, 128)?;
    println!("{trace}");
    let report = verify_schedule(&schedule, &h, &k, 1.0, Some(1e-2))?;
    print!("{report}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> qudit_sim::Result<()> {
    run_example()
}

// Write one traceless Hermitian operator as a positive mixture of unitary
// conjugates of another.

use rand::SeedableRng;

use qudit_sim::linalg::hermitian_eig;
use qudit_sim::majorization::{majorizes, traceless_decompose};
use qudit_sim::random::random_traceless_hermitian;

pub fn run_example() -> qudit_sim::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let a = random_traceless_hermitian(&mut rng, 4);
    let b = random_traceless_hermitian(&mut rng, 4);
    let (la, lb) = (hermitian_eig(&a)?.values, hermitian_eig(&b)?.values);
    println!("spec A = {la:.3?}\nspec B = {lb:.3?}\nA ≺ B: {}", majorizes(&la, &lb)?);

    let dec = traceless_decompose(&a, &b)?;
    println!("c = {:.6}, {} terms", dec.scale, dec.len());
    for (i, w) in dec.weights.iter().enumerate() {
        println!("  p_{i} = {w:.6}");
    }
    println!("reconstruction error {:.2e}", dec.reconstruct(&b).max_abs_diff(&a));
    Ok(())
}

#[allow(dead_code)]
fn main() -> qudit_sim::Result<()> {
    run_example()
}

//! Σ 1/p over each reduced class mod k against (1/φ(k)) ln ln x.
//!
//! cargo run --release --example mertens_progression -- [K] [X]

use apmoments::arith_fn::PrimeFunction;
use apmoments::prime_sums::{closed_form_asymptotic, prime_power_sum};
use apmoments::Progression;

fn main() -> apmoments::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: u64 = args.next().map_or(4, |s| s.parse().expect("K"));
    let x: u64 = args.next().map_or(10_000_000, |s| s.parse::<f64>().expect("X") as u64);
    let one = PrimeFunction::constant(1.0);
    let main = closed_form_asymptotic(&one, 1, x as f64, k)?;
    println!("x = {x}, k = {k}, main term (1/phi(k)) ln ln x = {:.6}", main.main_term);
    for prog in Progression::coprime_residues(k)? {
        let s = prime_power_sum(&one, 1, x, prog)?;
        println!(
            "l = {:>3}: sum = {:.6}  primes = {:>8}  sum - main = {:+.6}",
            prog.residue(),
            s.value,
            s.term_count,
            s.value - main.main_term
        );
    }
    Ok(())
}

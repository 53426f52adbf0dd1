//! Ω − ω over p ≡ 1 (mod 4): same values at primes, different extensions.

use apmoments::model::compare_pair;
use apmoments::{builtin, FunctionPair, PairClass, Progression};

fn main() -> apmoments::Result<()> {
    let prog = Progression::new(4, 1)?;
    let pair = FunctionPair::new(builtin("omega", prog)?, builtin("Omega", prog)?, PairClass::H)?;
    for n in [10_000u64, 100_000, 1_000_000, 10_000_000] {
        let c = compare_pair(&pair, prog, n, 4)?;
        println!(
            "n = {n:>9}: mean(Omega - omega) = {:.6}  mu2 diff = {:+.5}  mu3 diff = {:+.5}",
            c.mean_difference, c.mu_differences[0], c.mu_differences[1]
        );
    }
    let c = compare_pair(&pair, prog, 10_000_000, 2)?;
    println!("restricted Σ 1/p = {:.6}, density Σ 1/p = {:.6}", c.restricted_sum[0], c.density_sum[0]);
    Ok(())
}

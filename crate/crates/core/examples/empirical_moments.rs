//! Empirical central moments of ω over a progression next to the model sums.
//!
//! cargo run --release --example empirical_moments -- [N] [K] [L]

use apmoments::model::{exact_moments, PredictionMode};
use apmoments::moments::empirical_moments;
use apmoments::{builtin, Progression};

fn main() -> apmoments::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().map_or(1_000_000, |s| s.parse::<f64>().expect("N") as u64);
    let k = args.next().map_or(4, |s| s.parse().expect("K"));
    let l = args.next().map_or(1, |s| s.parse().expect("L"));
    let prog = Progression::new(k, l)?;
    let omega = builtin("omega", prog)?;
    let s = empirical_moments(&omega, prog, n, 6)?;
    let r = exact_moments(&omega.prime, prog, n, 6, PredictionMode::Restricted)?;
    let d = exact_moments(&omega.prime, prog, n, 6, PredictionMode::Density)?;
    println!("n = {n}, class {l} mod {k}: {} members, mean {:.6}, sigma {:.6}", s.count, s.mean, s.sigma);
    println!("{:>3} {:>12} {:>14} {:>14}", "u", "empirical", "restricted Σ", "density Σ");
    for u in 2..=6 {
        println!("{u:>3} {:>12.6} {:>14.6} {:>14.6}", s.mu(u).unwrap(), r.paper_approx[u as usize - 1], d.paper_approx[u as usize - 1]);
    }
    Ok(())
}

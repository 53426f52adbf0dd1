//! Samples the independent Bernoulli model and compares with its exact
//! cumulants. Reruns with the same seed reproduce every draw.

use apmoments::arith_fn::{PrimeFunction, PrimeKind};
use apmoments::model::{exact_moments, lindeberg_check, sample, PredictionMode};
use apmoments::Progression;

fn main() -> apmoments::Result<()> {
    let prog = Progression::new(4, 1)?;
    let one = PrimeFunction::of(PrimeKind::IndicatorOne);
    let (n, trials) = (1_000_000, 100_000);
    let m = exact_moments(&one, prog, n, 4, PredictionMode::Restricted)?;
    println!("exact: kappa = {:?}", m.cumulants);
    for seed in [1, 2, 3] {
        let s = sample(&one, prog, n, trials, seed)?;
        let z = (s.mean() - m.kappa(1)) / (m.kappa(2) / trials as f64).sqrt();
        println!("seed {seed}: mean {:.5} variance {:.5} z {:+.2}", s.mean(), s.variance(), z);
    }
    let l = lindeberg_check(&one, prog, n, 0.5)?;
    println!("Lindeberg eps=0.5: D_n = {:.4}, ratio = {:.3e}", l.d_n, l.ratio);
    Ok(())
}

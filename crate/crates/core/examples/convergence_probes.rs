//! Exact partial sums of three series over p ≡ 1 (mod 4), and the
//! divergence-integral probe for Σ 1/(p ln ln p).

use apmoments::arith_fn::{PrimeFunction, PrimeKind};
use apmoments::prime_sums::{convergence_probe, default_integral_checkpoints, default_sum_checkpoints, divergence_probe, Series};
use apmoments::Progression;

fn main() -> apmoments::Result<()> {
    let prog = Progression::new(4, 1)?;
    let cps = default_sum_checkpoints();
    let series = [
        ("1/p^2", Series::InvPSquared),
        ("1/(p ln^2 p)", Series::InvPLog2P),
        ("1/(p ln p)", Series::InvPLogP),
        ("1/p", Series::Custom { spec: PrimeFunction::constant(1.0), u: 1 }),
    ];
    for (name, s) in &series {
        let probe = convergence_probe(s, prog, &cps)?;
        let last = probe.partial_sums.last().copied().unwrap_or(0.0);
        println!("{name:>14}: S(1e8) = {last:.8}  verdict = {}", probe.verdict.as_str());
    }
    let f = PrimeFunction::of(PrimeKind::OneOverLogLog);
    let probe = divergence_probe(&f, 1, &default_integral_checkpoints())?;
    println!(
        "1/(p ln ln p) integral probe up to 1e192: verdict = {}, growth exponent = {:?}",
        probe.verdict.as_str(),
        probe.exponent
    );
    Ok(())
}

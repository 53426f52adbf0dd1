//! Σ 1/(p ln ln p) over p ≡ 1 (mod 4): exact sums, the closed form
//! (1/2) ln ln ln x and the quadrature main term.

use apmoments::arith_fn::{PrimeFunction, PrimeKind};
use apmoments::prime_sums::{closed_form_asymptotic, integral_asymptotic, prime_power_sums_at};
use apmoments::Progression;

fn main() -> apmoments::Result<()> {
    let prog = Progression::new(4, 1)?;
    let f = PrimeFunction::of(PrimeKind::OneOverLogLog);
    let xs = [10_000u64, 100_000, 1_000_000, 10_000_000, 100_000_000];
    let sums = prime_power_sums_at(&f, 1, &xs, prog, &Default::default())?;
    println!("{:>10} {:>12} {:>12} {:>12}", "x", "exact", "closed", "quadrature");
    for s in &sums {
        let c = closed_form_asymptotic(&f, 1, s.x as f64, 4)?;
        let q = integral_asymptotic(&f, 1, s.x as f64, 4)?;
        println!("{:>10} {:>12.6} {:>12.6} {:>12.6}", s.x, s.value, c.main_term, q.main_term);
    }
    let inc = sums[4].value - sums[3].value;
    let lnlnln = |x: f64| x.ln().ln().ln();
    println!("increment 1e7 -> 1e8: exact {inc:.6}, predicted {:.6}", 0.5 * (lnlnln(1e8) - lnlnln(1e7)));
    Ok(())
}

//! Share of members within b·σ of the mean against Chebyshev's 1 − 1/b²,
//! plus the law-of-large-numbers check with b(n) = (ln ln n)^(1/3).

use apmoments::moments::{chebyshev_check, empirical_moments, lln_check, progression_values, LogLogPower, DEFAULT_B_VALUES};
use apmoments::{builtin, Progression};

fn main() -> apmoments::Result<()> {
    let prog = Progression::new(3, 2)?;
    let omega = builtin("omega", prog)?;
    let n = 1_000_000;
    let summary = empirical_moments(&omega, prog, n, 2)?;
    let values = progression_values(&omega, prog, n)?;
    let report = chebyshev_check(&summary, &values, &DEFAULT_B_VALUES)?;
    for ((b, c), lb) in report.b_values.iter().zip(&report.coverage).zip(&report.bound) {
        println!("b = {b:>3}: coverage {c:.4} >= {lb:.4}");
    }
    for r in lln_check(&omega, prog, &[10_000, 1_000_000], LogLogPower::default())? {
        println!("n = {:>8}: b = {:.3}, coverage {:.4} >= {:.4}", r.n, r.b, r.coverage_sigma, r.bound);
    }
    Ok(())
}

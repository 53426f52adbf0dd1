//! Decay cases of f(p)^u for the built-in prime functions. "none" marks
//! unbounded functions, which fall outside the classification.

use apmoments::arith_fn::{PrimeFunction, PrimeKind};
use apmoments::prime_sums::classify_decay;

fn main() {
    let kinds = [
        PrimeKind::Constant(0.7),
        PrimeKind::Constant(-0.7),
        PrimeKind::OneMinusOneOverLog,
        PrimeKind::OneMinusOneOverP,
        PrimeKind::OneOverLogLog,
        PrimeKind::Scaled { factor: -1.0, inner: Box::new(PrimeKind::OneOverLogLog) },
        PrimeKind::SqrtLogLog,
        PrimeKind::OneOverLog,
    ];
    for kind in kinds {
        let f = PrimeFunction::of(kind);
        let cases: Vec<String> = (1..=3)
            .map(|u| classify_decay(&f, u).map_or_else(|_| "none".to_string(), |c| c.to_string()))
            .collect();
        println!("{:<28} u=1: {:<8} u=2: {:<8} u=3: {}", f.kind().to_string(), cases[0], cases[1], cases[2]);
    }
}

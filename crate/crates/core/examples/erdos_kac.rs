//! Kolmogorov–Smirnov distance of (ω(m) − A) / √A over m ≡ 1 (mod 4) as n
//! grows, with the largest point mass of ω, which bounds how close any
//! continuous law can get.

use std::collections::BTreeMap;

use apmoments::moments::progression_values;
use apmoments::stats::{erdos_kac_from_values, NormalizationKind};
use apmoments::{builtin, Progression};

fn main() -> apmoments::Result<()> {
    let prog = Progression::new(4, 1)?;
    let omega = builtin("omega", prog)?;
    for n in [10_000u64, 100_000, 1_000_000, 10_000_000] {
        let values = progression_values(&omega, prog, n)?;
        let sqrt_mean = erdos_kac_from_values(&values, NormalizationKind::SqrtMean)?;
        let sigma = erdos_kac_from_values(&values, NormalizationKind::Sigma)?;
        let mut atoms = BTreeMap::new();
        for v in &values {
            *atoms.entry(*v as u32).or_insert(0u64) += 1;
        }
        let (mode, top) = atoms.iter().max_by_key(|(_, c)| **c).map(|(k, c)| (*k, *c)).unwrap_or_default();
        let top = top as f64 / values.len() as f64;
        println!(
            "n = {n:>9}: ks(sqrt A) = {:.4}  ks(sigma) = {:.4}  largest atom P(omega={mode}) = {top:.4}, so ks >= {:.4}",
            sqrt_mean.ks_distance,
            sigma.ks_distance,
            top / 2.0
        );
    }
    Ok(())
}

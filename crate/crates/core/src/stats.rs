//! Normal CDF and Kolmogorov–Smirnov distance, plus the Erdős–Kac
//! normalization checks for an additive function over a progression.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::arith_fn::ArithmeticFunction;
use crate::error::{Error, Result};
use crate::moments::progression_values;
use crate::sieve::Progression;
use crate::summation::CompensatedSum;

/// Standard normal CDF.
pub fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile, polished with one Newton step against [`phi`].
pub fn phi_inv(q: f64) -> f64 {
    let x = Normal::standard().inverse_cdf(q);
    if !x.is_finite() {
        return x;
    }
    let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if density > 0.0 {
        x - (phi(x) - q) / density
    } else {
        x
    }
}

fn sorted_standardized(values: &[f64], center: f64, scale: f64) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("no values".into()));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
    }
    let mut z: Vec<f64> = values.iter().map(|v| (v - center) / scale).collect();
    z.sort_by(f64::total_cmp);
    Ok(z)
}

fn ks_sorted(z: &[f64]) -> f64 {
    let m = z.len() as f64;
    z.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let p = phi(x);
        d.max((i + 1) as f64 / m - p).max(p - i as f64 / m)
    })
}

/// `sup |F_emp - Φ|` for `(v - center) / scale`.
pub fn ks_distance(values: &[f64], center: f64, scale: f64) -> Result<f64> {
    Ok(ks_sorted(&sorted_standardized(values, center, scale)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationKind {
    /// `(A_n, σ_n)`
    Sigma,
    /// `(A_n, √A_n)`, for `0 <= f(p) <= 1`
    SqrtMean,
}

impl NormalizationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalizationKind::Sigma => "sigma",
            NormalizationKind::SqrtMean => "sqrt-mean",
        }
    }
}

impl std::str::FromStr for NormalizationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(NormalizationKind::Sigma),
            "sqrt-mean" | "sqrt_mean" => Ok(NormalizationKind::SqrtMean),
            other => Err(Error::InvalidArgument(format!("unknown normalization '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub kind: NormalizationKind,
    pub center: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub x: f64,
    pub empirical: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub sample_size: usize,
    pub normalization: Normalization,
    pub ks_distance: f64,
    pub cdf_grid: Vec<CdfPoint>,
}

/// `Φ⁻¹(q)` for the 21 levels `q = 0.025, 0.07, …, 0.975`.
pub fn default_grid() -> Vec<f64> {
    (0..21).map(|i| phi_inv(0.025 + 0.0475 * i as f64)).collect()
}

/// Report for values under an explicit normalization.
pub fn normality_report(values: &[f64], normalization: Normalization, grid: &[f64]) -> Result<NormalityReport> {
    let z = sorted_standardized(values, normalization.center, normalization.scale)?;
    let m = z.len() as f64;
    let cdf_grid = grid
        .iter()
        .map(|&x| CdfPoint {
            x,
            empirical: z.partition_point(|&v| v <= x) as f64 / m,
            phi: phi(x),
        })
        .collect();
    Ok(NormalityReport {
        sample_size: z.len(),
        normalization,
        ks_distance: ks_sorted(&z),
        cdf_grid,
    })
}

/// Center and scale taken from the values themselves.
pub fn normalization_of(values: &[f64], kind: NormalizationKind) -> Result<Normalization> {
    if values.len() < 2 {
        return Err(Error::Degenerate(format!("{} value(s): no spread to normalize", values.len())));
    }
    let m = values.len() as f64;
    let center = values.iter().copied().collect::<CompensatedSum>().value() / m;
    let scale = match kind {
        NormalizationKind::Sigma => {
            let ss: CompensatedSum = values.iter().map(|v| (v - center) * (v - center)).collect();
            (ss.value() / m).sqrt()
        }
        NormalizationKind::SqrtMean => center.max(0.0).sqrt(),
    };
    if !(scale > 0.0) {
        return Err(Error::Degenerate(format!("{} scale is zero", kind.as_str())));
    }
    Ok(Normalization { kind, center, scale })
}

pub fn erdos_kac_from_values(values: &[f64], kind: NormalizationKind) -> Result<NormalityReport> {
    normality_report(values, normalization_of(values, kind)?, &default_grid())
}

/// KS check of `f(m)` over members `m <= n` of the progression.
pub fn erdos_kac_report(
    func: &ArithmeticFunction,
    prog: Progression,
    n: u64,
    kind: NormalizationKind,
) -> Result<NormalityReport> {
    if kind == NormalizationKind::SqrtMean {
        let p = &func.prime;
        if !p.declared_bounded() || p.kind().may_be_negative() {
            return Err(Error::InvalidArgument(format!(
                "the sqrt(A_n) form needs 0 <= f(p) <= 1; {} does not guarantee it",
                p.kind()
            )));
        }
    }
    erdos_kac_from_values(&progression_values(func, prog, n)?, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith_fn::builtin;
    use approx::assert_relative_eq;

    /// `∫_0^x` of the normal density by composite Simpson.
    fn phi_oracle(x: f64) -> f64 {
        let n = 20_000;
        let h = x / n as f64;
        let dens = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = dens(0.0) + dens(x);
        for i in 1..n {
            s += dens(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        0.5 + s * h / 3.0
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0), 0.5);
        for x in [0.5, 1.0, 2.0] {
            assert_relative_eq!(phi(-x), 1.0 - phi(x), epsilon = 1e-15);
            assert!((phi(x) - phi_oracle(x)).abs() < 1e-10);
        }
        assert!((phi(1.959964) - 0.975).abs() < 1e-6);
        assert!(phi(-8.0) < 1e-14 && phi(8.0) > 1.0 - 1e-14);
        let xs: Vec<f64> = (-400..=400).map(|i| i as f64 / 50.0).collect();
        assert!(xs.windows(2).all(|w| phi(w[0]) <= phi(w[1])));
    }

    #[test]
    fn ks_examples() {
        let m = 1000;
        let q: Vec<f64> = (1..=m).map(|i| phi_inv((i as f64 - 0.5) / m as f64)).collect();
        assert!(ks_distance(&q, 0.0, 1.0).unwrap() <= 0.0005 + 1e-12);
        assert!(ks_distance(&[3.0; 50], 0.0, 1.0).unwrap() >= 0.5);
        assert_relative_eq!(ks_distance(&[0.0], 0.0, 1.0).unwrap(), 0.5);
        assert!(ks_distance(&[1.0], 0.0, 0.0).is_err());
        assert!(ks_distance(&[], 0.0, 1.0).is_err());
    }

    #[test]
    fn ks_affine_invariance() {
        let v: Vec<f64> = (0..500).map(|i| ((i * 37) % 101) as f64 / 13.0).collect();
        let a = ks_distance(&v, 3.0, 2.0).unwrap();
        let w: Vec<f64> = v.iter().map(|x| 5.0 * x - 7.0).collect();
        let b = ks_distance(&w, 5.0 * 3.0 - 7.0, 10.0).unwrap();
        assert_relative_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn grid_shape() {
        let g = default_grid();
        assert_eq!(g.len(), 21);
        assert_relative_eq!(phi(g[0]), 0.025, epsilon = 1e-12);
        assert_relative_eq!(phi(g[20]), 0.975, epsilon = 1e-12);
        assert!(g[10].abs() < 1e-12);
    }

    #[test]
    fn erdos_kac_trend() {
        let prog = Progression::new(4, 1).unwrap();
        let w = builtin("omega", prog).unwrap();
        let small = erdos_kac_report(&w, prog, 10_000, NormalizationKind::SqrtMean).unwrap();
        let large = erdos_kac_report(&w, prog, 1_000_000, NormalizationKind::SqrtMean).unwrap();
        assert!(large.ks_distance < small.ks_distance);
        assert!(matches!(
            erdos_kac_report(&w, prog, 1, NormalizationKind::Sigma),
            Err(Error::Degenerate(_))
        ));
        let s = builtin("omega", Progression::natural()).unwrap();
        let r = erdos_kac_report(&s, Progression::natural(), 1_000_000, NormalizationKind::SqrtMean).unwrap();
        assert!(r.ks_distance > 0.0 && r.ks_distance < 0.5);
    }

    #[test]
    fn sqrt_form_requires_bounded_nonnegative() {
        let f = ArithmeticFunction::strongly_additive(crate::arith_fn::PrimeFunction::of(
            crate::arith_fn::PrimeKind::SqrtLogLog,
        ));
        assert!(erdos_kac_report(&f, Progression::natural(), 1000, NormalizationKind::SqrtMean).is_err());
        assert!(erdos_kac_report(&f, Progression::natural(), 1000, NormalizationKind::Sigma).is_ok());
    }
}

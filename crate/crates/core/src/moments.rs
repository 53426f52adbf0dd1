//! Empirical mean, deviation and central moments of `f(m)` over the members
//! `m ≡ l (mod k)`, `1 <= m <= n`, under the uniform measure.
//!
//! Members are factored block by block; each block feeds a mergeable
//! central-moment accumulator and the blocks are merged in ascending order.

use serde::{Deserialize, Serialize};

use crate::arith_fn::ArithmeticFunction;
use crate::error::{Error, Result};
use crate::sieve::{FactorBlock, MemberFactorizer, Progression, SegmentedSieve, SieveConfig};
use crate::summation::CompensatedSum;

pub const DEFAULT_U_MAX: u32 = 6;
pub const MAX_U_MAX: u32 = 10;

fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = 1.0;
        for j in 1..=i {
            c[i][j] = c[i - 1][j - 1] + if j < i { c[i - 1][j] } else { 0.0 };
        }
    }
    c
}

/// Streaming central moments up to a fixed order with pairwise merge
/// (Pébay's update). Also keeps a compensated raw sum for the mean.
#[derive(Debug, Clone)]
pub struct CentralMoments {
    order: usize,
    count: u64,
    mean: f64,
    raw: CompensatedSum,
    /// `m[p] = Σ (x - mean)^p` for `p = 2..=order`; slots 0 and 1 unused.
    m: Vec<f64>,
    binom: Vec<Vec<f64>>,
}

impl CentralMoments {
    pub fn new(order: u32) -> Self {
        let order = order.max(2) as usize;
        Self {
            order,
            count: 0,
            mean: 0.0,
            raw: CompensatedSum::new(),
            m: vec![0.0; order + 1],
            binom: binomial_table(order),
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Mean from the compensated raw sum.
    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.raw.value() / self.count as f64
        }
    }

    pub fn sum(&self) -> f64 {
        self.raw.value()
    }

    /// Population central moment `μ_p`, `2 <= p <= order`.
    pub fn central(&self, p: u32) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.m[p as usize] / self.count as f64
    }

    pub fn push(&mut self, x: f64) {
        let n_a = self.count as f64;
        let n = n_a + 1.0;
        let delta = x - self.mean;
        // Update from the highest order down so lower sums are still old.
        for p in (2..=self.order).rev() {
            let mut acc = 0.0;
            let mut scale = 1.0;
            for k in 1..=p.saturating_sub(2) {
                scale *= -delta / n;
                acc += self.binom[p][k] * scale * self.m[p - k];
            }
            let tail = (n_a * delta / n).powi(p as i32) * (1.0 - (-1.0 / n_a).powi(p as i32 - 1));
            self.m[p] += acc + if self.count == 0 { 0.0 } else { tail };
        }
        self.mean += delta / n;
        self.raw.add(x);
        self.count += 1;
    }

    pub fn merge(&mut self, other: &CentralMoments) {
        assert_eq!(self.order, other.order, "accumulator orders differ");
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let n_a = self.count as f64;
        let n_b = other.count as f64;
        let n = n_a + n_b;
        let delta = other.mean - self.mean;
        let mut merged = vec![0.0; self.order + 1];
        for p in 2..=self.order {
            let mut acc = self.m[p] + other.m[p];
            let mut sa = 1.0;
            let mut sb = 1.0;
            for k in 1..=p - 2 {
                sa *= -n_b * delta / n;
                sb *= n_a * delta / n;
                acc += self.binom[p][k] * (sa * self.m[p - k] + sb * other.m[p - k]);
            }
            let pi = p as i32;
            acc += (n_a * n_b * delta / n).powi(pi)
                * (1.0 / n_b.powi(pi - 1) - (-1.0 / n_a).powi(pi - 1));
            merged[p] = acc;
        }
        self.m = merged;
        self.mean += delta * n_b / n;
        self.raw.merge(&other.raw);
        self.count += other.count;
    }
}

impl Extend<f64> for CentralMoments {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub n: u64,
    pub prog: Progression,
    pub count: u64,
    /// `A_n`
    pub mean: f64,
    /// `σ_n`
    pub sigma: f64,
    /// `μ_2, …, μ_{u_max}`
    pub central_moments: Vec<f64>,
    pub u_max: u32,
}

impl MomentSummary {
    pub(crate) fn from_accumulator(acc: &CentralMoments, n: u64, prog: Progression, u_max: u32) -> Self {
        let central_moments: Vec<f64> = (2..=u_max).map(|p| acc.central(p)).collect();
        Self {
            n,
            prog,
            count: acc.count(),
            mean: acc.mean(),
            sigma: central_moments[0].max(0.0).sqrt(),
            central_moments,
            u_max,
        }
    }

    /// `μ_u` for `2 <= u <= u_max`.
    pub fn mu(&self, u: u32) -> Option<f64> {
        u.checked_sub(2).and_then(|i| self.central_moments.get(i as usize)).copied()
    }

    /// Summary of an explicit list of values.
    pub fn of_values(values: &[f64], n: u64, prog: Progression, u_max: u32) -> Result<Self> {
        check_u_max(u_max)?;
        if values.is_empty() {
            return Err(Error::EmptyProgression { n, modulus: prog.modulus(), residue: prog.residue() });
        }
        let mut acc = CentralMoments::new(u_max);
        acc.extend(values.iter().copied());
        Ok(Self::from_accumulator(&acc, n, prog, u_max))
    }
}

fn check_u_max(u_max: u32) -> Result<()> {
    if !(2..=MAX_U_MAX).contains(&u_max) {
        return Err(Error::InvalidArgument(format!("u_max must be in 2..={MAX_U_MAX}, got {u_max}")));
    }
    Ok(())
}

fn check_nonempty(prog: Progression, n: u64) -> Result<()> {
    if prog.member_count(n) == 0 {
        return Err(Error::EmptyProgression { n, modulus: prog.modulus(), residue: prog.residue() });
    }
    Ok(())
}

/// Factors all members up to `n` and maps every block through `f`, in
/// ascending block order.
pub fn scan_members<R, F>(prog: Progression, n: u64, config: &SieveConfig, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&FactorBlock) -> Result<R> + Sync,
{
    check_nonempty(prog, n)?;
    MemberFactorizer::new(prog, n, config)?.par_map_blocks(f).into_iter().collect()
}

pub fn empirical_moments(
    func: &ArithmeticFunction,
    prog: Progression,
    n: u64,
    u_max: u32,
) -> Result<MomentSummary> {
    empirical_moments_with(func, prog, n, u_max, &SieveConfig::default())
}

pub fn empirical_moments_with(
    func: &ArithmeticFunction,
    prog: Progression,
    n: u64,
    u_max: u32,
    config: &SieveConfig,
) -> Result<MomentSummary> {
    check_u_max(u_max)?;
    let blocks = scan_members(prog, n, config, |block| {
        let mut acc = CentralMoments::new(u_max);
        for (_, factors) in block.iter() {
            acc.push(func.eval(factors)?);
        }
        Ok(acc)
    })?;
    let mut total = CentralMoments::new(u_max);
    for b in &blocks {
        total.merge(b);
    }
    Ok(MomentSummary::from_accumulator(&total, n, prog, u_max))
}

/// `f(m)` for every member, in increasing `m`.
pub fn progression_values(func: &ArithmeticFunction, prog: Progression, n: u64) -> Result<Vec<f64>> {
    progression_values_with(func, prog, n, &SieveConfig::default())
}

pub fn progression_values_with(
    func: &ArithmeticFunction,
    prog: Progression,
    n: u64,
    config: &SieveConfig,
) -> Result<Vec<f64>> {
    let blocks = scan_members(prog, n, config, |block| {
        block.iter().map(|(_, factors)| func.eval(factors)).collect::<Result<Vec<f64>>>()
    })?;
    Ok(blocks.concat())
}

/// The exact mean `Σ_p f(p)·N_p / count`, where `N_p` counts members up to
/// `n` divisible by `p`, found by solving `m ≡ l (mod k)`, `m ≡ 0 (mod p)`.
pub fn mean_via_counts(func: &ArithmeticFunction, prog: Progression, n: u64) -> Result<f64> {
    mean_via_counts_with(func, prog, n, &SieveConfig::default())
}

pub fn mean_via_counts_with(
    func: &ArithmeticFunction,
    prog: Progression,
    n: u64,
    config: &SieveConfig,
) -> Result<f64> {
    if !func.extension.is_strongly_additive() {
        return Err(Error::NotStronglyAdditive);
    }
    check_nonempty(prog, n)?;
    let count = prog.member_count(n) as f64;
    if n < 2 {
        return Ok(0.0);
    }
    let sieve = SegmentedSieve::new(n, config)?;
    let parts = sieve.par_map_blocks(|primes| -> Result<CompensatedSum> {
        let mut s = CompensatedSum::new();
        for &p in primes {
            let np = prog.multiples_count(p, n);
            if np > 0 {
                s.add(func.prime.at_prime(p)? * np as f64);
            }
        }
        Ok(s)
    });
    let mut total = CompensatedSum::new();
    for part in parts {
        total.merge(&part?);
    }
    Ok(total.value() / count)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevReport {
    pub b_values: Vec<f64>,
    /// `P(|f - A_n| <= b σ_n)` per `b`.
    pub coverage: Vec<f64>,
    /// `1 - 1/b²` per `b`.
    pub bound: Vec<f64>,
    /// `σ_n = 0`: coverage is 1 for every `b`.
    pub degenerate: bool,
}

impl ChebyshevReport {
    pub fn holds(&self) -> bool {
        self.coverage.iter().zip(&self.bound).all(|(c, b)| c >= b)
    }
}

pub const DEFAULT_B_VALUES: [f64; 3] = [1.5, 2.0, 3.0];

fn coverage(values: &[f64], center: f64, radius: f64) -> f64 {
    let inside = values.iter().filter(|&&v| (v - center).abs() <= radius).count();
    inside as f64 / values.len() as f64
}

/// Empirical Chebyshev coverage of `values` around the summary's mean.
pub fn chebyshev_check(summary: &MomentSummary, values: &[f64], b_list: &[f64]) -> Result<ChebyshevReport> {
    if values.len() as u64 != summary.count {
        return Err(Error::InvalidArgument(format!(
            "{} values for a summary of {} members",
            values.len(),
            summary.count
        )));
    }
    if let Some(b) = b_list.iter().find(|b| !(**b > 0.0)) {
        return Err(Error::InvalidArgument(format!("b must be positive, got {b}")));
    }
    let degenerate = summary.sigma == 0.0;
    let coverage = b_list
        .iter()
        .map(|&b| if degenerate { 1.0 } else { coverage(values, summary.mean, b * summary.sigma) })
        .collect();
    Ok(ChebyshevReport {
        b_values: b_list.to_vec(),
        coverage,
        bound: b_list.iter().map(|b| 1.0 - 1.0 / (b * b)).collect(),
        degenerate,
    })
}

/// `b(n) = (ln ln n)^exponent`; any positive exponent grows without bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogPower {
    pub exponent: f64,
}

impl Default for LogLogPower {
    fn default() -> Self {
        Self { exponent: 1.0 / 3.0 }
    }
}

impl LogLogPower {
    pub fn at(&self, n: u64) -> f64 {
        (n as f64).ln().ln().max(0.0).powf(self.exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlnRecord {
    pub n: u64,
    pub b: f64,
    pub mean: f64,
    pub sigma: f64,
    pub bound: f64,
    /// `P(|f - A_n| <= b(n) σ_n)`
    pub coverage_sigma: f64,
    /// `P(|f - A_n| <= b(n) √A_n)`; `None` when `A_n <= 0`.
    pub coverage_sqrt_mean: Option<f64>,
    pub note: Option<String>,
}

pub fn lln_check(
    func: &ArithmeticFunction,
    prog: Progression,
    n_list: &[u64],
    b_of_n: LogLogPower,
) -> Result<Vec<LlnRecord>> {
    if !(b_of_n.exponent > 0.0) {
        return Err(Error::InvalidArgument("b(n) must grow without bound".into()));
    }
    n_list
        .iter()
        .map(|&n| {
            let values = progression_values(func, prog, n)?;
            let summary = MomentSummary::of_values(&values, n, prog, 2)?;
            let b = b_of_n.at(n);
            let (coverage_sigma, mut note) = if summary.sigma == 0.0 {
                (1.0, Some("sigma_n = 0".to_string()))
            } else {
                (coverage(&values, summary.mean, b * summary.sigma), None)
            };
            let coverage_sqrt_mean = if summary.mean > 0.0 {
                Some(coverage(&values, summary.mean, b * summary.mean.sqrt()))
            } else {
                note = Some("A_n <= 0: sqrt(A_n) form skipped".into());
                None
            };
            Ok(LlnRecord {
                n,
                b,
                mean: summary.mean,
                sigma: summary.sigma,
                bound: 1.0 - 1.0 / (b * b),
                coverage_sigma,
                coverage_sqrt_mean,
                note,
            })
        })
        .collect()
}

/// Little-endian `f64` values, one per member.
pub fn write_spill(path: &std::path::Path, values: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(values.len() * 8);
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn read_spill(path: &std::path::Path) -> Result<Vec<f64>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Io(format!("{}: length is not a multiple of 8", path.display())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith_fn::{builtin, PrimeFunction, PrimeKind};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn omega() -> ArithmeticFunction {
        builtin("omega", Progression::natural()).unwrap()
    }

    fn p41() -> Progression {
        Progression::new(4, 1).unwrap()
    }

    fn two_pass(values: &[f64], u: i32) -> f64 {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        values.iter().map(|v| (v - mean).powi(u)).sum::<f64>() / values.len() as f64
    }

    #[test]
    fn omega_on_4_1_up_to_30() {
        let s = empirical_moments(&omega(), p41(), 30, 6).unwrap();
        assert_eq!(s.count, 8);
        assert_eq!(s.mean, 1.0);
        assert_relative_eq!(s.mu(2).unwrap(), 0.25, max_relative = 1e-15);
        assert_relative_eq!(s.sigma, 0.5, max_relative = 1e-15);
        let values = progression_values(&omega(), p41(), 30).unwrap();
        assert_eq!(values, vec![0.0, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0]);
        assert_eq!(mean_via_counts(&omega(), p41(), 30).unwrap(), 1.0);
    }

    #[test]
    fn omega_on_naturals_up_to_10() {
        let s = empirical_moments(&omega(), Progression::natural(), 10, 2).unwrap();
        // ω(1..10) = 0,1,1,1,1,2,1,1,1,2
        assert_relative_eq!(s.mean, 1.1, max_relative = 1e-15);
        assert_relative_eq!(mean_via_counts(&omega(), Progression::natural(), 10).unwrap(), 1.1, max_relative = 1e-15);
    }

    #[test]
    fn zero_function_has_zero_moments() {
        let zero = ArithmeticFunction::strongly_additive(PrimeFunction::constant(0.0));
        let s = empirical_moments(&zero, Progression::new(7, 3).unwrap(), 10_000, 6).unwrap();
        assert_eq!(s.mean, 0.0);
        assert!(s.central_moments.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn count_matches_floor_formula() {
        for (k, l, n) in [(4, 1, 30), (7, 3, 1000), (12, 11, 99_999)] {
            let prog = Progression::new(k, l).unwrap();
            let s = empirical_moments(&omega(), prog, n, 2).unwrap();
            assert_eq!(s.count, (n - l) / k + 1);
        }
    }

    #[test]
    fn empty_and_invalid_inputs() {
        assert!(matches!(empirical_moments(&omega(), Progression::new(10, 7).unwrap(), 5, 2), Err(Error::EmptyProgression { .. })));
        assert!(matches!(mean_via_counts(&omega(), Progression::new(10, 7).unwrap(), 5), Err(Error::EmptyProgression { .. })));
        assert!(empirical_moments(&omega(), p41(), 100, 1).is_err());
        assert!(empirical_moments(&omega(), p41(), 100, 11).is_err());
        let big_omega = builtin("Omega", p41()).unwrap();
        assert_eq!(mean_via_counts(&big_omega, p41(), 100), Err(Error::NotStronglyAdditive));
    }

    #[test]
    fn streaming_matches_two_pass() {
        let f = ArithmeticFunction::strongly_additive(PrimeFunction::of(PrimeKind::SqrtLogLog));
        for prog in [p41(), Progression::natural(), Progression::new(9, 2).unwrap()] {
            let cfg = SieveConfig { block_len: 1 << 12, ..Default::default() };
            let s = empirical_moments_with(&f, prog, 100_000, 6, &cfg).unwrap();
            let values = progression_values(&f, prog, 100_000).unwrap();
            for u in 2..=6 {
                let oracle = two_pass(&values, u as i32);
                assert_relative_eq!(s.mu(u).unwrap(), oracle, max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn translation_invariance() {
        let shifted = ArithmeticFunction::strongly_additive(PrimeFunction::of(PrimeKind::IndicatorOne));
        let values = progression_values(&shifted, p41(), 50_000).unwrap();
        let plus: Vec<f64> = values.iter().map(|v| v + 3.0).collect();
        let a = MomentSummary::of_values(&values, 50_000, p41(), 6).unwrap();
        let b = MomentSummary::of_values(&plus, 50_000, p41(), 6).unwrap();
        assert_relative_eq!(b.mean, a.mean + 3.0, max_relative = 1e-14);
        for (x, y) in a.central_moments.iter().zip(&b.central_moments) {
            assert_relative_eq!(x, y, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn merge_is_order_consistent() {
        let xs: Vec<f64> = (0..5000).map(|i| ((i * 7919) % 103) as f64 / 7.0).collect();
        let mut whole = CentralMoments::new(8);
        whole.extend(xs.iter().copied());
        let mut left = CentralMoments::new(8);
        left.extend(xs[..1234].iter().copied());
        let mut right = CentralMoments::new(8);
        right.extend(xs[1234..].iter().copied());
        left.merge(&right);
        for p in 2..=8 {
            assert_relative_eq!(left.central(p), whole.central(p), max_relative = 1e-10);
        }
    }

    #[test]
    fn chebyshev_examples() {
        let values = progression_values(&omega(), p41(), 30).unwrap();
        let s = empirical_moments(&omega(), p41(), 30, 2).unwrap();
        let r = chebyshev_check(&s, &values, &[1.0, 2.0]).unwrap();
        assert_eq!(r.bound[0], 0.0);
        assert_eq!(r.coverage[1], 1.0);
        assert!(r.holds());

        let values = progression_values(&omega(), p41(), 1_000_000).unwrap();
        let s = MomentSummary::of_values(&values, 1_000_000, p41(), 2).unwrap();
        let r = chebyshev_check(&s, &values, &DEFAULT_B_VALUES).unwrap();
        assert!(r.holds());
        assert!(r.coverage.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn chebyshev_degenerate() {
        let s = MomentSummary::of_values(&[2.0, 2.0], 5, p41(), 2).unwrap();
        let r = chebyshev_check(&s, &[2.0, 2.0], &[1.5]).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.coverage, vec![1.0]);
    }

    #[test]
    fn lln_examples() {
        let recs = lln_check(&omega(), p41(), &[10_000, 1_000_000], LogLogPower::default()).unwrap();
        for r in &recs {
            assert!(r.coverage_sigma > r.bound);
            assert!(r.coverage_sqrt_mean.unwrap() > r.bound);
        }
        let one = lln_check(&omega(), p41(), &[1], LogLogPower::default()).unwrap();
        assert_eq!(one[0].coverage_sigma, 1.0);
    }

    #[test]
    fn spill_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("values.bin");
        let xs = vec![0.0, 1.5, -2.25, f64::MAX];
        write_spill(&path, &xs).unwrap();
        assert_eq!(read_spill(&path).unwrap(), xs);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn mean_identity_small(k in 1u64..=12, l_seed in 0u64..12, n in 1u64..=20_000) {
            let l = if k == 1 { 0 } else { (l_seed..l_seed + k).map(|x| x % k).find(|&x| crate::sieve::gcd(k, x) == 1).unwrap() };
            let prog = Progression::new(k, l).unwrap();
            prop_assume!(prog.member_count(n) > 0);
            let a = empirical_moments(&omega(), prog, n, 2).unwrap().mean;
            let b = mean_via_counts(&omega(), prog, n).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}

//! Prime generation, progression filtering and factorization.
//!
//! Everything downstream sees primes through [`SegmentedSieve`], which walks
//! `[0, limit]` in fixed-length blocks of integers. Block boundaries depend
//! only on the configured block length, never on the worker count, so any
//! reduction done in ascending block order is bit-identical under any
//! parallel schedule.
//!
//! Primes dividing the modulus never show up in a filtered range: with
//! `gcd(k, l) = 1` a prime `p | k` cannot satisfy `p ≡ l (mod k)`.

mod factor_block;
mod spf;

pub use factor_block::{FactorBlock, MemberFactorizer};
pub use spf::{factorize, SpfBlock, SpfSource, SpfTable};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on sieve limits.
pub const DEFAULT_CEILING: u64 = 1 << 34;
/// Default block length, in integers.
pub const DEFAULT_BLOCK_LEN: usize = 1 << 20;

const MIN_BLOCK_LEN: usize = 1 << 10;
const MAX_BLOCK_LEN: usize = 1 << 28;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists. `m = 1` yields `Some(0)`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (i128::from(a % m), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(i128::from(m)) as u64)
}

/// Euler's totient.
pub fn euler_phi(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::ZeroModulus);
    }
    let mut n = k;
    let mut phi = k;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    Ok(phi)
}

/// The arithmetic progression `m ≡ l (mod k)`, `m ≥ 1`.
///
/// `(1, 0)` is the natural series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Progression {
    modulus: u64,
    residue: u64,
}

impl Progression {
    pub fn new(modulus: u64, residue: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        if residue >= modulus {
            return Err(Error::ResidueOutOfRange { modulus, residue });
        }
        if modulus > 1 {
            let g = gcd(modulus, residue);
            if g != 1 {
                return Err(Error::NotCoprime { modulus, residue, gcd: g });
            }
        }
        Ok(Self { modulus, residue })
    }

    pub const fn natural() -> Self {
        Self { modulus: 1, residue: 0 }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn is_natural(&self) -> bool {
        self.modulus == 1
    }

    pub fn contains(&self, m: u64) -> bool {
        m >= 1 && m % self.modulus == self.residue
    }

    /// Smallest member `>= from` (and `>= 1`).
    pub fn first_member_from(&self, from: u64) -> u64 {
        let from = from.max(1);
        let k = self.modulus;
        from + (self.residue + k - from % k) % k
    }

    pub fn first_member(&self) -> u64 {
        self.first_member_from(1)
    }

    /// Number of members in `[1, n]`.
    pub fn member_count(&self, n: u64) -> u64 {
        let first = self.first_member();
        if n < first {
            0
        } else {
            (n - first) / self.modulus + 1
        }
    }

    pub fn members(&self, n: u64) -> impl Iterator<Item = u64> {
        let (k, first) = (self.modulus, self.first_member());
        (0..self.member_count(n)).map(move |t| first + t * k)
    }

    /// The class mod `p·k` holding the members divisible by the prime `p`,
    /// or `None` when `p | k` and no member is divisible by `p`.
    pub fn divisible_class(&self, p: u64) -> Option<u64> {
        let k = self.modulus;
        if k.is_multiple_of(p) {
            return None;
        }
        // r = p·t with p·t ≡ l (mod k)
        let inv = mod_inverse(p % k, k)?;
        let t = (u128::from(self.residue) * u128::from(inv) % u128::from(k)) as u64;
        Some(p * t)
    }

    /// Members in `[1, n]` divisible by the prime `p`.
    pub fn multiples_count(&self, p: u64, n: u64) -> u64 {
        let Some(r) = self.divisible_class(p) else { return 0 };
        let step = p * self.modulus;
        let first = if r == 0 { step } else { r };
        if n < first {
            0
        } else {
            (n - first) / step + 1
        }
    }

    /// `φ(k)`.
    pub fn phi(&self) -> u64 {
        euler_phi(self.modulus).expect("modulus is positive")
    }

    /// Residues coprime to the modulus, ascending.
    pub fn coprime_residues(modulus: u64) -> Result<Vec<Progression>> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        if modulus == 1 {
            return Ok(vec![Progression::natural()]);
        }
        Ok((1..modulus)
            .filter(|&l| gcd(modulus, l) == 1)
            .map(|l| Progression { modulus, residue: l })
            .collect())
    }
}

impl Default for Progression {
    fn default() -> Self {
        Self::natural()
    }
}

impl std::fmt::Display for Progression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveConfig {
    pub ceiling: u64,
    pub block_len: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            ceiling: DEFAULT_CEILING,
            block_len: DEFAULT_BLOCK_LEN,
        }
    }
}

impl SieveConfig {
    pub fn validate(&self, limit: u64) -> Result<()> {
        if limit < 2 {
            return Err(Error::LimitTooSmall(limit));
        }
        if limit > self.ceiling {
            return Err(Error::LimitAboveCeiling {
                limit,
                ceiling: self.ceiling,
            });
        }
        if !(MIN_BLOCK_LEN..=MAX_BLOCK_LEN).contains(&self.block_len) || !self.block_len.is_multiple_of(2) {
            return Err(Error::MemoryBudget {
                block_len: self.block_len,
                min: MIN_BLOCK_LEN,
                max: MAX_BLOCK_LEN,
            });
        }
        Ok(())
    }
}

/// Primes up to `limit` by a plain whole-range sieve. Used for base primes.
pub fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Odd-only segmented sieve of Eratosthenes over `[0, limit]`.
#[derive(Debug, Clone)]
pub struct SegmentedSieve {
    limit: u64,
    block_len: u64,
    base: Vec<u64>,
}

impl SegmentedSieve {
    pub fn new(limit: u64, config: &SieveConfig) -> Result<Self> {
        config.validate(limit)?;
        Ok(Self {
            limit,
            block_len: config.block_len as u64,
            base: simple_sieve(limit.isqrt()),
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn base_primes(&self) -> &[u64] {
        &self.base
    }

    pub fn block_count(&self) -> usize {
        (self.limit / self.block_len + 1) as usize
    }

    /// Half-open integer range `[lo, hi)` covered by block `i`.
    pub fn block_range(&self, i: usize) -> (u64, u64) {
        let lo = i as u64 * self.block_len;
        let hi = (lo + self.block_len).min(self.limit + 1);
        (lo, hi)
    }

    /// Primes in block `i`, ascending.
    pub fn block_primes(&self, i: usize) -> Vec<u64> {
        let (lo, hi) = self.block_range(i);
        let mut out = Vec::new();
        sieve_interval(lo, hi, &self.base, &mut out);
        out
    }

    /// Applies `f` to every block's primes in parallel; results come back in
    /// ascending block order.
    pub fn par_map_blocks<R, F>(&self, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&[u64]) -> R + Sync,
    {
        (0..self.block_count())
            .into_par_iter()
            .map(|i| f(&self.block_primes(i)))
            .collect()
    }

    pub fn blocks(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.block_count()).map(move |i| self.block_primes(i))
    }

    pub fn collect(&self) -> Vec<u64> {
        self.par_map_blocks(|b| b.to_vec()).concat()
    }
}

/// Appends the primes of `[lo, hi)` to `out`. `base` must contain every
/// prime up to `sqrt(hi - 1)`.
fn sieve_interval(lo: u64, hi: u64, base: &[u64], out: &mut Vec<u64>) {
    if lo <= 2 && 2 < hi {
        out.push(2);
    }
    let first_odd = lo | 1;
    if first_odd >= hi {
        return;
    }
    let len = ((hi - first_odd) as usize).div_ceil(2);
    let mut composite = vec![false; len];
    for &p in base.iter().skip(1) {
        let sq = p * p;
        if sq >= hi {
            break;
        }
        let mut start = sq.max(lo.div_ceil(p) * p);
        if start % 2 == 0 {
            start += p;
        }
        let mut j = ((start - first_odd) / 2) as usize;
        while j < len {
            composite[j] = true;
            j += p as usize;
        }
    }
    out.extend(
        composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(j, _)| first_odd + 2 * j as u64)
            .filter(|&m| m > 1),
    );
}

/// Ascending primes `<= limit`, optionally filtered to one residue class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRange {
    pub limit: u64,
    pub filter: Option<Progression>,
    pub primes: Vec<u64>,
}

impl PrimeRange {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn last(&self) -> Option<u64> {
        self.primes.last().copied()
    }
}

pub fn sieve_primes(limit: u64) -> Result<PrimeRange> {
    sieve_primes_with(limit, &SieveConfig::default())
}

pub fn sieve_primes_with(limit: u64, config: &SieveConfig) -> Result<PrimeRange> {
    let sieve = SegmentedSieve::new(limit, config)?;
    Ok(PrimeRange {
        limit,
        filter: None,
        primes: sieve.collect(),
    })
}

pub fn primes_in_progression(limit: u64, prog: Progression) -> Result<PrimeRange> {
    primes_in_progression_with(limit, prog, &SieveConfig::default())
}

pub fn primes_in_progression_with(
    limit: u64,
    prog: Progression,
    config: &SieveConfig,
) -> Result<PrimeRange> {
    let sieve = SegmentedSieve::new(limit, config)?;
    let primes = sieve
        .par_map_blocks(|b| {
            b.iter()
                .copied()
                .filter(|&p| prog.contains(p))
                .collect::<Vec<_>>()
        })
        .concat();
    Ok(PrimeRange {
        limit,
        filter: (!prog.is_natural()).then_some(prog),
        primes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(4).unwrap(), 2);
        assert_eq!(euler_phi(12).unwrap(), 4);
        assert_eq!(euler_phi(97).unwrap(), 96);
        assert_eq!(euler_phi(0), Err(Error::ZeroModulus));
    }

    #[test]
    fn phi_matches_coprime_count() {
        for k in 1..200u64 {
            let count = (0..k).filter(|&l| gcd(k, l) == 1).count() as u64;
            assert_eq!(euler_phi(k).unwrap(), count, "k = {k}");
        }
    }

    #[test]
    fn progression_validation() {
        assert!(Progression::new(4, 1).is_ok());
        assert!(Progression::new(1, 0).is_ok());
        assert_eq!(
            Progression::new(4, 2),
            Err(Error::NotCoprime { modulus: 4, residue: 2, gcd: 2 })
        );
        assert!(matches!(Progression::new(4, 4), Err(Error::ResidueOutOfRange { .. })));
        assert_eq!(Progression::new(0, 0), Err(Error::ZeroModulus));
    }

    #[test]
    fn member_counts() {
        let p = Progression::new(4, 1).unwrap();
        assert_eq!(p.members(30).collect::<Vec<_>>(), vec![1, 5, 9, 13, 17, 21, 25, 29]);
        assert_eq!(p.member_count(30), 8);
        assert_eq!(p.member_count(0), 0);
        let nat = Progression::natural();
        assert_eq!(nat.member_count(10), 10);
        assert_eq!(nat.first_member(), 1);
        let p = Progression::new(7, 3).unwrap();
        assert_eq!(p.member_count(2), 0);
        assert_eq!(p.first_member_from(4), 10);
    }

    #[test]
    fn small_sieves() {
        assert_eq!(sieve_primes(10).unwrap().primes, vec![2, 3, 5, 7]);
        let r = sieve_primes(30).unwrap();
        assert_eq!(r.len(), 10);
        assert_eq!(r.last(), Some(29));
        assert_eq!(sieve_primes(2).unwrap().primes, vec![2]);
        assert_eq!(sieve_primes(1), Err(Error::LimitTooSmall(1)));
    }

    #[test]
    fn ceiling_and_budget() {
        let cfg = SieveConfig { ceiling: 1000, ..Default::default() };
        assert!(matches!(sieve_primes_with(1001, &cfg), Err(Error::LimitAboveCeiling { .. })));
        let cfg = SieveConfig { block_len: 100, ..Default::default() };
        assert!(matches!(sieve_primes_with(1000, &cfg), Err(Error::MemoryBudget { .. })));
    }

    #[test]
    fn progression_filter() {
        let p41 = Progression::new(4, 1).unwrap();
        let p43 = Progression::new(4, 3).unwrap();
        assert_eq!(primes_in_progression(30, p41).unwrap().primes, vec![5, 13, 17, 29]);
        assert_eq!(primes_in_progression(10, p43).unwrap().primes, vec![3, 7]);
        let all = primes_in_progression(30, Progression::natural()).unwrap();
        assert_eq!(all.len(), 10);
        assert_eq!(all.filter, None);
    }

    #[test]
    fn agrees_with_trial_division() {
        let cfg = SieveConfig { block_len: 1 << 12, ..Default::default() };
        let primes = sieve_primes_with(100_000, &cfg).unwrap().primes;
        let expected: Vec<u64> = (2..=100_000).filter(|&n| is_prime_trial(n)).collect();
        assert_eq!(primes, expected);
    }

    #[test]
    fn segmented_matches_monolithic() {
        for &(limit, block) in &[(1_000_000u64, 1usize << 10), (10_000_000, 1 << 20), (9_999_991, 1 << 16)] {
            let cfg = SieveConfig { block_len: block, ..Default::default() };
            assert_eq!(sieve_primes_with(limit, &cfg).unwrap().primes, simple_sieve(limit), "limit {limit}");
        }
    }

    #[test]
    fn residue_partition() {
        let x = 200_000;
        let all = sieve_primes(x).unwrap().primes;
        for k in [3u64, 4, 5, 12, 30] {
            let mut union: Vec<u64> = all.iter().copied().filter(|p| k % p == 0).collect();
            for prog in Progression::coprime_residues(k).unwrap() {
                let part = primes_in_progression(x, prog).unwrap().primes;
                assert!(part.iter().all(|&p| p % k == prog.residue()));
                union.extend(part);
            }
            union.sort_unstable();
            let before = union.len();
            union.dedup();
            assert_eq!(before, union.len(), "overlap for k = {k}");
            assert_eq!(union, all, "k = {k}");
        }
    }

    #[test]
    fn mod_inverse_works() {
        assert_eq!(mod_inverse(3, 4), Some(3));
        assert_eq!(mod_inverse(2, 4), None);
        assert_eq!(mod_inverse(5, 1), Some(0));
        for m in 2..50u64 {
            for a in 1..m {
                if let Some(inv) = mod_inverse(a, m) {
                    assert_eq!(a * inv % m, 1);
                } else {
                    assert_ne!(gcd(a, m), 1);
                }
            }
        }
    }
}

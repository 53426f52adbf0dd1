use crate::error::{Error, Result};
use crate::sieve::simple_sieve;

/// Anything that can report the smallest prime factor of an integer `>= 2`.
pub trait SpfSource {
    fn smallest_prime_factor(&self, m: u64) -> Result<u64>;
}

// Entries hold spf(m) for composite m and 0 for primes (and 0, 1). A
// composite's smallest factor is at most sqrt(m), so 32 bits suffice for
// every m below 2^64.

/// Whole-range SPF table over `[0, limit]`.
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut p = 2usize;
        while p * p <= n {
            if spf[p] == 0 {
                let mut m = p * p;
                while m <= n {
                    if spf[m] == 0 {
                        spf[m] = p as u32;
                    }
                    m += p;
                }
            }
            p += 1;
        }
        Self { spf }
    }

    pub fn limit(&self) -> u64 {
        self.spf.len() as u64 - 1
    }
}

impl SpfSource for SpfTable {
    fn smallest_prime_factor(&self, m: u64) -> Result<u64> {
        match self.spf.get(m as usize) {
            None => Err(Error::SpfOutOfRange(m)),
            Some(_) if m < 2 => Err(Error::SpfOutOfRange(m)),
            Some(0) => Ok(m),
            Some(&p) => Ok(u64::from(p)),
        }
    }
}

/// SPF entries for one block `[start, end)`.
///
/// Queries outside the block (the cofactors met while factoring) fall back
/// to trial division by the block's base primes, which is exact for any
/// `m < end` because a composite below `end` has a factor `<= sqrt(end)`.
#[derive(Debug, Clone)]
pub struct SpfBlock {
    start: u64,
    end: u64,
    spf: Vec<u32>,
    base: Vec<u64>,
}

impl SpfBlock {
    pub fn new(start: u64, end: u64) -> Result<Self> {
        if end <= start {
            return Err(Error::InvalidArgument(format!("empty SPF block [{start}, {end})")));
        }
        let base = simple_sieve((end - 1).isqrt());
        let len = (end - start) as usize;
        let mut spf = vec![0u32; len];
        for &p in &base {
            if p * p >= end {
                break;
            }
            let mut m = (p * p).max(start.div_ceil(p) * p);
            while m < end {
                let slot = &mut spf[(m - start) as usize];
                if *slot == 0 {
                    *slot = p as u32;
                }
                m += p;
            }
        }
        Ok(Self { start, end, spf, base })
    }

    pub fn range(&self) -> (u64, u64) {
        (self.start, self.end)
    }
}

impl SpfSource for SpfBlock {
    fn smallest_prime_factor(&self, m: u64) -> Result<u64> {
        if m < 2 {
            return Err(Error::SpfOutOfRange(m));
        }
        if (self.start..self.end).contains(&m) {
            return Ok(match self.spf[(m - self.start) as usize] {
                0 => m,
                p => u64::from(p),
            });
        }
        if m >= self.end {
            return Err(Error::SpfOutOfRange(m));
        }
        for &p in &self.base {
            if p * p > m {
                break;
            }
            if m.is_multiple_of(p) {
                return Ok(p);
            }
        }
        Ok(m)
    }
}

/// Canonical factorization `m = Π p^a`, primes ascending; empty for `m = 1`.
pub fn factorize<S: SpfSource + ?Sized>(m: u64, source: &S) -> Result<Vec<(u64, u32)>> {
    if m == 0 {
        return Err(Error::FactorZero);
    }
    let mut rest = m;
    let mut out: Vec<(u64, u32)> = Vec::new();
    while rest > 1 {
        let p = source.smallest_prime_factor(rest)?;
        let mut a = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            a += 1;
        }
        out.push((p, a));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_examples() {
        let t = SpfTable::new(1000);
        assert_eq!(factorize(1, &t).unwrap(), vec![]);
        assert_eq!(factorize(360, &t).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(29, &t).unwrap(), vec![(29, 1)]);
        assert_eq!(factorize(0, &t), Err(Error::FactorZero));
        assert_eq!(factorize(1001, &t), Err(Error::SpfOutOfRange(1001)));
    }

    #[test]
    fn table_spf_is_prime_divisor() {
        let t = SpfTable::new(20_000);
        let primes = simple_sieve(20_000);
        for m in 2..=20_000u64 {
            let p = t.smallest_prime_factor(m).unwrap();
            assert_eq!(m % p, 0);
            assert!(primes.binary_search(&p).is_ok());
            assert_eq!(p == m, primes.binary_search(&m).is_ok());
        }
    }

    #[test]
    fn block_agrees_with_table() {
        let t = SpfTable::new(400_000);
        let block = SpfBlock::new(300_000, 400_000).unwrap();
        for m in (300_000..400_000).step_by(7) {
            assert_eq!(block.smallest_prime_factor(m).unwrap(), t.smallest_prime_factor(m).unwrap());
            assert_eq!(factorize(m, &block).unwrap(), factorize(m, &t).unwrap());
        }
        assert!(block.smallest_prime_factor(400_000).is_err());
    }
}

use rayon::prelude::*;

use super::{simple_sieve, Progression, SieveConfig};
use crate::error::{Error, Result};

/// Factorizations of every progression member inside one integer block.
///
/// Stored flat: member `i` owns `factors[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, Default)]
pub struct FactorBlock {
    members: Vec<u64>,
    offsets: Vec<u32>,
    factors: Vec<(u64, u32)>,
}

impl FactorBlock {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, i: usize) -> (u64, &[(u64, u32)]) {
        let lo = self.offsets[i] as usize;
        let hi = self.offsets[i + 1] as usize;
        (self.members[i], &self.factors[lo..hi])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &[(u64, u32)])> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

/// Factors the members `m ≡ l (mod k)`, `1 <= m <= n`, block by block.
///
/// Each block divides out the base primes `p <= sqrt(n)` along the single
/// residue class mod `p·k` that holds the members divisible by `p`; any
/// cofactor left above 1 is a prime larger than `sqrt(n)`.
#[derive(Debug, Clone)]
pub struct MemberFactorizer {
    prog: Progression,
    n: u64,
    block_len: u64,
    base: Vec<u64>,
    // For each base prime: the class mod p·k of members divisible by p, or
    // None when p | k (no member is divisible by p).
    classes: Vec<Option<u64>>,
}

impl MemberFactorizer {
    pub fn new(prog: Progression, n: u64, config: &SieveConfig) -> Result<Self> {
        if n > config.ceiling {
            return Err(Error::LimitAboveCeiling { limit: n, ceiling: config.ceiling });
        }
        config.validate(n.max(2))?;
        let base = simple_sieve(n.isqrt());
        let classes = base.iter().map(|&p| prog.divisible_class(p)).collect();
        Ok(Self {
            prog,
            n,
            block_len: config.block_len as u64,
            base,
            classes,
        })
    }

    pub fn progression(&self) -> Progression {
        self.prog
    }

    pub fn limit(&self) -> u64 {
        self.n
    }

    pub fn block_count(&self) -> usize {
        (self.n / self.block_len + 1) as usize
    }

    pub fn block(&self, i: usize) -> FactorBlock {
        let lo = i as u64 * self.block_len;
        let hi = (lo + self.block_len).min(self.n + 1);
        let k = self.prog.modulus();
        let first = self.prog.first_member_from(lo);
        if first >= hi {
            return FactorBlock { offsets: vec![0], ..Default::default() };
        }
        let count = ((hi - 1 - first) / k + 1) as usize;
        let members: Vec<u64> = (0..count as u64).map(|t| first + t * k).collect();
        let mut rest = members.clone();
        let mut events: Vec<(u32, u64, u32)> = Vec::new();

        for (&p, class) in self.base.iter().zip(&self.classes) {
            let Some(r) = *class else { continue };
            let step = p * k;
            let mut m = first + (r % step + step - first % step) % step;
            while m < hi {
                let idx = ((m - first) / k) as usize;
                let mut a = 0;
                while rest[idx].is_multiple_of(p) {
                    rest[idx] /= p;
                    a += 1;
                }
                events.push((idx as u32, p, a));
                m += step;
            }
        }
        for (idx, &r) in rest.iter().enumerate() {
            if r > 1 {
                events.push((idx as u32, r, 1));
            }
        }

        // Counting sort by member; events were generated in ascending prime
        // order and the large cofactor last, so each member's list stays sorted.
        let mut offsets = vec![0u32; count + 1];
        for &(idx, _, _) in &events {
            offsets[idx as usize + 1] += 1;
        }
        for i in 0..count {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor: Vec<u32> = offsets[..count].to_vec();
        let mut factors = vec![(0u64, 0u32); events.len()];
        for (idx, p, a) in events {
            let slot = &mut cursor[idx as usize];
            factors[*slot as usize] = (p, a);
            *slot += 1;
        }
        FactorBlock { members, offsets, factors }
    }

    /// Maps every block in parallel; results are in ascending block order.
    pub fn par_map_blocks<R, F>(&self, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&FactorBlock) -> R + Sync,
    {
        (0..self.block_count())
            .into_par_iter()
            .map(|i| f(&self.block(i)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{factorize, SpfTable};

    fn cfg(block_len: usize) -> SieveConfig {
        SieveConfig { block_len, ..Default::default() }
    }

    #[test]
    fn matches_spf_factorization() {
        let table = SpfTable::new(60_000);
        for (k, l) in [(1, 0), (4, 1), (4, 3), (6, 5), (12, 7), (7, 3)] {
            let prog = Progression::new(k, l).unwrap();
            let fz = MemberFactorizer::new(prog, 60_000, &cfg(1 << 12)).unwrap();
            let mut seen = 0u64;
            for i in 0..fz.block_count() {
                for (m, f) in fz.block(i).iter() {
                    assert!(prog.contains(m));
                    assert_eq!(f, factorize(m, &table).unwrap().as_slice(), "m = {m}");
                    seen += 1;
                }
            }
            assert_eq!(seen, prog.member_count(60_000));
        }
    }

    #[test]
    fn first_member_and_one() {
        let prog = Progression::new(4, 1).unwrap();
        let fz = MemberFactorizer::new(prog, 30, &cfg(1 << 10)).unwrap();
        let b = fz.block(0);
        let members: Vec<u64> = b.iter().map(|(m, _)| m).collect();
        assert_eq!(members, vec![1, 5, 9, 13, 17, 21, 25, 29]);
        assert!(b.get(0).1.is_empty());
        assert_eq!(b.get(2).1, &[(3, 2)]);
    }
}

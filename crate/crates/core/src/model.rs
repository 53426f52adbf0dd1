//! The independent model `S_n = Σ_p X_p`, where `X_p` takes the value `f(p)`
//! with probability `1/p` and 0 otherwise.
//!
//! Exact moments go through cumulants, which add over independent terms.
//! Monte Carlo draws, per prime, the number of trials in which `X_p` fires
//! and scatters `f(p)` into that many distinct trial slots.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::arith_fn::{FunctionPair, PrimeFunction};
use crate::error::{Error, Result};
use crate::moments::{scan_members, CentralMoments, MomentSummary, MAX_U_MAX};
use crate::prime_sums::prime_power_sum;
use crate::sieve::{Progression, SegmentedSieve, SieveConfig};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliTerm {
    pub p: u64,
    pub value: f64,
    pub success_prob: f64,
}

impl BernoulliTerm {
    pub fn new(p: u64, value: f64) -> Self {
        Self { p, value, success_prob: 1.0 / p as f64 }
    }

    /// `E[X^j]`
    pub fn raw_moment(&self, j: u32) -> f64 {
        self.value.powi(j as i32) * self.success_prob
    }

    /// `κ_1..κ_order` of this term.
    pub fn cumulants(&self, order: u32) -> Vec<f64> {
        let raw: Vec<f64> = (1..=order).map(|j| self.raw_moment(j)).collect();
        cumulants_from_raw(&raw)
    }
}

/// Which primes carry a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictionMode {
    /// Primes `p ≡ l (mod k)`.
    Restricted,
    /// All primes `p ∤ k`.
    Density,
}

impl PredictionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PredictionMode::Restricted => "restricted",
            PredictionMode::Density => "density",
        }
    }

    pub fn includes(&self, prog: Progression, p: u64) -> bool {
        match self {
            PredictionMode::Restricted => prog.contains(p),
            PredictionMode::Density => !prog.modulus().is_multiple_of(p),
        }
    }
}

impl std::str::FromStr for PredictionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "restricted" => Ok(PredictionMode::Restricted),
            "density" => Ok(PredictionMode::Density),
            other => Err(Error::InvalidArgument(format!("unknown mode '{other}'"))),
        }
    }
}

fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![1.0; n + 1]; n + 1];
    for i in 1..=n {
        for j in 1..i {
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
        }
    }
    c
}

/// `κ_n = m_n - Σ_{j=1}^{n-1} C(n-1, j-1) κ_j m_{n-j}` with `raw[i] = m_{i+1}`.
pub fn cumulants_from_raw(raw: &[f64]) -> Vec<f64> {
    let c = binomial_table(raw.len());
    let mut kappa = Vec::with_capacity(raw.len());
    for n in 1..=raw.len() {
        let mut k = raw[n - 1];
        for j in 1..n {
            k -= c[n - 1][j - 1] * kappa[j - 1] * raw[n - j - 1];
        }
        kappa.push(k);
    }
    kappa
}

/// Central moments `μ_1..μ_n` from cumulants: the moment recursion with
/// `κ_1` set to zero.
pub fn central_from_cumulants(kappa: &[f64]) -> Vec<f64> {
    let c = binomial_table(kappa.len());
    let mut mu = vec![1.0]; // μ_0
    for n in 1..=kappa.len() {
        let mut m = 0.0;
        for j in 2..=n {
            m += c[n - 1][j - 1] * kappa[j - 1] * mu[n - j];
        }
        mu.push(m);
    }
    mu.remove(0);
    mu
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMoments {
    pub n: u64,
    pub prog: Progression,
    pub mode: PredictionMode,
    pub u_max: u32,
    /// `κ_1..κ_{u_max}`
    pub cumulants: Vec<f64>,
    /// `μ_1..μ_{u_max}`; `μ_1 = 0`.
    pub central_moments: Vec<f64>,
    /// `Σ f(p)^u / p`, `u = 1..u_max`
    pub paper_approx: Vec<f64>,
    /// `Σ |f(p)|^u / p²`, `u = 1..u_max`
    pub gap_bound: Vec<f64>,
    pub term_count: u64,
}

impl ModelMoments {
    pub fn kappa(&self, j: u32) -> f64 {
        self.cumulants[j as usize - 1]
    }

    pub fn mu(&self, u: u32) -> f64 {
        self.central_moments[u as usize - 1]
    }
}

#[derive(Debug, Clone)]
struct TermSums {
    kappa: Vec<CompensatedSum>,
    approx: Vec<CompensatedSum>,
    gap: Vec<CompensatedSum>,
    count: u64,
}

impl TermSums {
    fn new(order: usize) -> Self {
        Self {
            kappa: vec![CompensatedSum::new(); order],
            approx: vec![CompensatedSum::new(); order],
            gap: vec![CompensatedSum::new(); order],
            count: 0,
        }
    }

    fn add(&mut self, t: &BernoulliTerm) {
        let order = self.kappa.len() as u32;
        for (acc, k) in self.kappa.iter_mut().zip(t.cumulants(order)) {
            acc.add(k);
        }
        let p = t.p as f64;
        for u in 1..=order {
            let fu = t.value.powi(u as i32);
            self.approx[u as usize - 1].add(fu / p);
            self.gap[u as usize - 1].add(fu.abs() / (p * p));
        }
        self.count += 1;
    }

    fn merge(&mut self, other: &TermSums) {
        for (a, b) in [(&mut self.kappa, &other.kappa), (&mut self.approx, &other.approx), (&mut self.gap, &other.gap)] {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        self.count += other.count;
    }
}

fn check_u_max(u_max: u32) -> Result<()> {
    if !(1..=MAX_U_MAX).contains(&u_max) {
        return Err(Error::InvalidArgument(format!("u_max must be in 1..={MAX_U_MAX}, got {u_max}")));
    }
    Ok(())
}

fn finish(sums: TermSums, n: u64, prog: Progression, mode: PredictionMode, u_max: u32) -> ModelMoments {
    let values = |v: &[CompensatedSum]| v.iter().map(CompensatedSum::value).collect::<Vec<f64>>();
    let cumulants = values(&sums.kappa);
    ModelMoments {
        n,
        prog,
        mode,
        u_max,
        central_moments: central_from_cumulants(&cumulants),
        cumulants,
        paper_approx: values(&sums.approx),
        gap_bound: values(&sums.gap),
        term_count: sums.count,
    }
}

/// Moments of a model over an explicit list of terms.
pub fn moments_of_terms(terms: &[BernoulliTerm], u_max: u32) -> Result<Vec<f64>> {
    check_u_max(u_max)?;
    let mut sums = TermSums::new(u_max as usize);
    for t in terms {
        sums.add(t);
    }
    Ok(central_from_cumulants(&sums.kappa.iter().map(CompensatedSum::value).collect::<Vec<_>>()))
}

/// Applies `f` to each sieve block's model terms, in ascending block order.
fn map_term_blocks<R, F>(
    spec: &PrimeFunction,
    prog: Progression,
    n: u64,
    mode: PredictionMode,
    config: &SieveConfig,
    f: F,
) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&[BernoulliTerm]) -> R + Sync,
{
    if n < 2 || n < spec.start_prime() {
        return Ok(Vec::new());
    }
    let sieve = SegmentedSieve::new(n, config)?;
    sieve
        .par_map_blocks(|primes| -> Result<R> {
            let mut terms = Vec::new();
            for &p in primes {
                if p >= spec.start_prime() && mode.includes(prog, p) {
                    terms.push(BernoulliTerm::new(p, spec.at_prime(p)?));
                }
            }
            Ok(f(&terms))
        })
        .into_iter()
        .collect()
}

/// Every model term for primes `p <= n`, ascending.
pub fn model_terms(spec: &PrimeFunction, prog: Progression, n: u64, mode: PredictionMode) -> Result<Vec<BernoulliTerm>> {
    Ok(map_term_blocks(spec, prog, n, mode, &SieveConfig::default(), <[BernoulliTerm]>::to_vec)?.concat())
}

pub fn exact_moments(
    spec: &PrimeFunction,
    prog: Progression,
    n: u64,
    u_max: u32,
    mode: PredictionMode,
) -> Result<ModelMoments> {
    exact_moments_with(spec, prog, n, u_max, mode, &SieveConfig::default())
}

pub fn exact_moments_with(
    spec: &PrimeFunction,
    prog: Progression,
    n: u64,
    u_max: u32,
    mode: PredictionMode,
    config: &SieveConfig,
) -> Result<ModelMoments> {
    check_u_max(u_max)?;
    let order = u_max as usize;
    let blocks = map_term_blocks(spec, prog, n, mode, config, |terms| {
        let mut s = TermSums::new(order);
        for t in terms {
            s.add(t);
        }
        s
    })?;
    let mut total = TermSums::new(order);
    for b in &blocks {
        total.merge(b);
    }
    Ok(finish(total, n, prog, mode, u_max))
}

/// The paper's asymptotic for `μ_u`: `Σ_{p<=n, p≡l (k)} f(p)^u / p`.
pub fn paper_central_moment(spec: &PrimeFunction, prog: Progression, n: u64, u: u32) -> Result<f64> {
    if u < 2 {
        return Err(Error::InvalidArgument("central moments start at order 2".into()));
    }
    if n < 2 {
        return Ok(0.0);
    }
    Ok(prime_power_sum(spec, u, n, prog)?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub seed: u64,
    pub trials: usize,
    pub values: Vec<f64>,
}

impl SampleSet {
    pub fn mean(&self) -> f64 {
        self.values.iter().copied().collect::<CompensatedSum>().value() / self.trials as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.trials < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss: CompensatedSum = self.values.iter().map(|v| (v - m) * (v - m)).collect();
        ss.value() / (self.trials - 1) as f64
    }
}

/// Random stream for prime `p`: keyed by `(seed, p)`, independent of the
/// order in which primes are visited.
fn prime_stream(seed: u64, p: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p);
    rng
}

/// Trial slots in which `X_p` fires.
fn firing_slots(seed: u64, p: u64, trials: usize) -> Vec<usize> {
    let mut rng = prime_stream(seed, p);
    let hits = Binomial::new(trials as u64, 1.0 / p as f64)
        .expect("1/p is a valid probability")
        .sample(&mut rng) as usize;
    if hits == 0 {
        return Vec::new();
    }
    index::sample(&mut rng, trials, hits).into_vec()
}

pub fn sample(spec: &PrimeFunction, prog: Progression, n: u64, trials: usize, seed: u64) -> Result<SampleSet> {
    sample_with(spec, prog, n, trials, seed, PredictionMode::Restricted, &SieveConfig::default())
}

pub fn sample_with(
    spec: &PrimeFunction,
    prog: Progression,
    n: u64,
    trials: usize,
    seed: u64,
    mode: PredictionMode,
    config: &SieveConfig,
) -> Result<SampleSet> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let blocks = map_term_blocks(spec, prog, n, mode, config, |terms| {
        terms
            .iter()
            .filter(|t| t.value != 0.0)
            .map(|t| (t.value, firing_slots(seed, t.p, trials)))
            .collect::<Vec<_>>()
    })?;
    // Scatter sequentially in prime order so the floating-point additions
    // into each slot happen in a fixed order.
    let mut values = vec![0.0; trials];
    for (value, slots) in blocks.iter().flatten() {
        for &s in slots {
            values[s] += value;
        }
    }
    Ok(SampleSet { seed, trials, values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LindebergReport {
    pub epsilon: f64,
    /// `D(n) = Σ f(p)² / p`
    pub d_n: f64,
    /// `(1/D(n)) Σ_{|f(p)| > ε √D(n)} f(p)² / p`
    pub ratio: f64,
    /// `max |f(p)| / √D(n)`
    pub max_ratio: f64,
}

pub fn lindeberg_check(spec: &PrimeFunction, prog: Progression, n: u64, epsilon: f64) -> Result<LindebergReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let terms = model_terms(spec, prog, n, PredictionMode::Restricted)?;
    let d_n: f64 = terms.iter().map(|t| t.value * t.value / t.p as f64).collect::<CompensatedSum>().value();
    if !(d_n > 0.0) {
        return Err(Error::Degenerate("D(n) = 0: no prime contributes".into()));
    }
    let threshold = epsilon * d_n.sqrt();
    let tail: CompensatedSum = terms
        .iter()
        .filter(|t| t.value.abs() > threshold)
        .map(|t| t.value * t.value / t.p as f64)
        .collect();
    let max_f = terms.iter().fold(0.0f64, |m, t| m.max(t.value.abs()));
    Ok(LindebergReport {
        epsilon,
        d_n,
        ratio: tail.value() / d_n,
        max_ratio: max_f / d_n.sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub reference: MomentSummary,
    pub compared: MomentSummary,
    /// Moments of `f(m) - f*(m)` over the same members.
    pub difference: MomentSummary,
    /// `compared.mean - reference.mean`
    pub mean_difference: f64,
    /// `compared.μ_u - reference.μ_u`, `u = 2..u_max`
    pub mu_differences: Vec<f64>,
    /// For class-H pairs, `Σ |Δf(p^a)| · (1/p^a)(1 - 1/p)` over overrides
    /// with `p ∤ k`.
    pub override_contribution: Option<f64>,
    /// `Σ f*(p)^u / p` for `u = 1..u_max`, over primes in the class.
    pub restricted_sum: Vec<f64>,
    /// The same over all primes `p ∤ k`.
    pub density_sum: Vec<f64>,
}

pub fn compare_pair(pair: &FunctionPair, prog: Progression, n: u64, u_max: u32) -> Result<PairComparison> {
    if !(2..=MAX_U_MAX).contains(&u_max) {
        return Err(Error::InvalidArgument(format!("u_max must be in 2..={MAX_U_MAX}, got {u_max}")));
    }
    let blocks = scan_members(prog, n, &SieveConfig::default(), |block| {
        let mut acc = [CentralMoments::new(u_max), CentralMoments::new(u_max), CentralMoments::new(u_max)];
        for (_, factors) in block.iter() {
            let a = pair.reference.eval(factors)?;
            let b = pair.compared.eval(factors)?;
            acc[0].push(a);
            acc[1].push(b);
            acc[2].push(b - a);
        }
        Ok(acc)
    })?;
    let mut total = [CentralMoments::new(u_max), CentralMoments::new(u_max), CentralMoments::new(u_max)];
    for b in &blocks {
        for (t, part) in total.iter_mut().zip(b) {
            t.merge(part);
        }
    }
    let summaries: Vec<MomentSummary> =
        total.iter().map(|acc| MomentSummary::from_accumulator(acc, n, prog, u_max)).collect();
    let [reference, compared, difference]: [MomentSummary; 3] =
        summaries.try_into().expect("three accumulators");

    let override_contribution = (pair.class == crate::arith_fn::PairClass::H).then(|| {
        let ext = &pair.compared.extension;
        let base = crate::arith_fn::AdditiveExtension { mode: ext.mode, overrides: Default::default() };
        ext.overrides
            .iter()
            .filter(|((p, _), _)| !prog.modulus().is_multiple_of(*p))
            .map(|(&(p, a), &v)| {
                let f_p = pair.compared.prime.at_prime(p).unwrap_or(0.0);
                let delta = (v - base.prime_power(f_p, p, a)).abs();
                let pf = p as f64;
                delta * pf.powi(-(a as i32)) * (1.0 - 1.0 / pf)
            })
            .sum()
    });

    let restricted = exact_moments(&pair.reference.prime, prog, n, u_max, PredictionMode::Restricted)?;
    let density = exact_moments(&pair.reference.prime, prog, n, u_max, PredictionMode::Density)?;
    Ok(PairComparison {
        mean_difference: difference.mean,
        mu_differences: compared
            .central_moments
            .iter()
            .zip(&reference.central_moments)
            .map(|(b, a)| b - a)
            .collect(),
        reference,
        compared,
        difference,
        override_contribution,
        restricted_sum: restricted.paper_approx,
        density_sum: density.paper_approx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith_fn::{builtin, ArithmeticFunction, PairClass, PrimeKind};
    use approx::assert_relative_eq;

    fn p41() -> Progression {
        Progression::new(4, 1).unwrap()
    }

    /// Central moments by enumerating all `2^m` outcomes.
    fn brute_force(terms: &[BernoulliTerm], u_max: u32) -> Vec<f64> {
        let outcomes: Vec<(f64, f64)> = (0u32..1 << terms.len())
            .map(|mask| {
                let mut prob = 1.0;
                let mut s = 0.0;
                for (i, t) in terms.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        prob *= t.success_prob;
                        s += t.value;
                    } else {
                        prob *= 1.0 - t.success_prob;
                    }
                }
                (prob, s)
            })
            .collect();
        let mean: f64 = outcomes.iter().map(|(p, s)| p * s).sum();
        (1..=u_max)
            .map(|u| outcomes.iter().map(|(p, s)| p * (s - mean).powi(u as i32)).sum())
            .collect()
    }

    #[test]
    fn single_term() {
        let t = BernoulliTerm::new(5, 1.0);
        let k = t.cumulants(3);
        assert_relative_eq!(k[0], 0.2, max_relative = 1e-15);
        let mu = central_from_cumulants(&k);
        assert_eq!(mu[0], 0.0);
        assert_relative_eq!(mu[1], 0.16, max_relative = 1e-14);
        assert_relative_eq!(mu[2], 0.096, max_relative = 1e-13);
    }

    #[test]
    fn naturals_to_ten() {
        let m = exact_moments(&PrimeFunction::constant(1.0), Progression::natural(), 10, 4, PredictionMode::Restricted).unwrap();
        assert_relative_eq!(m.kappa(1), 0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0, max_relative = 1e-15);
        assert_eq!(m.term_count, 4);
    }

    #[test]
    fn empty_prime_set() {
        let f = PrimeFunction::of(PrimeKind::OneOverLogLog);
        let m = exact_moments(&f, p41(), 10, 6, PredictionMode::Restricted).unwrap();
        assert!(m.cumulants.iter().chain(&m.central_moments).all(|&x| x == 0.0));
        assert_eq!(paper_central_moment(&f, p41(), 10, 2).unwrap(), 0.0);
    }

    #[test]
    fn matches_brute_force_on_ten_primes() {
        let primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
        for kind in ["one", "const:-0.7", "sqrtloglog", "one_minus_invp"] {
            let f = PrimeFunction::of(kind.parse().unwrap());
            let terms: Vec<BernoulliTerm> = primes.iter().map(|&p| BernoulliTerm::new(p, f.at_prime(p).unwrap())).collect();
            let fast = moments_of_terms(&terms, 6).unwrap();
            let slow = brute_force(&terms, 6);
            for u in 1..6 {
                assert_relative_eq!(fast[u], slow[u], max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn variance_identity_and_gap() {
        let f = PrimeFunction::constant(1.0);
        let m = exact_moments(&f, p41(), 1_000_000, 6, PredictionMode::Restricted).unwrap();
        let terms = model_terms(&f, p41(), 1_000_000, PredictionMode::Restricted).unwrap();
        let closed: f64 = terms.iter().map(|t| t.value * t.value * (1.0 / t.p as f64 - 1.0 / (t.p * t.p) as f64)).collect::<CompensatedSum>().value();
        assert_relative_eq!(m.mu(2), closed, max_relative = 1e-12);
        assert!((m.mu(2) - m.paper_approx[1]).abs() <= m.gap_bound[1]);
        assert_relative_eq!(paper_central_moment(&f, p41(), 30, 2).unwrap(), 0.370229, epsilon = 1e-6);
    }

    #[test]
    fn density_mode_includes_more_primes() {
        let f = PrimeFunction::constant(1.0);
        let r = exact_moments(&f, p41(), 100, 2, PredictionMode::Restricted).unwrap();
        let d = exact_moments(&f, p41(), 100, 2, PredictionMode::Density).unwrap();
        assert!(d.term_count > r.term_count);
        let all = exact_moments(&f, Progression::natural(), 100, 2, PredictionMode::Restricted).unwrap();
        // p ∤ 4 drops only p = 2
        assert_eq!(d.term_count + 1, all.term_count);
    }

    #[test]
    fn sampling_support_and_determinism() {
        let f = PrimeFunction::constant(1.0);
        let s = sample(&f, Progression::natural(), 10, 1, 7).unwrap();
        assert!((0.0..=4.0).contains(&s.values[0]) && s.values[0].fract() == 0.0);
        let a = sample(&f, p41(), 100_000, 5000, 42).unwrap();
        let b = sample(&f, p41(), 100_000, 5000, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_with(&f, p41(), 100_000, 5000, 42, PredictionMode::Restricted, &SieveConfig { block_len: 1 << 12, ..Default::default() }).unwrap();
        assert_eq!(a.values, c.values);
        assert!(sample(&f, p41(), 100, 0, 1).is_err());
    }

    #[test]
    fn sample_mean_matches_kappa() {
        let f = PrimeFunction::constant(1.0);
        let m = exact_moments(&f, p41(), 1_000_000, 2, PredictionMode::Restricted).unwrap();
        let s = sample(&f, p41(), 1_000_000, 20_000, 3).unwrap();
        let z = (s.mean() - m.kappa(1)) / (m.kappa(2) / 20_000.0).sqrt();
        assert!(z.abs() < 4.0, "z = {z}");
    }

    #[test]
    fn lindeberg_examples() {
        let one = PrimeFunction::constant(1.0);
        let r = lindeberg_check(&one, Progression::natural(), 100_000, 1.0).unwrap();
        assert!(r.d_n > 1.0);
        assert_eq!(r.ratio, 0.0);
        let f = PrimeFunction::of(PrimeKind::SqrtLogLog);
        let r = lindeberg_check(&f, Progression::natural(), 1_000_000, 0.5).unwrap();
        assert_relative_eq!(r.max_ratio, (1e6f64.ln().ln()).sqrt() / r.d_n.sqrt(), max_relative = 1e-3);
        let g = PrimeFunction::of(PrimeKind::OneOverLogLog);
        assert!(matches!(lindeberg_check(&g, p41(), 10, 0.1), Err(Error::Degenerate(_))));
    }

    #[test]
    fn identical_pair_has_zero_differences() {
        let w = builtin("omega", p41()).unwrap();
        let pair = FunctionPair::new(w.clone(), w, PairClass::V).unwrap();
        let c = compare_pair(&pair, p41(), 10_000, 4).unwrap();
        assert_eq!(c.mean_difference, 0.0);
        assert!(c.mu_differences.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn omega_pair_difference_is_extra_multiplicity() {
        let w = builtin("omega", p41()).unwrap();
        let big = builtin("Omega", p41()).unwrap();
        let pair = FunctionPair::new(w.clone(), big.clone(), PairClass::H).unwrap();
        let c = compare_pair(&pair, p41(), 30, 2).unwrap();
        // members 1,5,9,13,17,21,25,29: Ω - ω = 1 for 9 and 25
        assert_relative_eq!(c.mean_difference, 0.25, max_relative = 1e-15);
        assert_eq!(c.override_contribution, Some(0.0));

        let ov = ArithmeticFunction::new(w.prime.clone(), w.extension.clone().with_override(5, 2, 3.0));
        let pair = FunctionPair::new(w, ov, PairClass::H).unwrap();
        let c = compare_pair(&pair, p41(), 1000, 2).unwrap();
        assert_relative_eq!(c.override_contribution.unwrap(), 2.0 / 25.0 * 0.8, max_relative = 1e-15);
        assert_eq!(c.restricted_sum.len(), 2);
    }
}

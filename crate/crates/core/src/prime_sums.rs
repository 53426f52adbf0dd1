//! Sums `Σ f(p)^u / p` over primes in a residue class, and their asymptotics.
//!
//! Exact sums are accumulated per sieve block with compensated summation and
//! reduced in ascending block order, so values are bit-identical for any
//! worker count.
//!
//! The asymptotic main term is `(1/φ(k)) ∫_{p₀}^x g(t)/ln t dt` with
//! `g(t) = f(t)^u / t`. Integrals are evaluated in `w = ln ln t`, where
//! `dt/(t ln t) = dw` and every catalogued integrand is smooth and bounded.

use serde::{Deserialize, Serialize};

use crate::arith_fn::{PrimeFunction, PrimeKind};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, SimpsonConfig};
use crate::sieve::{euler_phi, Progression, SegmentedSieve, SieveConfig};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeSumResult {
    pub x: u64,
    pub prog: Progression,
    pub u: u32,
    pub value: f64,
    /// Primes `p <= x`, `p ≡ l (mod k)`, `p >= p₀`.
    pub term_count: u64,
    pub compensated: bool,
}

/// Exact sums of `term(p)` over primes of `prog` up to each checkpoint, in
/// one sieve pass. Checkpoints must be strictly increasing and `>= 2`.
pub fn prime_term_sums_at<F>(
    term: F,
    prog: Progression,
    checkpoints: &[u64],
    config: &SieveConfig,
) -> Result<Vec<(f64, u64)>>
where
    F: Fn(u64) -> Result<Option<f64>> + Sync,
{
    validate_checkpoints(checkpoints, 2u64)?;
    let Some(&limit) = checkpoints.last() else {
        return Ok(Vec::new());
    };
    let sieve = SegmentedSieve::new(limit, config)?;
    let per_block = sieve.par_map_blocks(|primes| -> Result<Vec<(CompensatedSum, u64)>> {
        let mut acc = vec![(CompensatedSum::new(), 0u64); checkpoints.len()];
        let mut slot = 0;
        for &p in primes {
            if !prog.contains(p) {
                continue;
            }
            while checkpoints[slot] < p {
                slot += 1;
            }
            if let Some(v) = term(p)? {
                acc[slot].0.add(v);
                acc[slot].1 += 1;
            }
        }
        Ok(acc)
    });
    let mut totals = vec![(CompensatedSum::new(), 0u64); checkpoints.len()];
    for block in per_block {
        for (total, part) in totals.iter_mut().zip(block?) {
            total.0.merge(&part.0);
            total.1 += part.1;
        }
    }
    let mut running = CompensatedSum::new();
    let mut count = 0;
    Ok(totals
        .into_iter()
        .map(|(s, c)| {
            running.merge(&s);
            count += c;
            (running.value(), count)
        })
        .collect())
}

fn validate_checkpoints<T: PartialOrd + Copy>(checkpoints: &[T], two: T) -> Result<()> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be strictly increasing".into()));
    }
    if checkpoints.first().is_some_and(|&c| c < two) {
        return Err(Error::InvalidArgument("checkpoints must be >= 2".into()));
    }
    Ok(())
}

fn power_term(spec: &PrimeFunction, u: u32) -> impl Fn(u64) -> Result<Option<f64>> + Sync + '_ {
    move |p| {
        if p < spec.start_prime() {
            return Ok(None);
        }
        let f = spec.at_prime(p)?;
        Ok(Some(f.powi(u as i32) / p as f64))
    }
}

/// `Σ_{p<=x, p≡l (k), p>=p₀} f(p)^u / p` at several limits in one pass.
pub fn prime_power_sums_at(
    spec: &PrimeFunction,
    u: u32,
    checkpoints: &[u64],
    prog: Progression,
    config: &SieveConfig,
) -> Result<Vec<PrimeSumResult>> {
    if u == 0 {
        return Err(Error::InvalidArgument("order u must be >= 1".into()));
    }
    let sums = prime_term_sums_at(power_term(spec, u), prog, checkpoints, config)?;
    Ok(checkpoints
        .iter()
        .zip(sums)
        .map(|(&x, (value, term_count))| PrimeSumResult {
            x,
            prog,
            u,
            value,
            term_count,
            compensated: true,
        })
        .collect())
}

pub fn prime_power_sum(spec: &PrimeFunction, u: u32, x: u64, prog: Progression) -> Result<PrimeSumResult> {
    prime_power_sum_with(spec, u, x, prog, &SieveConfig::default())
}

pub fn prime_power_sum_with(
    spec: &PrimeFunction,
    u: u32,
    x: u64,
    prog: Progression,
    config: &SieveConfig,
) -> Result<PrimeSumResult> {
    Ok(prime_power_sums_at(spec, u, &[x], prog, config)?.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaTag {
    GenericQuadrature,
    Lnlnln,
    PowerOfLoglog,
    Mertens,
}

impl FormulaTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            FormulaTag::GenericQuadrature => "generic-quadrature",
            FormulaTag::Lnlnln => "lnlnln",
            FormulaTag::PowerOfLoglog => "power-of-loglog",
            FormulaTag::Mertens => "mertens",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEstimate {
    /// Leading term as stated for the closed forms; the definite integral
    /// over `[p₀, x]` for quadrature.
    pub main_term: f64,
    /// The same antiderivative taken over `[p₀, x]`, when elementary.
    pub anchored_term: Option<f64>,
    /// Size of `O(|g(x)| x^{1/2} ln x)`.
    pub error_magnitude_1: f64,
    /// Size of `O(∫ |g'(t)| t^{1/2} ln t dt)`.
    pub error_magnitude_2: f64,
    pub formula_tag: FormulaTag,
}

/// `(F, dF/dL)` with `F = f^u`, at `L = ln t`.
fn power_at_log(kind: &PrimeKind, u: u32, log_t: f64) -> Result<(f64, f64)> {
    let (f, df) = kind.smooth_at_log(log_t)?;
    let fu = f.powi(u as i32);
    let dfu = if u == 1 { df } else { f64::from(u) * f.powi(u as i32 - 1) * df };
    Ok((fu, dfu))
}

fn check_range(spec: &PrimeFunction, x: f64) -> Result<f64> {
    let p0 = spec.start_prime() as f64;
    if !(x > p0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x = {x} must exceed p0 = {p0}")));
    }
    // Probe smoothness once so non-smooth kinds fail before quadrature.
    spec.kind().smooth_at_log(p0.ln())?;
    Ok(p0)
}

fn quadrature_in_w(spec: &PrimeFunction, u: u32, x: f64, quad: &SimpsonConfig) -> Result<f64> {
    let p0 = check_range(spec, x)?;
    let kind = spec.kind();
    let integrand = |w: f64| power_at_log(kind, u, w.exp()).map(|(fu, _)| fu).unwrap_or(f64::NAN);
    Ok(integrate(integrand, p0.ln().ln(), x.ln().ln(), quad)?.value)
}

fn error_magnitudes(spec: &PrimeFunction, u: u32, x: f64, quad: &SimpsonConfig) -> Result<(f64, f64)> {
    let p0 = check_range(spec, x)?;
    let kind = spec.kind();
    let lx = x.ln();
    let (fu_x, _) = power_at_log(kind, u, lx)?;
    // |g(x)| x^{1/2} ln x with g = F/t
    let err1 = fu_x.abs() * lx * (-0.5 * lx).exp();
    // g'(t) = (dF/dL - F)/t², so |g'| t^{1/2} ln t dt = |dF/dL - F| e^{-L/2} L dL
    let integrand = |l: f64| {
        power_at_log(kind, u, l)
            .map(|(fu, dfu)| (dfu - fu).abs() * (-0.5 * l).exp() * l)
            .unwrap_or(f64::NAN)
    };
    let err2 = integrate(integrand, p0.ln(), lx, quad)?.value;
    Ok((err1, err2))
}

pub fn integral_asymptotic(spec: &PrimeFunction, u: u32, x: f64, k: u64) -> Result<AsymptoticEstimate> {
    integral_asymptotic_with(spec, u, x, k, &SimpsonConfig::default())
}

pub fn integral_asymptotic_with(
    spec: &PrimeFunction,
    u: u32,
    x: f64,
    k: u64,
    quad: &SimpsonConfig,
) -> Result<AsymptoticEstimate> {
    let phi = euler_phi(k)? as f64;
    let main = quadrature_in_w(spec, u, x, quad)? / phi;
    let (e1, e2) = error_magnitudes(spec, u, x, quad)?;
    Ok(AsymptoticEstimate {
        main_term: main,
        anchored_term: Some(main),
        error_magnitude_1: e1,
        error_magnitude_2: e2,
        formula_tag: FormulaTag::GenericQuadrature,
    })
}

/// Closed form `(leading, anchored)` of `∫ F dw` for the catalogued kinds.
fn closed_form(kind: &PrimeKind, u: u32, x: f64, p0: f64) -> Result<(f64, Option<f64>, FormulaTag)> {
    let (w, w0) = (x.ln().ln(), p0.ln().ln());
    Ok(match kind {
        PrimeKind::Constant(c) => {
            let cu = c.powi(u as i32);
            (cu * w, Some(cu * (w - w0)), FormulaTag::Mertens)
        }
        PrimeKind::IndicatorOne => (w, Some(w - w0), FormulaTag::Mertens),
        PrimeKind::OneOverLogLog if u == 1 => (w.ln(), Some(w.ln() - w0.ln()), FormulaTag::Lnlnln),
        PrimeKind::SqrtLogLog => {
            let e = f64::from(u) / 2.0 + 1.0;
            (w.powf(e) / e, Some((w.powf(e) - w0.powf(e)) / e), FormulaTag::PowerOfLoglog)
        }
        PrimeKind::OneMinusOneOverLog if u == 1 => {
            // ∫ (1 - e^{-w}) dw = w + e^{-w}
            (w, Some((w - w0) + (1.0 / x.ln() - 1.0 / p0.ln())), FormulaTag::Mertens)
        }
        PrimeKind::OneMinusOneOverP if u == 1 => (w, None, FormulaTag::Mertens),
        PrimeKind::Scaled { factor, inner } => {
            let (lead, anchored, tag) = closed_form(inner, u, x, p0)?;
            let cu = factor.powi(u as i32);
            (cu * lead, anchored.map(|a| cu * a), tag)
        }
        _ => return Err(Error::NoClosedForm),
    })
}

pub fn closed_form_asymptotic(spec: &PrimeFunction, u: u32, x: f64, k: u64) -> Result<AsymptoticEstimate> {
    closed_form_asymptotic_with(spec, u, x, k, &SimpsonConfig::default())
}

pub fn closed_form_asymptotic_with(
    spec: &PrimeFunction,
    u: u32,
    x: f64,
    k: u64,
    quad: &SimpsonConfig,
) -> Result<AsymptoticEstimate> {
    let phi = euler_phi(k)? as f64;
    let p0 = spec.start_prime() as f64;
    let (lead, anchored, tag) = closed_form(spec.kind(), u, x, p0)?;
    let (e1, e2) = error_magnitudes(spec, u, x, quad)?;
    Ok(AsymptoticEstimate {
        main_term: lead / phi,
        anchored_term: anchored.map(|a| a / phi),
        error_magnitude_1: e1,
        error_magnitude_2: e2,
        formula_tag: tag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayCase {
    /// `f → C`, constant.
    Case1,
    /// Monotone with limit `C ≠ 0`.
    Case2,
    /// Decays like `C / ln ln p` or slower.
    Case3,
    /// Decays fast enough that `Σ f(p)/p` converges.
    Case4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecayClass {
    pub case: DecayCase,
    pub sign: Sign,
}

impl std::fmt::Display for DecayClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let case = match self.case {
            DecayCase::Case1 => "Case1",
            DecayCase::Case2 => "Case2",
            DecayCase::Case3 => "Case3",
            DecayCase::Case4 => "Case4",
        };
        match self.sign {
            Sign::Positive => write!(f, "{case}"),
            Sign::Negative => write!(f, "{case}-"),
        }
    }
}

/// Leading asymptotic shape of `f(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Zero,
    Constant(f64),
    Limit(f64),
    /// `coef · (ln ln p)^{-exp}`
    LogLogDecay { coef: f64, exp: f64 },
    /// `coef · (ln p)^{-exp}`
    LogDecay { coef: f64, exp: f64 },
    Growing,
}

fn shape(kind: &PrimeKind) -> Result<Shape> {
    Ok(match kind {
        PrimeKind::Constant(c) if *c == 0.0 => Shape::Zero,
        PrimeKind::Constant(c) => Shape::Constant(*c),
        PrimeKind::IndicatorOne => Shape::Constant(1.0),
        PrimeKind::OneMinusOneOverP | PrimeKind::OneMinusOneOverLog => Shape::Limit(1.0),
        PrimeKind::OneOverLogLog => Shape::LogLogDecay { coef: 1.0, exp: 1.0 },
        PrimeKind::OneOverLog => Shape::LogDecay { coef: 1.0, exp: 1.0 },
        PrimeKind::SqrtLogLog => Shape::Growing,
        PrimeKind::Scaled { factor, inner } => {
            if *factor == 0.0 {
                Shape::Zero
            } else {
                match shape(inner)? {
                    Shape::Zero => Shape::Zero,
                    Shape::Constant(c) => Shape::Constant(factor * c),
                    Shape::Limit(c) => Shape::Limit(factor * c),
                    Shape::LogLogDecay { coef, exp } => Shape::LogLogDecay { coef: factor * coef, exp },
                    Shape::LogDecay { coef, exp } => Shape::LogDecay { coef: factor * coef, exp },
                    Shape::Growing => Shape::Growing,
                }
            }
        }
        PrimeKind::ResidueIndicator { .. } | PrimeKind::Tabulated { .. } => {
            return Err(Error::Unclassifiable(format!("{kind} has no symbolic form")))
        }
    })
}

fn sign_of(c: f64) -> Sign {
    if c < 0.0 {
        Sign::Negative
    } else {
        Sign::Positive
    }
}

/// Symbolic decay case of `f(p)^u`.
pub fn classify_decay(spec: &PrimeFunction, u: u32) -> Result<DecayClass> {
    if u == 0 {
        return Err(Error::InvalidArgument("order u must be >= 1".into()));
    }
    let ui = u as i32;
    let uf = f64::from(u);
    Ok(match shape(spec.kind())? {
        Shape::Zero => DecayClass { case: DecayCase::Case4, sign: Sign::Positive },
        Shape::Constant(c) => DecayClass { case: DecayCase::Case1, sign: sign_of(c.powi(ui)) },
        Shape::Limit(c) => DecayClass { case: DecayCase::Case2, sign: sign_of(c.powi(ui)) },
        Shape::LogLogDecay { coef, exp } => {
            // Σ (ln ln p)^{-a} / p converges iff a > 1
            let case = if exp * uf <= 1.0 { DecayCase::Case3 } else { DecayCase::Case4 };
            DecayClass { case, sign: sign_of(coef.powi(ui)) }
        }
        Shape::LogDecay { coef, .. } => DecayClass { case: DecayCase::Case4, sign: sign_of(coef.powi(ui)) },
        Shape::Growing => {
            return Err(Error::Unclassifiable(format!(
                "{} grows without bound; outside the |f(p)| <= 1 cases",
                spec.kind()
            )))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Converging => "converging",
            Verdict::Diverging => "diverging",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Verdict thresholds.
///
/// Partial sums are read as functions of `w = ln ln x`. The slope
/// `ΔS/Δw` on the first and last checkpoint intervals gives a local
/// power-law exponent `a` with `slope ∝ w^{-a}`. `∫ w^{-a} dw` diverges
/// iff `a <= 1`, and exponential decay in `w` (any `(ln x)^{-b}` term)
/// shows up as a large `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeThresholds {
    pub diverging_max_exponent: f64,
    pub converging_min_exponent: f64,
}

impl Default for ProbeThresholds {
    fn default() -> Self {
        Self {
            diverging_max_exponent: 1.25,
            converging_min_exponent: 1.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceProbe {
    pub checkpoints: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub verdict: Verdict,
    /// Estimated slope exponent; `None` with fewer than three checkpoints.
    pub exponent: Option<f64>,
    pub tail_bound: Option<f64>,
}

impl ConvergenceProbe {
    /// Partial-sum increment between two checkpoints present in the probe.
    pub fn increment(&self, from: f64, to: f64) -> Option<f64> {
        let i = self.checkpoints.iter().position(|&c| c == from)?;
        let j = self.checkpoints.iter().position(|&c| c == to)?;
        Some(self.partial_sums[j] - self.partial_sums[i])
    }
}

fn judge(checkpoints: &[f64], sums: &[f64], t: &ProbeThresholds) -> (Verdict, Option<f64>) {
    if checkpoints.len() < 3 {
        return (Verdict::Inconclusive, None);
    }
    let w: Vec<f64> = checkpoints.iter().map(|x| x.ln().ln()).collect();
    let n = w.len();
    let slope = |i: usize| (sums[i + 1] - sums[i]) / (w[i + 1] - w[i]);
    let mid = |i: usize| 0.5 * (w[i] + w[i + 1]);
    let (first, last) = (slope(0), slope(n - 2));
    let scale = sums.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let negligible = |s: f64| s.abs() <= 1e-15 * scale.max(f64::MIN_POSITIVE);
    if negligible(last) {
        return (Verdict::Converging, None);
    }
    if negligible(first) || first.signum() != last.signum() {
        return (Verdict::Inconclusive, None);
    }
    let (wf, wl) = (mid(0), mid(n - 2));
    if wf <= 0.0 {
        return (Verdict::Inconclusive, None);
    }
    let a = (first.abs() / last.abs()).ln() / (wl / wf).ln();
    let verdict = if a <= t.diverging_max_exponent {
        Verdict::Diverging
    } else if a >= t.converging_min_exponent {
        Verdict::Converging
    } else {
        Verdict::Inconclusive
    };
    (verdict, Some(a))
}

/// Checkpoints `10^3, 10^6, 10^12, …, 10^192`.
pub fn default_integral_checkpoints() -> Vec<f64> {
    (0..7).map(|j| 10f64.powi(3 << j)).collect()
}

/// Checkpoints `10^3, 10^4, …, 10^8`.
pub fn default_sum_checkpoints() -> Vec<u64> {
    (3..=8).map(|e| 10u64.pow(e)).collect()
}

/// Probes `I(n) = ∫_{p₀}^n t g'(t) / ln t dt`, `g(t) = f(t)^u / t`.
pub fn divergence_probe(spec: &PrimeFunction, u: u32, checkpoints: &[f64]) -> Result<ConvergenceProbe> {
    divergence_probe_with(spec, u, checkpoints, &SimpsonConfig::default(), &ProbeThresholds::default())
}

pub fn divergence_probe_with(
    spec: &PrimeFunction,
    u: u32,
    checkpoints: &[f64],
    quad: &SimpsonConfig,
    thresholds: &ProbeThresholds,
) -> Result<ConvergenceProbe> {
    validate_checkpoints(checkpoints, 2.0)?;
    let p0 = spec.start_prime() as f64;
    if checkpoints.first().is_some_and(|&c| c <= p0) {
        return Err(Error::InvalidArgument(format!("checkpoints must exceed p0 = {p0}")));
    }
    let kind = spec.kind();
    kind.smooth_at_log(p0.ln())?;
    // t g'(t)/ln t dt = (dF/dL - F) dw
    let integrand = |w: f64| {
        power_at_log(kind, u, w.exp()).map(|(fu, dfu)| dfu - fu).unwrap_or(f64::NAN)
    };
    let mut running = CompensatedSum::new();
    let mut lower = p0.ln().ln();
    let mut sums = Vec::with_capacity(checkpoints.len());
    for &c in checkpoints {
        let upper = c.ln().ln();
        running.add(integrate(integrand, lower, upper, quad)?.value);
        sums.push(running.value());
        lower = upper;
    }
    let (verdict, exponent) = judge(checkpoints, &sums, thresholds);
    Ok(ConvergenceProbe {
        checkpoints: checkpoints.to_vec(),
        partial_sums: sums,
        verdict,
        exponent,
        tail_bound: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    /// `Σ 1/p²`
    InvPSquared,
    /// `Σ 1/(p ln² p)`
    InvPLog2P,
    /// `Σ 1/(p ln p)`
    InvPLogP,
    /// `Σ f(p)^u / p`
    Custom { spec: PrimeFunction, u: u32 },
}

impl Series {
    fn term(&self, p: u64) -> Result<Option<f64>> {
        let t = p as f64;
        Ok(match self {
            Series::InvPSquared => Some(1.0 / (t * t)),
            Series::InvPLog2P => Some(1.0 / (t * t.ln() * t.ln())),
            Series::InvPLogP => Some(1.0 / (t * t.ln())),
            Series::Custom { spec, u } => {
                if p < spec.start_prime() {
                    None
                } else {
                    Some(spec.at_prime(p)?.powi(*u as i32) / t)
                }
            }
        })
    }

    /// Bound on the tail beyond `x` by the integer-progression comparison series.
    fn tail_bound(&self, x: f64, k: u64) -> Option<f64> {
        let k = k as f64;
        match self {
            Series::InvPSquared => Some(1.0 / (x * x) + 1.0 / (k * x)),
            Series::InvPLog2P => {
                let l = x.ln();
                Some(1.0 / (x * l * l) + 1.0 / (k * l))
            }
            _ => None,
        }
    }
}

pub fn convergence_probe(series: &Series, prog: Progression, checkpoints: &[u64]) -> Result<ConvergenceProbe> {
    convergence_probe_with(series, prog, checkpoints, &SieveConfig::default(), &ProbeThresholds::default())
}

pub fn convergence_probe_with(
    series: &Series,
    prog: Progression,
    checkpoints: &[u64],
    config: &SieveConfig,
    thresholds: &ProbeThresholds,
) -> Result<ConvergenceProbe> {
    let sums: Vec<f64> = prime_term_sums_at(|p| series.term(p), prog, checkpoints, config)?
        .into_iter()
        .map(|(s, _)| s)
        .collect();
    let xs: Vec<f64> = checkpoints.iter().map(|&x| x as f64).collect();
    let (verdict, exponent) = judge(&xs, &sums, thresholds);
    Ok(ConvergenceProbe {
        tail_bound: xs.last().and_then(|&x| series.tail_bound(x, prog.modulus())),
        checkpoints: xs,
        partial_sums: sums,
        verdict,
        exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p41() -> Progression {
        Progression::new(4, 1).unwrap()
    }

    #[test]
    fn hand_enumerated_sums() {
        let one = PrimeFunction::constant(1.0);
        let r = prime_power_sum(&one, 1, 30, p41()).unwrap();
        let expected = 1.0 / 5.0 + 1.0 / 13.0 + 1.0 / 17.0 + 1.0 / 29.0;
        assert_relative_eq!(r.value, expected, max_relative = 1e-15);
        assert!((r.value - 0.370229).abs() < 1e-6);
        assert_eq!(r.term_count, 4);
        assert!(r.compensated);

        let r = prime_power_sum(&one, 1, 10, Progression::natural()).unwrap();
        assert_relative_eq!(r.value, 0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0, max_relative = 1e-15);
        assert!((r.value - 1.176190).abs() < 1e-6);
    }

    #[test]
    fn below_start_prime_is_empty() {
        let f = PrimeFunction::of(PrimeKind::OneOverLogLog);
        let r = prime_power_sum(&f, 2, 10, Progression::natural()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.term_count, 0);
    }

    #[test]
    fn rejects_order_zero_and_bad_checkpoints() {
        let one = PrimeFunction::constant(1.0);
        assert!(prime_power_sum(&one, 0, 10, p41()).is_err());
        assert!(prime_power_sums_at(&one, 1, &[100, 10], p41(), &SieveConfig::default()).is_err());
        assert!(prime_power_sum(&one, 1, 1, p41()).is_err());
    }

    #[test]
    fn multi_checkpoint_matches_single() {
        let f = PrimeFunction::of(PrimeKind::SqrtLogLog);
        let cps = [1000, 5000, 100_000];
        let many = prime_power_sums_at(&f, 2, &cps, p41(), &SieveConfig::default()).unwrap();
        for (r, &x) in many.iter().zip(&cps) {
            let single = prime_power_sum(&f, 2, x, p41()).unwrap();
            assert_relative_eq!(r.value, single.value, max_relative = 1e-14);
            assert_eq!(r.term_count, single.term_count);
        }
    }

    #[test]
    fn block_size_does_not_change_the_sum() {
        let f = PrimeFunction::of(PrimeKind::OneOverLogLog);
        let a = prime_power_sum_with(&f, 1, 3_000_000, p41(), &SieveConfig::default()).unwrap();
        let b = prime_power_sum_with(&f, 1, 3_000_000, p41(), &SieveConfig { block_len: 1 << 12, ..Default::default() }).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-14);
    }

    #[test]
    fn constant_integral_is_loglog_difference() {
        let f = PrimeFunction::constant(1.0);
        let x = 1e8;
        let est = integral_asymptotic(&f, 1, x, 1).unwrap();
        assert_relative_eq!(est.main_term, x.ln().ln() - 2f64.ln().ln(), max_relative = 1e-12);
        assert_eq!(est.formula_tag, FormulaTag::GenericQuadrature);
        assert!(est.error_magnitude_1 >= 0.0 && est.error_magnitude_2 >= 0.0);
    }

    #[test]
    fn invloglog_integral_matches_lnlnln() {
        let f = PrimeFunction::of(PrimeKind::OneOverLogLog);
        let x: f64 = 1e8;
        let est = integral_asymptotic(&f, 1, x, 4).unwrap();
        let expected = 0.5 * (x.ln().ln().ln() - 11f64.ln().ln().ln());
        assert_relative_eq!(est.main_term, expected, max_relative = 1e-6);
    }

    #[test]
    fn closed_forms() {
        let x: f64 = 1e8;
        let c = closed_form_asymptotic(&PrimeFunction::constant(0.7), 1, x, 4).unwrap();
        assert_relative_eq!(c.main_term, 0.35 * x.ln().ln(), max_relative = 1e-15);
        assert!((c.main_term - 1.020).abs() < 5e-4);
        assert_eq!(c.formula_tag, FormulaTag::Mertens);

        let c = closed_form_asymptotic(&PrimeFunction::of(PrimeKind::OneOverLogLog), 1, x, 4).unwrap();
        assert_relative_eq!(c.main_term, 0.5 * x.ln().ln().ln(), max_relative = 1e-15);
        assert_eq!(c.formula_tag, FormulaTag::Lnlnln);

        let c = closed_form_asymptotic(&PrimeFunction::of(PrimeKind::SqrtLogLog), 2, x, 4).unwrap();
        assert_relative_eq!(c.main_term, 0.5 * x.ln().ln().powi(2) / 2.0, max_relative = 1e-15);
        assert_eq!(c.formula_tag, FormulaTag::PowerOfLoglog);

        let err = closed_form_asymptotic(&PrimeFunction::of(PrimeKind::OneOverLog), 1, x, 4).unwrap_err();
        assert_eq!(err, Error::NoClosedForm);
        let err = closed_form_asymptotic(&PrimeFunction::of(PrimeKind::OneOverLogLog), 2, x, 4).unwrap_err();
        assert_eq!(err, Error::NoClosedForm);
    }

    #[test]
    fn tabulated_has_no_asymptotic() {
        let f = PrimeFunction::of("table:2=1,default=0.5".parse().unwrap());
        assert!(matches!(integral_asymptotic(&f, 1, 1e6, 1), Err(Error::NotDifferentiable(_))));
        assert!(matches!(classify_decay(&f, 1), Err(Error::Unclassifiable(_))));
    }

    #[test]
    fn classification_table() {
        let class = |s: &str, u| classify_decay(&PrimeFunction::of(s.parse().unwrap()), u).unwrap();
        let pos = |case| DecayClass { case, sign: Sign::Positive };
        let neg = |case| DecayClass { case, sign: Sign::Negative };
        assert_eq!(class("const:0.7", 1), pos(DecayCase::Case1));
        assert_eq!(class("one", 1), pos(DecayCase::Case1));
        assert_eq!(class("one_minus_invlog", 1), pos(DecayCase::Case2));
        assert_eq!(class("one_minus_invp", 1), pos(DecayCase::Case2));
        assert_eq!(class("invloglog", 1), pos(DecayCase::Case3));
        assert_eq!(class("invlog", 1), pos(DecayCase::Case4));
        assert_eq!(class("invloglog", 2), pos(DecayCase::Case4));
        assert_eq!(class("const:-0.7", 1), neg(DecayCase::Case1));
        assert_eq!(class("const:-0.7", 2), pos(DecayCase::Case1));
        assert_eq!(class("scaled:-1:invloglog", 1), neg(DecayCase::Case3));
        assert_eq!(class("scaled:-1:one_minus_invlog", 1), neg(DecayCase::Case2));
        assert_eq!(class("const:0", 1), pos(DecayCase::Case4));
        assert!(classify_decay(&PrimeFunction::of(PrimeKind::SqrtLogLog), 1).is_err());
    }

    #[test]
    fn divergence_probe_examples() {
        let cps = default_integral_checkpoints();
        let probe = |s: &str| divergence_probe(&PrimeFunction::of(s.parse().unwrap()), 1, &cps).unwrap();
        assert_eq!(probe("invlog").verdict, Verdict::Converging);
        assert_eq!(probe("invloglog").verdict, Verdict::Diverging);
        assert_eq!(probe("const:0.7").verdict, Verdict::Diverging);
        // Constant f: I(n) = -C (ln ln n - ln ln p0)
        let p = probe("const:1");
        let last = *cps.last().unwrap();
        assert_relative_eq!(*p.partial_sums.last().unwrap(), -(last.ln().ln() - 2f64.ln().ln()), max_relative = 1e-9);
    }

    #[test]
    fn divergence_probe_limit_for_invlog() {
        // -∫_{ln 3}^{L} (1/L'^3 + 1/L'^2) dL'  →  -(1/(2 ln²3) + 1/ln 3)
        let f = PrimeFunction::of(PrimeKind::OneOverLog);
        let p = divergence_probe(&f, 1, &default_integral_checkpoints()).unwrap();
        let l0 = 3f64.ln();
        let limit = -(0.5 / (l0 * l0) + 1.0 / l0);
        let lx = 1e192f64.ln();
        let at = limit + 0.5 / (lx * lx) + 1.0 / lx;
        assert_relative_eq!(*p.partial_sums.last().unwrap(), at, max_relative = 1e-8);
    }

    #[test]
    fn judge_needs_three_points() {
        let f = PrimeFunction::constant(1.0);
        let p = divergence_probe(&f, 1, &[1e3, 1e6]).unwrap();
        assert_eq!(p.verdict, Verdict::Inconclusive);
        assert!(divergence_probe(&f, 1, &[1.5, 1e6, 1e9]).is_err());
    }

    #[test]
    fn small_convergence_probes() {
        let cps = [1_000, 10_000, 100_000, 1_000_000];
        let p = convergence_probe(&Series::InvPSquared, p41(), &cps).unwrap();
        assert_eq!(p.verdict, Verdict::Converging);
        assert!(p.partial_sums.windows(2).all(|w| w[0] <= w[1]));
        let custom = Series::Custom { spec: PrimeFunction::constant(1.0), u: 1 };
        assert_eq!(convergence_probe(&custom, p41(), &cps).unwrap().verdict, Verdict::Diverging);
        assert!(convergence_probe(&Series::InvPLogP, p41(), &cps).unwrap().tail_bound.is_none());
    }
}

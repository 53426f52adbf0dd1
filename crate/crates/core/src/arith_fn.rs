//! Arithmetic functions defined by their values at primes.
//!
//! A [`PrimeFunction`] gives `f(p)`; an [`AdditiveExtension`] says how `f`
//! extends to prime powers. Together they form an [`ArithmeticFunction`],
//! evaluated on a canonical factorization as `Σ f(p^a)` over `p^a ∥ m`.
//!
//! Primes below the start prime `p₀` contribute 0, so every sum over primes
//! is implicitly truncated at `p₀`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sieve::Progression;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeKind {
    Constant(f64),
    /// `f(p) = 1`.
    IndicatorOne,
    OneOverLogLog,
    OneOverLog,
    SqrtLogLog,
    OneMinusOneOverP,
    OneMinusOneOverLog,
    /// `f(p) = 1` when `p ≡ l (mod k)`, else 0.
    ResidueIndicator { modulus: u64, residue: u64 },
    Scaled { factor: f64, inner: Box<PrimeKind> },
    Tabulated { values: BTreeMap<u64, f64>, default: Option<f64> },
}

impl PrimeKind {
    /// Smallest start prime the kind admits.
    pub fn min_start_prime(&self) -> u64 {
        match self {
            PrimeKind::OneOverLogLog => 11,
            PrimeKind::OneOverLog | PrimeKind::SqrtLogLog => 3,
            PrimeKind::Scaled { inner, .. } => inner.min_start_prime(),
            _ => 2,
        }
    }

    fn raw(&self, p: u64) -> Result<f64> {
        let t = p as f64;
        Ok(match self {
            PrimeKind::Constant(c) => *c,
            PrimeKind::IndicatorOne => 1.0,
            PrimeKind::OneOverLogLog => 1.0 / t.ln().ln(),
            PrimeKind::OneOverLog => 1.0 / t.ln(),
            PrimeKind::SqrtLogLog => t.ln().ln().sqrt(),
            PrimeKind::OneMinusOneOverP => 1.0 - 1.0 / t,
            PrimeKind::OneMinusOneOverLog => 1.0 - 1.0 / t.ln(),
            PrimeKind::ResidueIndicator { modulus, residue } => {
                if p % modulus == *residue {
                    1.0
                } else {
                    0.0
                }
            }
            PrimeKind::Scaled { factor, inner } => factor * inner.raw(p)?,
            PrimeKind::Tabulated { values, default } => match values.get(&p) {
                Some(v) => *v,
                None => default.ok_or(Error::MissingTabulated(p))?,
            },
        })
    }

    /// `(f, df/dL)` at `L = ln t` for the kinds with a smooth real extension.
    pub fn smooth_at_log(&self, log_t: f64) -> Result<(f64, f64)> {
        let l = log_t;
        Ok(match self {
            PrimeKind::Constant(c) => (*c, 0.0),
            PrimeKind::IndicatorOne => (1.0, 0.0),
            PrimeKind::OneOverLogLog => {
                let w = l.ln();
                (1.0 / w, -1.0 / (l * w * w))
            }
            PrimeKind::OneOverLog => (1.0 / l, -1.0 / (l * l)),
            PrimeKind::SqrtLogLog => {
                let s = l.ln().sqrt();
                (s, 0.5 / (l * s))
            }
            PrimeKind::OneMinusOneOverP => {
                let e = (-l).exp();
                (1.0 - e, e)
            }
            PrimeKind::OneMinusOneOverLog => (1.0 - 1.0 / l, 1.0 / (l * l)),
            PrimeKind::Scaled { factor, inner } => {
                let (v, d) = inner.smooth_at_log(l)?;
                (factor * v, factor * d)
            }
            PrimeKind::ResidueIndicator { .. } | PrimeKind::Tabulated { .. } => {
                return Err(Error::NotDifferentiable(self.to_string()))
            }
        })
    }

    /// Whether `|f(p)| <= 1` is claimed for all `p >= p₀`.
    pub fn declared_bounded(&self) -> bool {
        match self {
            PrimeKind::Constant(c) => c.abs() <= 1.0,
            PrimeKind::IndicatorOne
            | PrimeKind::OneOverLog
            | PrimeKind::OneMinusOneOverP
            | PrimeKind::OneMinusOneOverLog
            | PrimeKind::ResidueIndicator { .. } => true,
            // 1/ln ln p exceeds 1 at p = 11 and 13; bounded from p = 17 on.
            PrimeKind::OneOverLogLog => false,
            PrimeKind::SqrtLogLog => false,
            PrimeKind::Scaled { factor, inner } => factor.abs() <= 1.0 && inner.declared_bounded(),
            PrimeKind::Tabulated { values, default } => {
                values.values().all(|v| v.abs() <= 1.0) && default.is_none_or(|d| d.abs() <= 1.0)
            }
        }
    }

    /// Whether the kind may take negative values.
    pub fn may_be_negative(&self) -> bool {
        match self {
            PrimeKind::Constant(c) => *c < 0.0,
            PrimeKind::Scaled { factor, inner } => *factor < 0.0 || inner.may_be_negative(),
            PrimeKind::Tabulated { values, default } => {
                values.values().any(|v| *v < 0.0) || default.is_some_and(|d| d < 0.0)
            }
            _ => false,
        }
    }
}

impl fmt::Display for PrimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeKind::Constant(c) => write!(f, "const:{c}"),
            PrimeKind::IndicatorOne => write!(f, "one"),
            PrimeKind::OneOverLogLog => write!(f, "invloglog"),
            PrimeKind::OneOverLog => write!(f, "invlog"),
            PrimeKind::SqrtLogLog => write!(f, "sqrtloglog"),
            PrimeKind::OneMinusOneOverP => write!(f, "one_minus_invp"),
            PrimeKind::OneMinusOneOverLog => write!(f, "one_minus_invlog"),
            PrimeKind::ResidueIndicator { modulus, residue } => write!(f, "residue:{modulus}:{residue}"),
            PrimeKind::Scaled { factor, inner } => write!(f, "scaled:{factor}:{inner}"),
            PrimeKind::Tabulated { values, default } => {
                write!(f, "table:")?;
                let mut first = true;
                for (p, v) in values {
                    if !first {
                        write!(f, ",")?;
                    }
                    first = false;
                    write!(f, "{p}={v}")?;
                }
                if let Some(d) = default {
                    write!(f, "{}default={d}", if first { "" } else { "," })?;
                }
                Ok(())
            }
        }
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidSpec(format!("not a finite number: '{s}'")))
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| Error::InvalidSpec(format!("not a non-negative integer: '{s}'")))
}

impl FromStr for PrimeKind {
    type Err = Error;

    /// `const:C`, `one`, `invloglog`, `invlog`, `sqrtloglog`,
    /// `one_minus_invp`, `one_minus_invlog`, `residue:K:L`,
    /// `scaled:C:<kind>`, `table:P=V,...[,default=V]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let no_param = |kind: PrimeKind| match rest {
            None => Ok(kind),
            Some(_) => Err(Error::InvalidSpec(format!("'{head}' takes no parameter"))),
        };
        let need = || rest.ok_or_else(|| Error::InvalidSpec(format!("'{head}' needs a parameter")));
        match head {
            "const" => Ok(PrimeKind::Constant(parse_f64(need()?)?)),
            "one" | "indicator" => no_param(PrimeKind::IndicatorOne),
            "invloglog" => no_param(PrimeKind::OneOverLogLog),
            "invlog" => no_param(PrimeKind::OneOverLog),
            "sqrtloglog" => no_param(PrimeKind::SqrtLogLog),
            "one_minus_invp" => no_param(PrimeKind::OneMinusOneOverP),
            "one_minus_invlog" => no_param(PrimeKind::OneMinusOneOverLog),
            "residue" => {
                let (k, l) = need()?
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidSpec("residue:K:L".into()))?;
                let prog = Progression::new(parse_u64(k)?, parse_u64(l)?)
                    .map_err(|e| Error::InvalidSpec(e.to_string()))?;
                Ok(PrimeKind::ResidueIndicator { modulus: prog.modulus(), residue: prog.residue() })
            }
            "scaled" => {
                let (c, inner) = need()?
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidSpec("scaled:C:<kind>".into()))?;
                Ok(PrimeKind::Scaled { factor: parse_f64(c)?, inner: Box::new(inner.parse()?) })
            }
            "table" => {
                let mut values = BTreeMap::new();
                let mut default = None;
                for entry in need()?.split(',').filter(|e| !e.trim().is_empty()) {
                    let (key, v) = entry
                        .split_once('=')
                        .ok_or_else(|| Error::InvalidSpec(format!("bad table entry '{entry}'")))?;
                    if key.trim() == "default" {
                        default = Some(parse_f64(v)?);
                    } else {
                        values.insert(parse_u64(key)?, parse_f64(v)?);
                    }
                }
                Ok(PrimeKind::Tabulated { values, default })
            }
            _ => Err(Error::InvalidSpec(format!("unknown function kind '{head}'"))),
        }
    }
}

/// `f` at primes: a kind plus its start prime `p₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeFunction {
    kind: PrimeKind,
    start_prime: u64,
}

impl PrimeFunction {
    /// Uses the kind's own minimum when `start_prime` is `None`.
    pub fn new(kind: PrimeKind, start_prime: Option<u64>) -> Result<Self> {
        let min = kind.min_start_prime();
        let start_prime = start_prime.unwrap_or(min);
        if start_prime < min {
            return Err(Error::InvalidSpec(format!(
                "{kind} requires p0 >= {min}, got {start_prime}"
            )));
        }
        if let PrimeKind::Scaled { factor, .. } = &kind {
            if !factor.is_finite() {
                return Err(Error::InvalidSpec("scale factor must be finite".into()));
            }
        }
        Ok(Self { kind, start_prime })
    }

    pub fn of(kind: PrimeKind) -> Self {
        Self::new(kind, None).expect("default start prime is always valid")
    }

    pub fn constant(c: f64) -> Self {
        Self::of(PrimeKind::Constant(c))
    }

    pub fn kind(&self) -> &PrimeKind {
        &self.kind
    }

    pub fn start_prime(&self) -> u64 {
        self.start_prime
    }

    /// `f(p)`, or 0 below `p₀`.
    pub fn at_prime(&self, p: u64) -> Result<f64> {
        if p < self.start_prime {
            return Ok(0.0);
        }
        self.kind.raw(p)
    }

    pub fn declared_bounded(&self) -> bool {
        self.kind.declared_bounded()
    }
}

impl fmt::Display for PrimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (p0={})", self.kind, self.start_prime)
    }
}

pub fn eval_at_prime(spec: &PrimeFunction, p: u64) -> Result<f64> {
    spec.at_prime(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionMode {
    /// `f(p^a) = f(p)`.
    Strong,
    /// `f(p^a) = a·f(p)`.
    Complete,
}

impl FromStr for ExtensionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "strong" => Ok(ExtensionMode::Strong),
            "complete" => Ok(ExtensionMode::Complete),
            other => Err(Error::InvalidSpec(format!("unknown extension '{other}'"))),
        }
    }
}

/// Rule for `f(p^a)`: a base mode plus finitely many overridden prime powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveExtension {
    pub mode: ExtensionMode,
    pub overrides: BTreeMap<(u64, u32), f64>,
}

impl AdditiveExtension {
    pub fn strong() -> Self {
        Self { mode: ExtensionMode::Strong, overrides: BTreeMap::new() }
    }

    pub fn complete() -> Self {
        Self { mode: ExtensionMode::Complete, overrides: BTreeMap::new() }
    }

    pub fn with_override(mut self, p: u64, a: u32, value: f64) -> Self {
        self.overrides.insert((p, a), value);
        self
    }

    pub fn is_strongly_additive(&self) -> bool {
        self.mode == ExtensionMode::Strong && self.overrides.is_empty()
    }

    pub fn prime_power(&self, f_p: f64, p: u64, a: u32) -> f64 {
        if let Some(v) = self.overrides.get(&(p, a)) {
            return *v;
        }
        match self.mode {
            ExtensionMode::Strong => f_p,
            ExtensionMode::Complete => f64::from(a) * f_p,
        }
    }

    /// Parses `P^A=V,...` override lists.
    pub fn parse_overrides(mut self, s: &str) -> Result<Self> {
        for entry in s.split(',').filter(|e| !e.trim().is_empty()) {
            let (pa, v) = entry
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("bad override '{entry}'")))?;
            let (p, a) = pa
                .split_once('^')
                .ok_or_else(|| Error::InvalidSpec(format!("bad prime power '{pa}'")))?;
            let a: u32 = a
                .trim()
                .parse()
                .ok()
                .filter(|&a| a >= 1)
                .ok_or_else(|| Error::InvalidSpec(format!("bad exponent in '{pa}'")))?;
            self.overrides.insert((parse_u64(p)?, a), parse_f64(v)?);
        }
        Ok(self)
    }
}

impl fmt::Display for AdditiveExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            ExtensionMode::Strong => write!(f, "strong")?,
            ExtensionMode::Complete => write!(f, "complete")?,
        }
        for ((p, a), v) in &self.overrides {
            write!(f, " {p}^{a}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArithmeticFunction {
    pub prime: PrimeFunction,
    pub extension: AdditiveExtension,
}

impl ArithmeticFunction {
    pub fn new(prime: PrimeFunction, extension: AdditiveExtension) -> Self {
        Self { prime, extension }
    }

    pub fn strongly_additive(prime: PrimeFunction) -> Self {
        Self::new(prime, AdditiveExtension::strong())
    }

    /// `Σ f(p^a)` over the factorization; 0 for `m = 1`.
    pub fn eval(&self, factorization: &[(u64, u32)]) -> Result<f64> {
        let mut total = 0.0;
        for &(p, a) in factorization {
            let f_p = self.prime.at_prime(p)?;
            total += self.extension.prime_power(f_p, p, a);
        }
        Ok(total)
    }

    /// Parses `fn`/`ext`/`p0` flag values. Builtin names (`omega`, `Omega`,
    /// `omega1`, `half_omega`) carry their own extension; an explicit `ext`
    /// that contradicts it is rejected.
    pub fn parse(
        func: &str,
        ext: Option<&str>,
        start_prime: Option<u64>,
        prog: Progression,
    ) -> Result<Self> {
        let ext_mode = ext.map(str::parse::<ExtensionMode>).transpose()?;
        if let Ok(b) = builtin(func, prog) {
            if let Some(mode) = ext_mode {
                if mode != b.extension.mode {
                    return Err(Error::InvalidSpec(format!("'{func}' is fixed to its own extension")));
                }
            }
            let prime = PrimeFunction::new(b.prime.kind, start_prime)?;
            return Ok(Self::new(prime, b.extension));
        }
        let kind: PrimeKind = func.parse()?;
        let prime = PrimeFunction::new(kind, start_prime)?;
        let extension = match ext_mode.unwrap_or(ExtensionMode::Strong) {
            ExtensionMode::Strong => AdditiveExtension::strong(),
            ExtensionMode::Complete => AdditiveExtension::complete(),
        };
        Ok(Self::new(prime, extension))
    }
}

impl fmt::Display for ArithmeticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.prime, self.extension)
    }
}

pub fn eval_additive(
    spec: &PrimeFunction,
    ext: &AdditiveExtension,
    factorization: &[(u64, u32)],
) -> Result<f64> {
    let mut total = 0.0;
    for &(p, a) in factorization {
        total += ext.prime_power(spec.at_prime(p)?, p, a);
    }
    Ok(total)
}

/// The named examples: `omega` (ω), `Omega` (Ω), `omega1` (prime divisors
/// lying in `prog`), `half_omega` (0.5·ω).
pub fn builtin(name: &str, prog: Progression) -> Result<ArithmeticFunction> {
    let one = || PrimeFunction::of(PrimeKind::IndicatorOne);
    Ok(match name {
        "omega" | "ω" => ArithmeticFunction::strongly_additive(one()),
        "Omega" | "Ω" => ArithmeticFunction::new(one(), AdditiveExtension::complete()),
        "omega1" | "ω₁" => ArithmeticFunction::strongly_additive(PrimeFunction::of(
            PrimeKind::ResidueIndicator { modulus: prog.modulus(), residue: prog.residue() },
        )),
        "half_omega" => ArithmeticFunction::strongly_additive(PrimeFunction::of(PrimeKind::Scaled {
            factor: 0.5,
            inner: Box::new(PrimeKind::IndicatorOne),
        })),
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairClass {
    H,
    V,
}

/// A strongly additive reference `f*` and a compared function `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionPair {
    pub reference: ArithmeticFunction,
    pub compared: ArithmeticFunction,
    pub class: PairClass,
}

impl FunctionPair {
    /// Class-H pairs must share their prime values; they may differ only
    /// through the extension rule or a finite override list.
    pub fn new(reference: ArithmeticFunction, compared: ArithmeticFunction, class: PairClass) -> Result<Self> {
        if class == PairClass::H && reference.prime != compared.prime {
            return Err(Error::InvalidArgument(
                "class-H pair must agree at all primes outside a finite override list".into(),
            ));
        }
        Ok(Self { reference, compared, class })
    }
}

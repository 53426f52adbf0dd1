//! The `apmoments` command line.
//!
//! Common flags are global, so they may appear before or after the
//! subcommand. A `--config FILE` of `key=value` lines supplies defaults for
//! any common flag that is not given on the command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::{json, Value};

use crate::arith_fn::{ArithmeticFunction, FunctionPair, PairClass};
use crate::error::Error;
use crate::model::{self, PredictionMode};
use crate::moments::{self, DEFAULT_B_VALUES, DEFAULT_U_MAX};
use crate::prime_sums::{self, Series};
use crate::report::{emit, num, nums, Format, Report, Table};
use crate::sieve::{primes_in_progression, Progression};
use crate::stats::{self, NormalizationKind};

#[derive(Debug, Parser)]
#[command(name = "apmoments", version, about = "Moments of additive functions on arithmetic progressions")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Modulus k of the progression.
    #[arg(long = "mod", global = true, value_name = "K")]
    pub modulus: Option<u64>,
    /// Residue l of the progression (default 0 when k = 1, else 1).
    #[arg(long = "res", global = true, value_name = "L")]
    pub residue: Option<u64>,
    /// Limit n for member-based computations.
    #[arg(long, global = true, value_parser = parse_count)]
    pub n: Option<u64>,
    /// Limit x for prime sums and asymptotics.
    #[arg(long, global = true)]
    pub x: Option<String>,
    /// Function: a builtin (omega, Omega, omega1, half_omega) or a kind
    /// (const:C, one, invloglog, invlog, sqrtloglog, one_minus_invp,
    /// one_minus_invlog, residue:K:L, scaled:C:KIND, table:P=V,...).
    #[arg(long = "fn", global = true, value_name = "SPEC")]
    pub func: Option<String>,
    /// Extension to prime powers: strong or complete.
    #[arg(long, global = true)]
    pub ext: Option<String>,
    /// Prime-power overrides, e.g. 2^3=0.5,3^2=1.
    #[arg(long, global = true)]
    pub overrides: Option<String>,
    /// Start prime p0; smaller primes contribute 0.
    #[arg(long, global = true)]
    pub p0: Option<u64>,
    /// Order u.
    #[arg(long, global = true)]
    pub u: Option<u32>,
    /// Highest moment order (2..=10).
    #[arg(long, global = true)]
    pub umax: Option<u32>,
    /// Comma-separated limits, e.g. 1e3,1e4,1e5.
    #[arg(long, global = true)]
    pub checkpoints: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_parser = parse_count)]
    pub trials: Option<u64>,
    /// Model prime set: restricted (p ≡ l mod k) or density (p ∤ k).
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// json, csv or lines.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Raw value file (little-endian f64).
    #[arg(long, global = true)]
    pub spill: Option<PathBuf>,
    /// Flat key=value file with defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Omit the wall-clock duration, for byte-identical reruns.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List primes up to a limit, optionally in a residue class.
    Sieve {
        #[arg(long, value_parser = parse_count)]
        limit: Option<u64>,
    },
    /// Exact Σ f(p)^u / p over the class, at --x or each checkpoint.
    Sum,
    /// Closed-form and quadrature main terms with error magnitudes.
    Asymptotic,
    /// Decay case of f(p)^u.
    Classify,
    /// Convergence probe: the divergence integral for --fn, or an exact
    /// series with --series.
    Probe {
        /// inv_p_squared, inv_p_log2p, inv_p_logp or custom.
        #[arg(long)]
        series: Option<String>,
    },
    /// Empirical mean, deviation, central moments and coverage.
    Moments {
        /// Chebyshev multipliers.
        #[arg(long, value_delimiter = ',')]
        b: Option<Vec<f64>>,
    },
    /// The independent Bernoulli model.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Kolmogorov–Smirnov distance of normalized values against Φ.
    Ektest {
        /// sigma or sqrt-mean.
        #[arg(long, default_value = "sigma")]
        normalization: String,
    },
    /// Compare --fn (reference) with --fn2 over the same members.
    Compare {
        #[arg(long = "fn2", value_name = "SPEC")]
        func2: String,
        #[arg(long)]
        ext2: Option<String>,
        /// H or V.
        #[arg(long, default_value = "V")]
        class: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelAction {
    Exact,
    Sample,
    Lindeberg {
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
    },
    /// Model moments against the empirical ones.
    Compare,
}

/// Accepts plain integers and exact scientific notation such as `1e8`.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
        Ok(f as u64)
    } else {
        Err(format!("'{s}' is not a non-negative integer"))
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn apply_config_file(common: &mut CommonArgs, path: &Path) -> CliResult<()> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key=value", i + 1)))?;
        let (key, value) = (key.trim(), value.trim().to_string());
        let bad = |what: &str| usage(format!("config line {}: bad {what} '{value}'", i + 1));
        macro_rules! fill {
            ($field:expr, $parse:expr) => {
                if $field.is_none() {
                    $field = Some($parse.map_err(|_| bad(key))?);
                }
            };
        }
        match key {
            "mod" => fill!(common.modulus, value.parse::<u64>()),
            "res" => fill!(common.residue, value.parse::<u64>()),
            "n" => fill!(common.n, parse_count(&value)),
            "x" => fill!(common.x, Ok::<_, ()>(value.clone())),
            "fn" => fill!(common.func, Ok::<_, ()>(value.clone())),
            "ext" => fill!(common.ext, Ok::<_, ()>(value.clone())),
            "overrides" => fill!(common.overrides, Ok::<_, ()>(value.clone())),
            "p0" => fill!(common.p0, value.parse::<u64>()),
            "u" => fill!(common.u, value.parse::<u32>()),
            "umax" => fill!(common.umax, value.parse::<u32>()),
            "checkpoints" => fill!(common.checkpoints, Ok::<_, ()>(value.clone())),
            "seed" => fill!(common.seed, value.parse::<u64>()),
            "trials" => fill!(common.trials, parse_count(&value)),
            "mode" => fill!(common.mode, Ok::<_, ()>(value.clone())),
            "format" => fill!(common.format, Ok::<_, ()>(value.clone())),
            "out" => fill!(common.out, Ok::<_, ()>(PathBuf::from(&value))),
            "workers" => fill!(common.workers, value.parse::<usize>()),
            "spill" => fill!(common.spill, Ok::<_, ()>(PathBuf::from(&value))),
            other => return Err(usage(format!("config line {}: unknown key '{other}'", i + 1))),
        }
    }
    Ok(())
}

/// Resolved settings shared by the subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    pub prog: Progression,
    pub func_spec: String,
    pub ext: Option<String>,
    pub overrides: Option<String>,
    pub p0: Option<u64>,
    pub n: Option<u64>,
    pub x: Option<String>,
    pub u: u32,
    pub u_max: u32,
    pub checkpoints: Option<String>,
    pub seed: u64,
    pub trials: u64,
    pub mode: Option<PredictionMode>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub spill: Option<PathBuf>,
    pub timing: bool,
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    fn resolve(command: &str, c: &CommonArgs, default_format: Format) -> CliResult<Self> {
        let k = c.modulus.unwrap_or(1);
        let l = c.residue.unwrap_or(if k == 1 { 0 } else { 1 });
        let prog = Progression::new(k, l).map_err(|e| usage(e.to_string()))?;
        let format = match &c.format {
            Some(f) => f.parse().map_err(|e: Error| usage(e.to_string()))?,
            None => default_format,
        };
        let mode = c
            .mode
            .as_deref()
            .map(str::parse::<PredictionMode>)
            .transpose()
            .map_err(|e| usage(e.to_string()))?;
        let cfg = Self {
            command: command.to_string(),
            prog,
            func_spec: c.func.clone().unwrap_or_else(|| "omega".into()),
            ext: c.ext.clone(),
            overrides: c.overrides.clone(),
            p0: c.p0,
            n: c.n,
            x: c.x.clone(),
            u: c.u.unwrap_or(1),
            u_max: c.umax.unwrap_or(DEFAULT_U_MAX),
            checkpoints: c.checkpoints.clone(),
            seed: c.seed.unwrap_or(1),
            trials: c.trials.unwrap_or(10_000),
            mode,
            format,
            out: c.out.clone(),
            spill: c.spill.clone(),
            timing: !c.no_timing,
            entries: BTreeMap::new(),
        };
        Ok(cfg)
    }

    fn record(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    fn record_base(&mut self) {
        self.record("mod", self.prog.modulus());
        self.record("res", self.prog.residue());
        self.record("format", self.format.as_str());
        if let Some(o) = self.out.clone() {
            self.record("out", o.display());
        }
    }

    fn function(&mut self) -> CliResult<ArithmeticFunction> {
        let mut f = ArithmeticFunction::parse(&self.func_spec, self.ext.as_deref(), self.p0, self.prog)
            .map_err(|e| usage(e.to_string()))?;
        if let Some(ov) = &self.overrides {
            f.extension = f.extension.parse_overrides(ov).map_err(|e| usage(e.to_string()))?;
        }
        self.record("fn", self.func_spec.clone());
        self.record("ext", &f.extension);
        self.record("p0", f.prime.start_prime());
        Ok(f)
    }

    fn need_n(&mut self) -> CliResult<u64> {
        let n = self.n.ok_or_else(|| usage("--n is required"))?;
        self.record("n", n);
        Ok(n)
    }

    fn need_u(&mut self) -> CliResult<u32> {
        self.record("u", self.u);
        Ok(self.u)
    }

    fn need_u_max(&mut self) -> CliResult<u32> {
        if !(2..=moments::MAX_U_MAX).contains(&self.u_max) {
            return Err(usage(format!("--umax must be in 2..={}", moments::MAX_U_MAX)));
        }
        self.record("umax", self.u_max);
        Ok(self.u_max)
    }

    /// Integer limits from --checkpoints, else the single --x.
    fn integer_limits(&mut self) -> CliResult<Vec<u64>> {
        let limits = if let Some(cp) = &self.checkpoints {
            cp.split(',').map(parse_count).collect::<Result<Vec<_>, _>>().map_err(usage)?
        } else if let Some(x) = &self.x {
            vec![parse_count(x).map_err(usage)?]
        } else {
            return Err(usage("--x or --checkpoints is required"));
        };
        self.record("checkpoints", join(&limits));
        Ok(limits)
    }

    fn real_x(&mut self) -> CliResult<f64> {
        let x = self.x.clone().ok_or_else(|| usage("--x is required"))?;
        let v: f64 = x.trim().parse().map_err(|_| usage(format!("--x '{x}' is not a number")))?;
        self.record("x", &x);
        Ok(v)
    }

    fn real_checkpoints(&mut self) -> CliResult<Option<Vec<f64>>> {
        let Some(cp) = self.checkpoints.clone() else { return Ok(None) };
        let v = cp
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| usage(format!("bad checkpoint '{s}'"))))
            .collect::<CliResult<Vec<f64>>>()?;
        self.record("checkpoints", &cp);
        Ok(Some(v))
    }

    fn report(&self) -> Report {
        Report::new(&self.command, self.entries.clone())
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

const PRIME_COLUMNS: [&str; 10] = ["x", "k", "l", "u", "exact_sum", "main_term", "err1", "err2", "case", "verdict"];

fn cmd_sieve(cfg: &mut RunConfig, limit: Option<u64>) -> CliResult<Report> {
    let limit = limit.or(cfg.n).ok_or_else(|| usage("--limit is required"))?;
    cfg.record_base();
    cfg.record("limit", limit);
    let range = primes_in_progression(limit, cfg.prog)?;
    let mut r = cfg.report();
    r.set("limit", limit).set("count", range.len()).set("last", range.last());
    r.table = Table::new(&["p"]);
    for &p in &range.primes {
        r.table.push(vec![("p", p.into())]);
    }
    Ok(r)
}

fn cmd_sum(cfg: &mut RunConfig) -> CliResult<Report> {
    cfg.record_base();
    let f = cfg.function()?;
    let u = cfg.need_u()?;
    let xs = cfg.integer_limits()?;
    let results = prime_sums::prime_power_sums_at(&f.prime, u, &xs, cfg.prog, &Default::default())?;
    let mut r = cfg.report();
    r.set("k", cfg.prog.modulus()).set("l", cfg.prog.residue()).set("u", u);
    r.set("exact_sum", num(results.last().map_or(0.0, |s| s.value)));
    r.set(
        "results",
        Value::Array(
            results
                .iter()
                .map(|s| json!({"x": s.x, "exact_sum": num(s.value), "term_count": s.term_count}))
                .collect(),
        ),
    );
    r.table = Table::new(&PRIME_COLUMNS);
    for s in &results {
        r.table.push(vec![
            ("x", s.x.into()),
            ("k", cfg.prog.modulus().into()),
            ("l", cfg.prog.residue().into()),
            ("u", u.into()),
            ("exact_sum", num(s.value)),
        ]);
    }
    Ok(r)
}

fn estimate_json(e: &prime_sums::AsymptoticEstimate) -> Value {
    json!({
        "main_term": num(e.main_term),
        "anchored_term": e.anchored_term.map_or(Value::Null, num),
        "err1": num(e.error_magnitude_1),
        "err2": num(e.error_magnitude_2),
        "formula_tag": e.formula_tag.as_str(),
    })
}

fn cmd_asymptotic(cfg: &mut RunConfig) -> CliResult<Report> {
    cfg.record_base();
    let f = cfg.function()?;
    let u = cfg.need_u()?;
    let x = cfg.real_x()?;
    let k = cfg.prog.modulus();
    let quad = prime_sums::integral_asymptotic(&f.prime, u, x, k)?;
    let closed = match prime_sums::closed_form_asymptotic(&f.prime, u, x, k) {
        Ok(c) => Some(c),
        Err(Error::NoClosedForm) => None,
        Err(e) => return Err(e.into()),
    };
    let best = closed.as_ref().unwrap_or(&quad);
    let mut r = cfg.report();
    r.set("x", num(x)).set("k", k).set("u", u);
    r.set("main_term", num(best.main_term)).set("formula_tag", best.formula_tag.as_str());
    r.set("err1", num(best.error_magnitude_1)).set("err2", num(best.error_magnitude_2));
    r.set("closed_form", closed.as_ref().map_or(Value::Null, estimate_json));
    r.set("quadrature", estimate_json(&quad));
    r.table = Table::new(&PRIME_COLUMNS);
    r.table.push(vec![
        ("x", num(x)),
        ("k", k.into()),
        ("l", cfg.prog.residue().into()),
        ("u", u.into()),
        ("main_term", num(best.main_term)),
        ("err1", num(best.error_magnitude_1)),
        ("err2", num(best.error_magnitude_2)),
    ]);
    Ok(r)
}

fn cmd_classify(cfg: &mut RunConfig) -> CliResult<Report> {
    cfg.record_base();
    let f = cfg.function()?;
    let u = cfg.need_u()?;
    let class = prime_sums::classify_decay(&f.prime, u)?;
    let case = format!("{:?}", class.case);
    let sign = match class.sign {
        prime_sums::Sign::Positive => "positive",
        prime_sums::Sign::Negative => "negative",
    };
    let mut r = cfg.report();
    r.set("u", u).set("case", case.clone()).set("sign", sign);
    r.table = Table::new(&PRIME_COLUMNS);
    r.table.push(vec![("u", u.into()), ("case", class.to_string().into())]);
    Ok(r)
}

fn cmd_probe(cfg: &mut RunConfig, series: Option<&str>) -> CliResult<Report> {
    cfg.record_base();
    let probe = match series {
        None => {
            let f = cfg.function()?;
            let u = cfg.need_u()?;
            let cps = cfg.real_checkpoints()?.unwrap_or_else(prime_sums::default_integral_checkpoints);
            cfg.record("series", "divergence-integral");
            prime_sums::divergence_probe(&f.prime, u, &cps)?
        }
        Some(name) => {
            let s = match name {
                "inv_p_squared" => Series::InvPSquared,
                "inv_p_log2p" => Series::InvPLog2P,
                "inv_p_logp" => Series::InvPLogP,
                "custom" => Series::Custom { spec: cfg.function()?.prime, u: cfg.need_u()? },
                other => return Err(usage(format!("unknown series '{other}'"))),
            };
            cfg.record("series", name);
            let cps = if cfg.checkpoints.is_some() || cfg.x.is_some() {
                cfg.integer_limits()?
            } else {
                prime_sums::default_sum_checkpoints()
            };
            prime_sums::convergence_probe(&s, cfg.prog, &cps)?
        }
    };
    let mut r = cfg.report();
    r.set("checkpoints", nums(&probe.checkpoints));
    r.set("partial_sums", nums(&probe.partial_sums));
    r.set("verdict", probe.verdict.as_str());
    r.set("exponent", probe.exponent.map_or(Value::Null, num));
    r.set("tail_bound", probe.tail_bound.map_or(Value::Null, num));
    r.table = Table::new(&PRIME_COLUMNS);
    for (x, s) in probe.checkpoints.iter().zip(&probe.partial_sums) {
        r.table.push(vec![
            ("x", num(*x)),
            ("k", cfg.prog.modulus().into()),
            ("l", cfg.prog.residue().into()),
            ("exact_sum", num(*s)),
            ("verdict", probe.verdict.as_str().into()),
        ]);
    }
    Ok(r)
}

fn predictions(prime: &crate::arith_fn::PrimeFunction, prog: Progression, n: u64, u_max: u32) -> CliResult<(Vec<f64>, Vec<f64>)> {
    let r = model::exact_moments(prime, prog, n, u_max, PredictionMode::Restricted)?;
    let d = model::exact_moments(prime, prog, n, u_max, PredictionMode::Density)?;
    Ok((r.paper_approx, d.paper_approx))
}

fn cmd_moments(cfg: &mut RunConfig, b: Option<Vec<f64>>) -> CliResult<Report> {
    cfg.record_base();
    let f = cfg.function()?;
    let n = cfg.need_n()?;
    let u_max = cfg.need_u_max()?;
    let b = b.unwrap_or_else(|| DEFAULT_B_VALUES.to_vec());
    cfg.record("b", join(&b));
    let summary = moments::empirical_moments(&f, cfg.prog, n, u_max)?;
    let values = moments::progression_values(&f, cfg.prog, n)?;
    let cheb = moments::chebyshev_check(&summary, &values, &b)?;
    if let Some(path) = &cfg.spill {
        cfg.entries.insert("spill".into(), path.display().to_string());
        moments::write_spill(path, &values)?;
    }
    let (restricted, density) = predictions(&f.prime, cfg.prog, n, u_max)?;
    let via_counts = if f.extension.is_strongly_additive() {
        num(moments::mean_via_counts(&f, cfg.prog, n)?)
    } else {
        Value::Null
    };
    let mut r = cfg.report();
    r.set("n", n).set("k", cfg.prog.modulus()).set("l", cfg.prog.residue());
    r.set("count", summary.count).set("mean", num(summary.mean)).set("sigma", num(summary.sigma));
    r.set("mu", nums(&summary.central_moments));
    r.set("mean_via_counts", via_counts);
    r.set("predictions", json!({"restricted_sum": nums(&restricted), "density_sum": nums(&density)}));
    r.set(
        "coverage",
        Value::Array(
            cheb.b_values
                .iter()
                .zip(&cheb.coverage)
                .zip(&cheb.bound)
                .map(|((b, c), lb)| json!({"b": num(*b), "coverage": num(*c), "bound": num(*lb)}))
                .collect(),
        ),
    );
    r.set("degenerate", cheb.degenerate);
    r.table = Table::new(&["u", "mu", "restricted_sum", "density_sum"]);
    for u in 1..=u_max {
        let mu = if u == 1 { num(0.0) } else { num(summary.central_moments[u as usize - 2]) };
        r.table.push(vec![
            ("u", u.into()),
            ("mu", mu),
            ("restricted_sum", num(restricted[u as usize - 1])),
            ("density_sum", num(density[u as usize - 1])),
        ]);
    }
    Ok(r)
}

fn model_json(m: &model::ModelMoments) -> Value {
    json!({
        "mode": m.mode.as_str(),
        "kappa": nums(&m.cumulants),
        "mu": nums(&m.central_moments),
        "paper_approx": nums(&m.paper_approx),
        "gap_bound": nums(&m.gap_bound),
        "term_count": m.term_count,
    })
}

fn cmd_model(cfg: &mut RunConfig, action: &ModelAction) -> CliResult<Report> {
    cfg.record_base();
    let f = cfg.function()?;
    let n = cfg.need_n()?;
    let mode = cfg.mode.unwrap_or(PredictionMode::Restricted);
    cfg.record("mode", mode.as_str());
    let other = match mode {
        PredictionMode::Restricted => PredictionMode::Density,
        PredictionMode::Density => PredictionMode::Restricted,
    };
    let mut r;
    match action {
        ModelAction::Exact => {
            let u_max = cfg.need_u_max()?;
            let m = model::exact_moments(&f.prime, cfg.prog, n, u_max, mode)?;
            let alt = model::exact_moments(&f.prime, cfg.prog, n, u_max, other)?;
            r = cfg.report();
            if let Value::Object(o) = model_json(&m) {
                r.body.extend(o);
            }
            if cfg.mode.is_none() {
                r.set("alternate", model_json(&alt));
            }
            r.table = Table::new(&["mode", "u", "kappa", "mu", "paper_approx", "gap_bound"]);
            for mm in [&m, &alt] {
                for u in 0..u_max as usize {
                    r.table.push(vec![
                        ("mode", mm.mode.as_str().into()),
                        ("u", (u + 1).into()),
                        ("kappa", num(mm.cumulants[u])),
                        ("mu", num(mm.central_moments[u])),
                        ("paper_approx", num(mm.paper_approx[u])),
                        ("gap_bound", num(mm.gap_bound[u])),
                    ]);
                }
            }
        }
        ModelAction::Sample => {
            cfg.record("seed", cfg.seed);
            cfg.record("trials", cfg.trials);
            let trials = cfg.trials as usize;
            let s = model::sample_with(&f.prime, cfg.prog, n, trials, cfg.seed, mode, &Default::default())?;
            let m = model::exact_moments(&f.prime, cfg.prog, n, 2, mode)?;
            if let Some(path) = &cfg.spill {
                cfg.entries.insert("spill".into(), path.display().to_string());
                moments::write_spill(path, &s.values)?;
            }
            let (k1, k2) = (m.kappa(1), m.kappa(2));
            let z = if k2 > 0.0 { (s.mean() - k1) / (k2 / trials as f64).sqrt() } else { 0.0 };
            let ks = if k2 > 0.0 { stats::ks_distance(&s.values, k1, k2.sqrt()).ok() } else { None };
            r = cfg.report();
            r.set("mode", mode.as_str()).set("seed", s.seed).set("trials", s.trials);
            r.set("mean", num(s.mean())).set("variance", num(s.variance()));
            r.set("kappa", nums(&m.cumulants));
            r.set("z_score", num(z));
            r.set("variance_ratio", if k2 > 0.0 { num(s.variance() / k2) } else { Value::Null });
            r.set("ks", ks.map_or(Value::Null, num));
            r.table = Table::new(&["trial", "value"]);
            for (i, v) in s.values.iter().enumerate() {
                r.table.push(vec![("trial", i.into()), ("value", num(*v))]);
            }
        }
        ModelAction::Lindeberg { epsilon } => {
            cfg.record("epsilon", epsilon);
            let l = model::lindeberg_check(&f.prime, cfg.prog, n, *epsilon)?;
            r = cfg.report();
            r.set("epsilon", num(l.epsilon)).set("d_n", num(l.d_n));
            r.set("ratio", num(l.ratio)).set("max_ratio", num(l.max_ratio));
            r.table = Table::new(&["epsilon", "d_n", "ratio", "max_ratio"]);
            r.table.push(vec![
                ("epsilon", num(l.epsilon)),
                ("d_n", num(l.d_n)),
                ("ratio", num(l.ratio)),
                ("max_ratio", num(l.max_ratio)),
            ]);
        }
        ModelAction::Compare => {
            let u_max = cfg.need_u_max()?;
            let emp = moments::empirical_moments(&f, cfg.prog, n, u_max)?;
            let a = model::exact_moments(&f.prime, cfg.prog, n, u_max, PredictionMode::Restricted)?;
            let b = model::exact_moments(&f.prime, cfg.prog, n, u_max, PredictionMode::Density)?;
            r = cfg.report();
            r.set("empirical", json!({"mean": num(emp.mean), "sigma": num(emp.sigma), "mu": nums(&emp.central_moments)}));
            r.set("restricted", model_json(&a));
            r.set("density", model_json(&b));
            r.table = Table::new(&["u", "empirical", "restricted_model", "density_model", "restricted_sum", "density_sum"]);
            for u in 1..=u_max as usize {
                let e = if u == 1 { emp.mean } else { emp.central_moments[u - 2] };
                let (ma, mb) = if u == 1 { (a.cumulants[0], b.cumulants[0]) } else { (a.central_moments[u - 1], b.central_moments[u - 1]) };
                r.table.push(vec![
                    ("u", u.into()),
                    ("empirical", num(e)),
                    ("restricted_model", num(ma)),
                    ("density_model", num(mb)),
                    ("restricted_sum", num(a.paper_approx[u - 1])),
                    ("density_sum", num(b.paper_approx[u - 1])),
                ]);
            }
        }
    }
    Ok(r)
}

fn cmd_ektest(cfg: &mut RunConfig, normalization: &str) -> CliResult<Report> {
    cfg.record_base();
    let kind: NormalizationKind = normalization.parse().map_err(|e: Error| usage(e.to_string()))?;
    cfg.record("normalization", kind.as_str());
    let (report, n) = if let Some(path) = cfg.spill.clone() {
        cfg.record("spill", path.display());
        let values = moments::read_spill(&path)?;
        (stats::erdos_kac_from_values(&values, kind)?, cfg.n)
    } else {
        let f = cfg.function()?;
        let n = cfg.need_n()?;
        (stats::erdos_kac_report(&f, cfg.prog, n, kind)?, Some(n))
    };
    let mut r = cfg.report();
    r.set("ks", num(report.ks_distance)).set("n", n).set("sample_size", report.sample_size);
    r.set(
        "normalization",
        json!({"kind": kind.as_str(), "center": num(report.normalization.center), "scale": num(report.normalization.scale)}),
    );
    r.table = Table::new(&["x", "F_emp", "Phi", "|diff|"]);
    for p in &report.cdf_grid {
        r.table.push(vec![
            ("x", num(p.x)),
            ("F_emp", num(p.empirical)),
            ("Phi", num(p.phi)),
            ("|diff|", num((p.empirical - p.phi).abs())),
        ]);
    }
    Ok(r)
}

fn summary_json(s: &moments::MomentSummary) -> Value {
    json!({"count": s.count, "mean": num(s.mean), "sigma": num(s.sigma), "mu": nums(&s.central_moments)})
}

fn cmd_compare(cfg: &mut RunConfig, func2: &str, ext2: Option<&str>, class: &str) -> CliResult<Report> {
    cfg.record_base();
    let class = match class {
        "H" | "h" => PairClass::H,
        "V" | "v" => PairClass::V,
        other => return Err(usage(format!("unknown class '{other}'"))),
    };
    let overrides = cfg.overrides.take();
    let reference = cfg.function()?;
    let mut compared = ArithmeticFunction::parse(func2, ext2, cfg.p0, cfg.prog).map_err(|e| usage(e.to_string()))?;
    if let Some(ov) = &overrides {
        compared.extension = compared.extension.parse_overrides(ov).map_err(|e| usage(e.to_string()))?;
        cfg.record("overrides", ov);
    }
    cfg.record("fn2", func2);
    cfg.record("ext2", &compared.extension);
    cfg.record("class", format!("{class:?}"));
    let n = cfg.need_n()?;
    let u_max = cfg.need_u_max()?;
    let pair = FunctionPair::new(reference, compared, class)?;
    let c = model::compare_pair(&pair, cfg.prog, n, u_max)?;
    let mut r = cfg.report();
    r.set("n", n).set("k", cfg.prog.modulus()).set("l", cfg.prog.residue());
    r.set("reference", summary_json(&c.reference));
    r.set("compared", summary_json(&c.compared));
    r.set("difference", summary_json(&c.difference));
    r.set("mean_difference", num(c.mean_difference));
    r.set("mu_differences", nums(&c.mu_differences));
    r.set("override_contribution", c.override_contribution.map_or(Value::Null, num));
    r.set("predictions", json!({"restricted_sum": nums(&c.restricted_sum), "density_sum": nums(&c.density_sum)}));
    r.table = Table::new(&["u", "reference", "compared", "difference"]);
    for u in 2..=u_max as usize {
        r.table.push(vec![
            ("u", u.into()),
            ("reference", num(c.reference.central_moments[u - 2])),
            ("compared", num(c.compared.central_moments[u - 2])),
            ("difference", num(c.mu_differences[u - 2])),
        ]);
    }
    Ok(r)
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let mut common = cli.common;
    if let Some(path) = common.config.clone() {
        apply_config_file(&mut common, &path)?;
    }
    let (name, default_format) = match &cli.command {
        Command::Sieve { .. } => ("sieve", Format::Lines),
        Command::Sum => ("sum", Format::Json),
        Command::Asymptotic => ("asymptotic", Format::Json),
        Command::Classify => ("classify", Format::Json),
        Command::Probe { .. } => ("probe", Format::Json),
        Command::Moments { .. } => ("moments", Format::Json),
        Command::Model { action } => (
            match action {
                ModelAction::Exact => "model exact",
                ModelAction::Sample => "model sample",
                ModelAction::Lindeberg { .. } => "model lindeberg",
                ModelAction::Compare => "model compare",
            },
            Format::Json,
        ),
        Command::Ektest { .. } => ("ektest", Format::Json),
        Command::Compare { .. } => ("compare", Format::Json),
    };
    let mut cfg = RunConfig::resolve(name, &common, default_format)?;
    let started = Instant::now();
    let run = |cfg: &mut RunConfig| match &cli.command {
        Command::Sieve { limit } => cmd_sieve(cfg, *limit),
        Command::Sum => cmd_sum(cfg),
        Command::Asymptotic => cmd_asymptotic(cfg),
        Command::Classify => cmd_classify(cfg),
        Command::Probe { series } => cmd_probe(cfg, series.as_deref()),
        Command::Moments { b } => cmd_moments(cfg, b.clone()),
        Command::Model { action } => cmd_model(cfg, action),
        Command::Ektest { normalization } => cmd_ektest(cfg, normalization),
        Command::Compare { func2, ext2, class } => cmd_compare(cfg, func2, ext2.as_deref(), class),
    };
    let mut report = match common.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| usage(format!("--workers: {e}")))?;
            pool.install(|| run(&mut cfg))?
        }
        None => run(&mut cfg)?,
    };
    if cfg.timing {
        report.duration_seconds = Some(started.elapsed().as_secs_f64());
    }
    emit(&report, cfg.format, cfg.out.as_deref())?;
    Ok(())
}

/// Runs the command line; returns the process exit status
/// (0 success, 1 computation error, 2 usage error).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}", Cli::command().render_usage());
            2
        }
        Err(CliError::Compute(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

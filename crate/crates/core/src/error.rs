use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("residue {residue} out of range for modulus {modulus}")]
    ResidueOutOfRange { modulus: u64, residue: u64 },

    #[error("progression ({modulus}, {residue}) is not coprime: gcd = {gcd}")]
    NotCoprime { modulus: u64, residue: u64, gcd: u64 },

    #[error("sieve limit {0} is below 2")]
    LimitTooSmall(u64),

    #[error("sieve limit {limit} exceeds the configured ceiling {ceiling}")]
    LimitAboveCeiling { limit: u64, ceiling: u64 },

    #[error("block length {block_len} outside the memory budget [{min}, {max}]")]
    MemoryBudget { block_len: usize, min: usize, max: usize },

    #[error("cannot factor zero")]
    FactorZero,

    #[error("smallest-prime-factor source does not cover {0}")]
    SpfOutOfRange(u64),

    #[error("no tabulated value for prime {0}")]
    MissingTabulated(u64),

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("unknown builtin function '{0}'")]
    UnknownBuiltin(String),

    #[error("mean_via_counts requires a strongly additive extension")]
    NotStronglyAdditive,

    #[error("empty progression: no member in [1, {n}] for ({modulus}, {residue})")]
    EmptyProgression { n: u64, modulus: u64, residue: u64 },

    #[error("no catalogued closed form for this function and order; use integral_asymptotic")]
    NoClosedForm,

    #[error("function has no symbolic decay class: {0}")]
    Unclassifiable(String),

    #[error("function is not differentiable in closed form: {0}")]
    NotDifferentiable(String),

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

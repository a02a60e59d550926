use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("square class of zero is undefined")]
    ZeroSquareClass,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("integer {0} is too large to factor (limit 2^128)")]
    TooLargeToFactor(String),
    #[error("prime factor {0} exceeds 2^64")]
    PrimeTooLarge(String),
    #[error("w(d) is defined only for d <= -4, got {0}")]
    InvalidDiscriminant(i64),
    #[error("{0} must be a positive non-square integer")]
    NotPositiveNonSquare(i64),
    #[error("invalid binary form: {0}")]
    InvalidForm(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("invalid conic bundle data: {0}")]
    InvalidBundle(String),
    #[error("Faddeev reciprocity fails: product of the a_i has nontrivial class {0}")]
    FaddeevFailure(String),
    #[error("invalid norm-form system: {0}")]
    InvalidSystem(String),
    #[error("invalid count job: {0}")]
    InvalidJob(String),
    #[error("depth {depth} is below the Hensel bound {bound} at p = {p}")]
    DepthTooSmall { p: u64, depth: u32, bound: u32 },
    #[error("p^k = {p}^{k} exceeds the enumeration cap {cap}; raise the cap or use the stabilization shortcut")]
    EnumerationCap { p: u64, k: u32, cap: u64 },
    #[error("p-adic solubility at p = {p} undecided up to depth {depth}")]
    Undecided { p: u64, depth: u32 },
    #[error("G(p^k) did not stabilize at p = {p} for k <= {k_max}: {diagnostics}")]
    NoStabilization { p: u64, k_max: u32, diagnostics: String },
    #[error("no prediction: local density vanishes at {0}")]
    LocallyInsoluble(String),
    #[error("fibre parameter {0} is a degenerate point")]
    DegenerateParameter(String),
    #[error("invalid Brauer element: {0}")]
    InvalidBrauerElement(String),
    #[error("nontrivial local invariant possible at place {0} outside the declared support")]
    SupportTooSmall(String),
    #[error("resolution {resolution} does not give locally constant invariants at {place}, cell {cell}")]
    ResolutionTooCoarse { place: String, resolution: u32, cell: String },
    #[error("fibre over t = {t} has no point over the completion at {place}")]
    InsolubleFibre { place: String, t: String },
    #[error("parameter at {place} known to p^{given}; needs p^{needed}")]
    InsufficientPrecision { place: String, needed: i64, given: i64 },
    #[error("invalid polynomial data: {0}")]
    InvalidPolynomial(String),
    #[error("parse error: {0}")]
    Parse(String),
}

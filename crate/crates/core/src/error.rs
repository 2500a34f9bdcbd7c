use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the crate. Axis numbers in messages are 1-based to
/// match report output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("base {base} on axis {axis} is too small (every base must be >= 2)")]
    BaseTooSmall { axis: usize, base: u32 },
    #[error("digit set is empty")]
    EmptyDigits,
    #[error("digit {digit:?} has {got} coordinates, expected {expected}")]
    DigitArityMismatch {
        digit: Vec<u32>,
        got: usize,
        expected: usize,
    },
    #[error("digit value {value} on axis {axis} is out of range for base {base}")]
    DigitOutOfRange { axis: usize, value: u32, base: u32 },
    #[error("duplicate digit {digit:?}")]
    DuplicateDigit { digit: Vec<u32> },
    #[error("axis {axis} out of range 1..={dims}")]
    AxisOutOfRange { axis: usize, dims: usize },
    #[error("every axis is degenerate; the attractor is a single point")]
    AllAxesDegenerate,
    #[error("word uses digit index {index} but the spec has {count} digits")]
    WordIndexOutOfRange { index: usize, count: usize },
    #[error("enumerating {needed} boxes exceeds the budget of {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("boxes at depth {depth} have diameter larger than delta = {delta}")]
    DepthTooShallow { depth: u32, delta: String },
    #[error("delta = {delta} is not smaller than the cylinder side {side}")]
    DeltaTooLarge { delta: String, side: String },
    #[error("exact integer arithmetic overflowed; rerun with an arbitrary-precision scalar")]
    ArithmeticOverflow,
    #[error("profile has {got} usable rows but at least {min} are required")]
    ProfileTooShort { min: usize, got: usize },
    #[error("invalid certificate: {reason}")]
    InvalidCertificate { reason: String },
    #[error("malformed report: {reason}")]
    MalformedReport { reason: String },
}

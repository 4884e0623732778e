use thiserror::Error;

/// Errors raised by kernel, space, operator and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point outside the positive half-line: x = {0}")]
    Domain(f64),

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("moment of order {order} diverges (witness log u = {log_u}, k = {k}, last estimate {last_estimate:e})")]
    DivergentMoment {
        order: f64,
        log_u: f64,
        k: i64,
        last_estimate: f64,
    },

    #[error("non-finite value of `{name}` at x = {x}")]
    NonFinite { name: String, x: f64 },

    #[error("Mellin derivative order {0} is not supported (maximum 6)")]
    UnsupportedOrder(u32),

    #[error("empty index set J_w for w = {w} on [{a}, {b}]")]
    EmptyIndexSet { w: f64, a: f64, b: f64 },

    #[error("samples do not cover index k = {k} (available {first}..={last})")]
    SampleCoverage { k: i64, first: i64, last: i64 },

    #[error("degenerate denominator {denominator:e} at x = {x}, w = {w}, k in {first}..={last}")]
    DegenerateDenominator {
        x: f64,
        w: f64,
        first: i64,
        last: i64,
        denominator: f64,
    },

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Failure modes of the numerical layer. Convergence failures are always
/// surfaced; no routine silently returns a best-effort value.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: non-finite argument {value}")]
    NonFinite { op: &'static str, value: f64 },

    #[error("{op}: {name} = {value} violates {constraint}")]
    OutOfDomain {
        op: &'static str,
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("incomplete beta continued fraction for (x={x}, a={a}, b={b}) hit the {iterations}-iteration cap")]
    ContinuedFraction {
        x: f64,
        a: f64,
        b: f64,
        iterations: usize,
    },

    #[error("quadrature stalled at error estimate {achieved:e} (requested {requested:e})")]
    QuadratureAccuracy { requested: f64, achieved: f64 },

    #[error("integral of {what} appears divergent: estimate moved by {delta:e} when the subdivision budget doubled")]
    DivergentIntegral { what: &'static str, delta: f64 },

    #[error("{op} requires a measure with a density component")]
    NoDensity { op: &'static str },

    #[error("all mass sits on {{0,1}}; the interior conditional measure is undefined")]
    DegenerateBoundary,

    #[error("bisection could not bracket a root in [{lo}, {hi}]")]
    Bisection { lo: f64, hi: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure JSON rejected: {0}")]
    MeasureJson(String),

    #[error("urn state would exceed exact integer range: A={a}, B={b}, m={m}, n={n}")]
    UrnOverflow { a: u64, b: u64, m: u64, n: u64 },

    #[error("smooth density has no sampling envelope")]
    MissingEnvelope,

    #[error("law cell k={k}: {source}")]
    CellQuadrature { k: usize, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

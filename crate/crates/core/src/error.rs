use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("input error: {0}")]
    Input(String),

    /// `S(lambda) - z` is numerically singular.
    #[error("shift error: S(lambda) - z is numerically singular at z = {z} (condition {condition:.3e})")]
    Shift { z: String, condition: f64 },

    /// A parameter fell inside (or within guard distance of) a family's excluded set.
    #[error(
        "domain error: lambda = {lambda} lies in the excluded set of `{label}` (nearest excluded point {nearest})"
    )]
    Domain {
        label: String,
        lambda: String,
        nearest: String,
    },

    #[error("factorization error: {factor} is singular ({detail})")]
    Factorization { factor: String, detail: String },

    #[error("definiteness error: {0}")]
    Definiteness(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("contour error: {0}")]
    Contour(String),

    #[error("linearization error: {0}")]
    Linearization(String),

    #[error("quadrature error: coefficient `{coefficient}` did not converge (relative change {change:.3e})")]
    Quadrature { coefficient: String, change: f64 },

    #[error("window error: {0}")]
    Window(String),

    #[error("convergence error: {0}")]
    Convergence(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

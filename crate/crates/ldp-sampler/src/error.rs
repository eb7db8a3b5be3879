use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Mismatched support sizes or dimensions.
    #[error("shape error: {0}")]
    Shape(String),

    /// A root-finding bracket had no sign change.
    #[error("bracket error: no sign change on [{lo}, {hi}] (f(lo)={f_lo}, f(hi)={f_hi})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// Input distribution violates the admissible density-ratio band.
    #[error(
        "membership error: density ratio {worst_ratio} against the reference \
         falls outside [{band_lo}, {band_hi}]"
    )]
    Membership {
        worst_ratio: f64,
        band_lo: f64,
        band_hi: f64,
    },

    /// Invalid experiment or CLI configuration.
    #[error("config error: {0}")]
    Config(String),

    /// An internal solver invariant failed.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by constructors and operations of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A constructor rejected its parameters. `invariant` names the
    /// violated condition so callers can point at it.
    #[error("invalid parameter: {detail} (violates `{invariant}`)")]
    InvalidParameter {
        invariant: &'static str,
        detail: String,
    },

    /// F(x)/F(cx) is not a distribution function for the requested scale.
    #[error("invalid cofactor for scale c = {scale}: {detail}")]
    InvalidCofactor { scale: f64, detail: String },

    /// The scale has no associated exponent for this law.
    #[error("unsupported scale c = {scale}: {detail}")]
    UnsupportedScale { scale: f64, detail: String },

    #[error("empty input")]
    EmptyInput,

    #[error("need at least {required} replicates, got {got}")]
    InsufficientReplicates { required: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(invariant: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidParameter {
        invariant,
        detail: detail.into(),
    }
}

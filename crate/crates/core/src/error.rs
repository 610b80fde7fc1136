use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("input error: {0}")]
    Input(String),

    /// An enumeration would exceed its configured cap.
    #[error("budget refusal: {what} needs {needed}, cap is {cap}")]
    Budget { what: String, needed: u128, cap: u128 },

    /// Instance violates a precondition of an otherwise well-formed operation.
    #[error("degenerate instance: {0}")]
    Degenerate(String),

    /// A construction invariant failed; indicates a bug or a violated lemma.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

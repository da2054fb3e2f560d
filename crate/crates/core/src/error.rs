use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("digit {digit} is out of range for radix {radix}")]
    InvalidDigit { digit: u32, radix: u32 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A cell satisfying the assumptions produced a limit set other than `{1, 2}`.
    #[error("theorem violation at k={k}, p={p}:\n{dump}")]
    TheoremViolation { k: u32, p: u32, dump: String },

    #[error("malformed checkpoint record: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

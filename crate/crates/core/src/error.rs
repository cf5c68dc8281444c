use thiserror::Error;

pub type Result<T, E = SspError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SspError {
    /// Input data violates a structural requirement (empty, mixed lengths, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A record in a FASTA/FASTQ/raw stream could not be parsed.
    #[error("parse error in record {record}: {message}")]
    Parse { record: usize, message: String },

    /// A numeric argument is outside its domain.
    #[error("argument error: {0}")]
    Argument(String),

    /// A size cap was exceeded.
    #[error("capacity error: {what} is {actual}, limit is {limit}")]
    Capacity {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

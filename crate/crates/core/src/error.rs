use thiserror::Error;

/// Errors raised by every structure in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("position {pos} out of range [{lo}, {hi}]")]
    OutOfRange { pos: u64, lo: u64, hi: u64 },

    #[error("occurrence {ordinal} of {what} not found (only {total} present)")]
    NotFound {
        what: String,
        ordinal: u64,
        total: u64,
    },

    #[error("symbol {symbol} outside alphabet of size {sigma}")]
    UnknownSymbol { symbol: u64, sigma: u64 },

    #[error("invalid construction input: {0}")]
    Construction(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("ingestion: {0}")]
    Ingestion(String),

    #[error("duplicate event at day {day}, employee {employee}, time {time}")]
    DuplicateCell { day: u32, employee: u32, time: u32 },

    #[error("structural invariant violated: {0}")]
    Invariant(String),

    #[error("corrupt or unsupported data: {0}")]
    Format(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(pos: usize, lo: usize, hi: usize) -> Result<()> {
    if pos < lo || pos > hi {
        Err(Error::OutOfRange {
            pos: pos as u64,
            lo: lo as u64,
            hi: hi as u64,
        })
    } else {
        Ok(())
    }
}

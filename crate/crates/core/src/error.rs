use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("block length must be a positive even integer, got {0}")]
    InvalidLength(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("prefix length {prefix} must be smaller than block length {n}")]
    PrefixTooLong { prefix: usize, n: usize },
    #[error("block has zero energy")]
    ZeroEnergy,
    #[error("index {index} outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("{subblocks} sub-blocks do not evenly divide {len} subcarriers")]
    IndivisibleSubblocks { subblocks: usize, len: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("delay and Doppler are not jointly identifiable (singular Fisher information)")]
    Unidentifiable,
    #[error("reference signal has zero norm")]
    DegenerateReference,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { name, reason }
}

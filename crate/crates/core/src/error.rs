use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signal is empty")]
    EmptySignal,
    #[error("sample rate must be positive")]
    InvalidSampleRate,
    #[error("cannot decimate {from_hz} Hz to {to_hz} Hz: not an integer factor")]
    NonIntegerFactor { from_hz: u32, to_hz: u32 },
    #[error("cannot fit normalization to a constant signal")]
    ConstantSignal,
    #[error("signal has {len} samples, shorter than one frame of {frame_len}")]
    SignalTooShort { len: usize, frame_len: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("layer dimensions must be non-zero")]
    ZeroDimension,
    #[error("invalid {name}: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("training diverged in epoch {epoch} (non-finite loss)")]
    Diverged { epoch: usize },
    #[error("reference signal is identically zero")]
    ZeroReference,
    #[error("need at least {required} points, got {actual}")]
    TooFewPoints { required: usize, actual: usize },
    #[error("input is constant")]
    ConstantInput,
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Failures decoding a serialized model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("bad magic bytes {0:02x?}, expected \"DTAE\"")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated model: needed {needed} bytes, found {found}")]
    Truncated { needed: usize, found: usize },
    #[error("model dimensions {input_len}x{hidden_len} overflow addressable memory")]
    DimensionOverflow { input_len: u32, hidden_len: u32 },
    #[error("{0} trailing bytes after model data")]
    TrailingBytes(usize),
    #[error("invalid header: {0}")]
    InvalidHeader(&'static str),
    #[error("non-finite parameter in {0}")]
    NonFinite(&'static str),
}

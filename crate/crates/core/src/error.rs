use thiserror::Error;

/// Errors produced by synthesis, channel, spectral and decoding routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid DTMF symbol {0:?}")]
    InvalidSymbol(char),

    #[error("sample rate {fs} Hz aliases a {freq} Hz tone (need fs > {nyquist} Hz)")]
    Aliasing { fs: f64, freq: f64, nyquist: f64 },

    #[error("invalid sample rate {0} Hz")]
    InvalidSampleRate(f64),

    #[error("timing profile: {0}")]
    Profile(String),

    #[error("SNR undefined: reference signal has zero power")]
    UndefinedSnr,

    #[error("SNR must be finite, got {0}")]
    NonFiniteSnr(f64),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("transform length must be at least 1")]
    ZeroLength,

    #[error("bin {k} out of range for N = {n}")]
    BinOutOfRange { k: usize, n: usize },

    #[error("frequency {0} rad/sample outside [0, pi]")]
    FrequencyOutOfRange(f64),

    #[error("sequence length {0} is odd; subband split needs an even length")]
    OddLength(usize),

    #[error("NDFT evaluation point z = 0 is singular for sequences longer than one sample")]
    SingularPoint,

    #[error("compensation 1 + cos(w) vanishes at w = pi")]
    CompensationSingularity,

    #[error("frame of {len} samples is shorter than the {min}-sample minimum")]
    FrameTooShort { len: usize, min: usize },

    #[error("segmentation config: {0}")]
    Config(String),

    #[error("wav: {0}")]
    Wav(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

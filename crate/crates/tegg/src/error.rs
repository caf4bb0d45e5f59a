//! Error type shared by the whole crate.

use std::path::PathBuf;

/// Errors raised by signal I/O, analysis, and the transform pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("not a readable WAV file: {0}")]
    InvalidWav(String),

    #[error("expected {expected} channels, found {found}")]
    ChannelCount { expected: u16, found: u16 },

    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("signal is empty")]
    EmptySignal,

    #[error("signal is all zeros")]
    AllZeroSignal,

    #[error("sample rates differ: {a} Hz vs {b} Hz")]
    RateMismatch { a: u32, b: u32 },

    #[error("channel lengths differ: {a} vs {b} samples")]
    LengthMismatch { a: usize, b: usize },

    #[error("{to} Hz does not divide {from} Hz by an integer factor")]
    NonIntegerFactor { from: u32, to: u32 },

    #[error("target rate {to} Hz must be below source rate {from} Hz")]
    NotDownsampling { from: u32, to: u32 },

    #[error("interpolation factor must be >= 2, got {0}")]
    FactorTooSmall(usize),

    #[error("invalid frame spec: {0}")]
    InvalidFrameSpec(String),

    #[error("signal shorter than one analysis window ({len} < {window} samples)")]
    SignalShorterThanWindow { len: usize, window: usize },

    #[error("window/hop pair does not satisfy constant overlap-add")]
    NotConstantOverlapAdd,

    #[error("spectrogram has no frames")]
    EmptySpectrogram,

    #[error("fft size {fft_size} invalid for window of {window} samples (need a power of two >= window)")]
    InvalidFftSize { fft_size: usize, window: usize },

    #[error("denominator has a zero on the frequency grid (bin {bin}); filter is unstable or marginal")]
    ZeroOnGrid { bin: usize },

    #[error("magnitude target is identically zero")]
    AllZeroTarget,

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("LPC order {order} must be below frame length {len}")]
    OrderTooLarge { order: usize, len: usize },

    #[error("frame is all zeros; cannot fit a predictor")]
    AllZeroFrame,

    #[error("degenerate autocorrelation; predictor solve failed")]
    DegenerateAutocorrelation,

    #[error("no voiced samples were detected")]
    NoVoicedSamples,

    #[error("no valid frames survived analysis")]
    ZeroValidFrames,

    #[error("cannot estimate f0: no periodicity above threshold")]
    CannotEstimateF0,

    #[error("EGG channel is silent: every frame hit the envelope guard")]
    SilentEgg,
}

pub type Result<T> = std::result::Result<T, Error>;

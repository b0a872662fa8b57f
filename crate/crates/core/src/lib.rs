//! DTMF (touch-tone) signal laboratory.
//!
//! The crate is split along the signal path:
//!
//! * [`keypad`] maps keypad symbols to their row/column tone pair and
//!   synthesizes digits and dial strings.
//! * [`channel`] corrupts clean signals with calibrated white Gaussian noise
//!   and realizes randomized Mark/Space timing.
//! * [`spectral`] holds the frequency-domain kernels: DTFT, uniform DFT,
//!   Goertzel, and the subband NDFT with high-band compensation.
//! * [`decoder`] segments a signal into tone bursts and classifies each burst.
//! * [`audio_io`] reads and writes 16-bit PCM WAV and the CSV artifacts.

pub mod audio_io;
pub mod channel;
pub mod decoder;
pub mod error;
pub mod keypad;
pub mod spectral;

pub use channel::{NoiseSpec, TimingJitterSpec};
pub use decoder::{DecodeReport, SegmentationConfig};
pub use error::{Error, Result};
pub use keypad::{RadianPair, SignalBuffer, Symbol, TimingProfile};
pub use spectral::{Backend, SpectrumEstimate};

/// Sample rate used throughout the experiments, in Hz.
pub const DEFAULT_SAMPLE_RATE: f64 = 8192.0;

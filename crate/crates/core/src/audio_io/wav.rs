use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keypad::SignalBuffer;

/// Full-scale amplitude: the peak of a sum of two unit sinusoids.
const FULL_SCALE: f64 = 2.0;
const Q_MAX: f64 = 32767.0;

/// Mono 16-bit PCM output settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WavSpec {
    pub sample_rate: u32,
}

impl Default for WavSpec {
    fn default() -> Self {
        WavSpec { sample_rate: 8192 }
    }
}

impl WavSpec {
    pub fn for_buffer(x: &SignalBuffer) -> Self {
        WavSpec {
            sample_rate: x.fs.round() as u32,
        }
    }
}

/// What [`write_wav`] had to do to fit the samples into 16 bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WavStats {
    pub samples: usize,
    pub clipped: usize,
}

/// `round(s / 2 * 32767)` saturated to the i16 range, plus whether it saturated.
pub fn quantize(s: f64) -> (i16, bool) {
    let q = (s / FULL_SCALE * Q_MAX).round();
    if q > i16::MAX as f64 {
        (i16::MAX, true)
    } else if q < i16::MIN as f64 {
        (i16::MIN, true)
    } else {
        (q as i16, false)
    }
}

pub fn dequantize(q: i16) -> f64 {
    q as f64 / Q_MAX * FULL_SCALE
}

/// Writes `x` as RIFF/WAVE PCM, 16-bit little-endian, mono.
pub fn write_wav(x: &SignalBuffer, path: impl AsRef<Path>, spec: WavSpec) -> Result<WavStats> {
    if spec.sample_rate == 0 {
        return Err(Error::InvalidSampleRate(0.0));
    }
    if let Some(bad) = x.samples.iter().find(|v| !v.is_finite()) {
        return Err(Error::Wav(format!("non-finite sample {bad}")));
    }
    let header = hound::WavSpec {
        channels: 1,
        sample_rate: spec.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, header).map_err(wav_err)?;
    let mut stats = WavStats {
        samples: x.len(),
        clipped: 0,
    };
    for &s in &x.samples {
        let (q, clipped) = quantize(s);
        stats.clipped += usize::from(clipped);
        writer.write_sample(q).map_err(wav_err)?;
    }
    writer.finalize().map_err(wav_err)?;
    Ok(stats)
}

/// Reads a mono 16-bit PCM WAV file; the sample rate comes from the header.
pub fn read_wav(path: impl AsRef<Path>) -> Result<SignalBuffer> {
    let reader = hound::WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::Wav(format!("expected mono, found {} channels", spec.channels)));
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::Wav(format!(
            "unsupported format: {:?} {}-bit (need 16-bit PCM)",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|q| q.map(dequantize).map_err(wav_err))
        .collect::<Result<Vec<_>>>()?;
    SignalBuffer::new(samples, spec.sample_rate as f64)
}

fn wav_err(e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) => Error::Io(io),
        other => Error::Wav(other.to_string()),
    }
}

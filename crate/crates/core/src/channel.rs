//! Channel impairments: calibrated white Gaussian noise and randomized
//! Mark/Space timing, plus the SNR and error-rate measures that go with them.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded through
//! [`SeedableRng::seed_from_u64`]; Gaussian samples use the `StandardNormal`
//! ziggurat sampler from `rand_distr`. Given the same seed and inputs the
//! output is bit-identical across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keypad::{Durations, SignalBuffer, TimingProfile};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The generator behind every stochastic operation in the crate.
pub type NoiseRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> NoiseRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for trial `index` of a sweep driven by `master`.
///
/// This is one step of the SplitMix64 sequence started at `master`, so
/// trials get decorrelated seeds and the result depends only on
/// `(master, index)`, never on execution order.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(snr_db: f64, seed: u64) -> Self {
        NoiseSpec { snr_db, seed }
    }
}

/// Returns `clean + w` with `w ~ N(0, P * 10^(-snr/10))`, where `P` is the
/// mean-square of `clean` (silent gaps included).
pub fn add_awgn(clean: &SignalBuffer, spec: &NoiseSpec) -> Result<SignalBuffer> {
    if !spec.snr_db.is_finite() {
        return Err(Error::NonFiniteSnr(spec.snr_db));
    }
    let power = clean.mean_square();
    if power == 0.0 {
        return Err(Error::UndefinedSnr);
    }
    let sigma = (power * 10f64.powf(-spec.snr_db / 10.0)).sqrt();
    let mut rng = rng_from_seed(spec.seed);
    let samples = clean
        .samples
        .iter()
        .map(|&x| {
            let w: f64 = rng.sample(StandardNormal);
            x + sigma * w
        })
        .collect();
    SignalBuffer::new(samples, clean.fs)
}

fn variance(values: impl Iterator<Item = f64> + Clone, len: usize) -> f64 {
    let mean = values.clone().sum::<f64>() / len as f64;
    values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / len as f64
}

/// `10 log10(var(reference) / var(observed - reference))`.
///
/// Returns `f64::INFINITY` when the two buffers are identical up to a
/// constant offset.
pub fn measured_snr(reference: &SignalBuffer, observed: &SignalBuffer) -> Result<f64> {
    let (signal_var, error_var) = variance_pair(reference, observed)?;
    if error_var == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal_var / error_var).log10())
}

/// `var(observed - reference) / var(reference)`, the measured counterpart of
/// [`theoretical_error_rate`] expressed as a fraction.
pub fn noise_power_ratio(reference: &SignalBuffer, observed: &SignalBuffer) -> Result<f64> {
    let (signal_var, error_var) = variance_pair(reference, observed)?;
    Ok(error_var / signal_var)
}

fn variance_pair(reference: &SignalBuffer, observed: &SignalBuffer) -> Result<(f64, f64)> {
    if reference.len() != observed.len() {
        return Err(Error::LengthMismatch {
            left: reference.len(),
            right: observed.len(),
        });
    }
    let n = reference.len();
    if n == 0 {
        return Err(Error::UndefinedSnr);
    }
    let signal_var = variance(reference.samples.iter().copied(), n);
    if signal_var == 0.0 {
        return Err(Error::UndefinedSnr);
    }
    let diff = reference
        .samples
        .iter()
        .zip(&observed.samples)
        .map(|(r, o)| o - r);
    Ok((signal_var, variance(diff, n)))
}

/// Noise-to-signal power ratio in percent for a given SNR in dB.
pub fn theoretical_error_rate(snr_db: f64) -> f64 {
    100.0 * 10f64.powf(-snr_db / 10.0)
}

/// Where a run of Mark or Space durations comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JitterSource {
    /// Explicit values; the first `k` are used when `k` are needed.
    List(Vec<usize>),
    /// Uniform over `[mean - spread, mean + spread]`, rounded to an integer.
    Uniform { mean: f64, spread: f64 },
}

impl JitterSource {
    fn realize(&self, what: &str, count: usize, min: usize, rng: &mut NoiseRng) -> Result<Vec<usize>> {
        match self {
            JitterSource::List(values) => {
                if values.len() < count {
                    return Err(Error::Profile(format!(
                        "{} {what} values given, {count} required",
                        values.len()
                    )));
                }
                let out = values[..count].to_vec();
                if let Some(v) = out.iter().find(|&&v| v < min) {
                    return Err(Error::Profile(format!("{what} value {v} is below {min}")));
                }
                Ok(out)
            }
            &JitterSource::Uniform { mean, spread } => {
                if !(mean.is_finite() && spread.is_finite() && spread >= 0.0) {
                    return Err(Error::Profile(format!(
                        "{what} distribution needs finite mean and non-negative spread"
                    )));
                }
                if mean < min as f64 {
                    return Err(Error::Profile(format!("{what} mean {mean} is below {min}")));
                }
                Ok((0..count)
                    .map(|_| {
                        let v = if spread == 0.0 {
                            mean
                        } else {
                            rng.random_range(mean - spread..=mean + spread)
                        };
                        (v.round().max(0.0) as usize).max(min)
                    })
                    .collect())
            }
        }
    }
}

/// Randomized Mark/Space configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingJitterSpec {
    pub marks: JitterSource,
    pub spaces: JitterSource,
    pub trailing_space: bool,
    pub seed: u64,
}

/// Draws a concrete [`TimingProfile`] for a dial string of `digits` symbols.
///
/// Marks are drawn first, then spaces, from a single seeded stream.
pub fn realize_timing(digits: usize, spec: &TimingJitterSpec) -> Result<TimingProfile> {
    let mut rng = rng_from_seed(spec.seed);
    let marks = spec.marks.realize("mark", digits, 1, &mut rng)?;
    let n_spaces = match digits {
        0 => 0,
        n if spec.trailing_space => n,
        n => n - 1,
    };
    let spaces = spec.spaces.realize("space", n_spaces, 0, &mut rng)?;
    let profile = TimingProfile {
        marks: Durations::PerItem(marks),
        spaces: Durations::PerItem(spaces),
        trailing_space: spec.trailing_space,
    };
    profile.validate(digits)?;
    Ok(profile)
}

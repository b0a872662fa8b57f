use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use touchtone::channel::{realize_timing, JitterSource, TimingJitterSpec};
use touchtone::decoder::SegmentationConfig;
use touchtone::keypad::{parse_dial_string, Symbol};
use touchtone::TimingProfile;

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Sample rate in Hz.
    #[arg(long, default_value_t = touchtone::DEFAULT_SAMPLE_RATE)]
    pub fs: f64,

    /// Directory for artifacts and the run manifest.
    #[arg(long, default_value = "touchtone-out")]
    pub out_dir: PathBuf,

    /// Master seed. Required whenever noise or random timing is involved.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl CommonArgs {
    pub fn require_seed(&self, why: &str) -> Result<u64> {
        self.seed
            .with_context(|| format!("--seed is required when {why} (no clock-based default)"))
    }
}

/// Mark/Space durations in samples: fixed, explicit lists, or uniform
/// distributions around `--mark`/`--space`.
#[derive(Args, Debug, Clone)]
pub struct TimingArgs {
    /// Mark length (mean in distribution mode).
    #[arg(long, default_value_t = 1000)]
    pub mark: usize,

    /// Space length (mean in distribution mode).
    #[arg(long, default_value_t = 100)]
    pub space: usize,

    /// Per-digit Mark lengths, comma separated. The first k values are used.
    #[arg(long, value_delimiter = ',', conflicts_with = "mark_spread")]
    pub mark_list: Option<Vec<usize>>,

    /// Per-gap Space lengths, comma separated. The first k values are used.
    #[arg(long, value_delimiter = ',', conflicts_with = "space_spread")]
    pub space_list: Option<Vec<usize>>,

    /// Draw each Mark uniformly from mark ± spread.
    #[arg(long)]
    pub mark_spread: Option<f64>,

    /// Draw each Space uniformly from space ± spread.
    #[arg(long)]
    pub space_spread: Option<f64>,

    /// Follow the last digit with a Space too.
    #[arg(long)]
    pub trailing_space: bool,
}

/// Timing as it was requested and as it was realized.
#[derive(Debug, Clone, Serialize)]
pub struct TimingRecord {
    pub mode: &'static str,
    pub marks_source: JitterSource,
    pub spaces_source: JitterSource,
    pub marks: Vec<usize>,
    pub spaces: Vec<usize>,
    pub trailing_space: bool,
}

impl TimingArgs {
    fn is_random(&self) -> bool {
        self.mark_spread.is_some_and(|s| s > 0.0) || self.space_spread.is_some_and(|s| s > 0.0)
    }

    fn is_fixed(&self) -> bool {
        self.mark_list.is_none() && self.space_list.is_none() && self.mark_spread.is_none() && self.space_spread.is_none()
    }

    pub fn resolve(&self, digits: usize, common: &CommonArgs) -> Result<(TimingProfile, TimingRecord)> {
        let source = |list: &Option<Vec<usize>>, mean: usize, spread: Option<f64>| match list {
            Some(v) => JitterSource::List(v.clone()),
            None => JitterSource::Uniform {
                mean: mean as f64,
                spread: spread.unwrap_or(0.0),
            },
        };
        let marks_source = source(&self.mark_list, self.mark, self.mark_spread);
        let spaces_source = source(&self.space_list, self.space, self.space_spread);

        let (profile, mode) = if self.is_fixed() {
            let profile = TimingProfile {
                trailing_space: self.trailing_space,
                ..TimingProfile::fixed(self.mark, self.space)
            };
            profile.validate(digits)?;
            (profile, "fixed")
        } else {
            let seed = if self.is_random() {
                common.require_seed("Mark/Space are drawn at random")?
            } else {
                common.seed.unwrap_or(0)
            };
            let spec = TimingJitterSpec {
                marks: marks_source.clone(),
                spaces: spaces_source.clone(),
                trailing_space: self.trailing_space,
                seed,
            };
            let mode = if self.is_random() { "distribution" } else { "list" };
            (realize_timing(digits, &spec)?, mode)
        };
        let record = TimingRecord {
            mode,
            marks_source,
            spaces_source,
            marks: (0..digits).map(|i| profile.mark(i)).collect(),
            spaces: (0..profile.space_count(digits)).map(|i| profile.space(i)).collect(),
            trailing_space: self.trailing_space,
        };
        Ok((profile, record))
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `noisy` when noise is added, `experiment` otherwise.
    Auto,
    /// 40 ms minimum Mark and Space.
    Standard,
    /// Short analysis window; gaps down to 20 samples.
    Experiment,
    /// Wider analysis window for noisy input; gaps down to 20 samples.
    Noisy,
}

impl Preset {
    pub fn config(self, fs: f64, noisy: bool) -> SegmentationConfig {
        match self {
            Preset::Auto if noisy => SegmentationConfig::noisy(fs),
            Preset::Auto | Preset::Experiment => SegmentationConfig::experiment(fs),
            Preset::Standard => SegmentationConfig::default_for(fs),
            Preset::Noisy => SegmentationConfig::noisy(fs),
        }
    }
}

pub fn digits(s: &str) -> Result<Vec<Symbol>> {
    parse_dial_string(s).with_context(|| format!("bad dial string {s:?}"))
}

/// `start:stop[:step]` (inclusive), a comma list, or a single value.
pub fn parse_snr_range(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t.trim().parse().with_context(|| format!("bad SNR value {t:?}"))?;
        ensure!(v.is_finite(), "SNR value {t:?} is not finite");
        Ok(v)
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (start, stop, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1.0),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => bail!("SNR range {s:?} is not start:stop[:step]"),
        };
        ensure!(step > 0.0, "SNR step must be positive");
        ensure!(stop >= start, "SNR range {s:?} is empty");
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| start + i as f64 * step).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

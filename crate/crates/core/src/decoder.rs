//! Segmentation of a dial signal into tone bursts and per-burst classification.
//!
//! Segmentation tracks the windowed RMS of the signal's content at the eight
//! DTMF frequencies (a sliding DFT over a centered window). Broadband noise
//! contributes to that measure only through the eight analysis bins, so Mark
//! and Space stay separable well below the point where raw RMS would merge
//! them. Runs are found with a two-level hysteresis: a Mark starts when the
//! envelope reaches `energy_threshold_ratio` times its global peak and ends
//! once it falls below half of that level.

use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{add_awgn, theoretical_error_rate, trial_seed, NoiseSpec};
use crate::error::{Error, Result};
use crate::keypad::{
    hz_to_radians, synthesize_sequence, SignalBuffer, Symbol, TimingProfile,
    BANK_FREQS_HZ,
};
use crate::spectral::{bank_power, Backend};

/// Exit level of the hysteresis, as a fraction of the entry level.
const HYSTERESIS_EXIT: f64 = 0.5;

/// Shortest frame [`classify_frame`] accepts by default, in samples.
pub const MIN_FRAME_LEN: usize = 200;

/// No-tone floor per squared analysed sample.
const NO_TONE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    /// Envelope window length in samples.
    pub frame_len: usize,
    /// Entry threshold as a fraction of the peak envelope.
    pub energy_threshold_ratio: f64,
    /// Shorter runs are dropped.
    pub min_mark: usize,
    /// Shorter gaps are bridged.
    pub min_space: usize,
}

impl SegmentationConfig {
    /// 40 ms minimum Mark and Space at sample rate `fs`.
    pub fn default_for(fs: f64) -> Self {
        let forty_ms = (0.040 * fs).round() as usize;
        SegmentationConfig {
            frame_len: 64,
            energy_threshold_ratio: 0.5,
            min_mark: forty_ms,
            min_space: forty_ms,
        }
    }

    /// Settings for the timing experiments: 40 ms Marks, gaps down to 20
    /// samples, and a short window so that such gaps stay visible.
    pub fn experiment(fs: f64) -> Self {
        SegmentationConfig {
            frame_len: 16,
            min_space: 20,
            ..SegmentationConfig::default_for(fs)
        }
    }

    /// Settings for noisy channels with Spaces of at least ~100 samples.
    pub fn noisy(fs: f64) -> Self {
        SegmentationConfig {
            frame_len: 64,
            min_space: 20,
            ..SegmentationConfig::default_for(fs)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frame_len == 0 {
            return Err(Error::Config("frame_len must be positive".into()));
        }
        if !(self.energy_threshold_ratio > 0.0 && self.energy_threshold_ratio < 1.0) {
            return Err(Error::Config(format!(
                "energy_threshold_ratio {} outside (0, 1)",
                self.energy_threshold_ratio
            )));
        }
        if self.min_mark < self.frame_len {
            return Err(Error::Config(format!(
                "min_mark {} is shorter than frame_len {}",
                self.min_mark, self.frame_len
            )));
        }
        Ok(())
    }
}

/// Mean-square content of `x` at the bank frequencies over a centered window
/// of `len` samples, for every sample position.
fn tone_envelope(x: &SignalBuffer, len: usize) -> Vec<f64> {
    let n = x.len();
    let mut env = vec![0.0; n];
    for &f in BANK_FREQS_HZ.iter() {
        let w = hz_to_radians(f, x.fs);
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        prefix.push(acc);
        for (i, &v) in x.samples.iter().enumerate() {
            let (s, c) = (w * i as f64).sin_cos();
            acc += Complex64::new(v * c, -v * s);
            prefix.push(acc);
        }
        for (i, e) in env.iter_mut().enumerate() {
            let lo = i.saturating_sub(len / 2);
            let hi = (lo + len).min(n);
            *e += 2.0 * (prefix[hi] - prefix[lo]).norm_sqr();
        }
    }
    let norm = (len * len) as f64;
    env.iter_mut().for_each(|e| *e = (*e / norm).sqrt());
    env
}

fn hysteresis_runs(env: &[f64], enter: f64, exit: f64) -> Vec<Range<usize>> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &e) in env.iter().enumerate() {
        match start {
            None if e >= enter => start = Some(i),
            Some(s) if e < exit => {
                runs.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push(s..env.len());
    }
    runs
}

/// Finds Mark frames as `(start, len)` pairs, in order.
///
/// A gap counts as the sub-threshold stretch plus one window length, since
/// the centered window shrinks silent intervals by about that much. Run
/// edges carry the same uncertainty, so a Mark is kept once it is within one
/// window length of `min_mark`.
pub fn segment(x: &SignalBuffer, cfg: &SegmentationConfig) -> Result<Vec<(usize, usize)>> {
    cfg.validate()?;
    if x.is_empty() {
        return Ok(Vec::new());
    }
    let env = tone_envelope(x, cfg.frame_len);
    let peak = env.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(Vec::new());
    }
    let enter = cfg.energy_threshold_ratio * peak;
    let runs = hysteresis_runs(&env, enter, HYSTERESIS_EXIT * enter);

    let mut merged: Vec<Range<usize>> = Vec::with_capacity(runs.len());
    for run in runs {
        match merged.last_mut() {
            Some(prev) if run.start - prev.end + cfg.frame_len < cfg.min_space => prev.end = run.end,
            _ => merged.push(run),
        }
    }
    Ok(merged
        .into_iter()
        .filter(|r| r.len() + cfg.frame_len >= cfg.min_mark)
        .map(|r| (r.start, r.len()))
        .collect())
}

/// Which high-group columns take part in classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnSet {
    /// 1209, 1336 and 1477 Hz: the twelve-key keypad.
    Standard,
    /// All four columns, enabling A-D.
    Extended,
}

impl ColumnSet {
    fn count(self) -> usize {
        match self {
            ColumnSet::Standard => 3,
            ColumnSet::Extended => 4,
        }
    }
}

/// Outcome of classifying one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameClass {
    /// `None` when no tone pair stands out.
    pub symbol: Option<Symbol>,
    /// Smaller of the two best/second-best energy ratios.
    pub confidence: f64,
    /// Bank energies, rows first.
    pub energies: [f64; 8],
    pub row_hz: f64,
    pub col_hz: f64,
}

/// Index of the largest value and its ratio to the runner-up.
fn best_of(values: &[f64]) -> (usize, f64, f64) {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let second = values
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let ratio = if second <= 0.0 {
        f64::INFINITY
    } else {
        values[best] / second
    };
    (best, values[best], ratio)
}

/// Frame classifier: backend, transform length and column set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub backend: Backend,
    pub n_dft: usize,
    pub columns: ColumnSet,
    pub min_frame_len: usize,
}

impl Classifier {
    pub fn new(backend: Backend, n_dft: usize) -> Self {
        Classifier {
            backend,
            n_dft,
            columns: ColumnSet::Standard,
            min_frame_len: MIN_FRAME_LEN,
        }
    }

    pub fn with_columns(self, columns: ColumnSet) -> Self {
        Classifier { columns, ..self }
    }

    /// Classifies the first `min(frame.len(), n_dft)` samples of `frame`.
    pub fn classify(&self, frame: &SignalBuffer) -> Result<FrameClass> {
        if frame.len() < self.min_frame_len {
            return Err(Error::FrameTooShort {
                len: frame.len(),
                min: self.min_frame_len,
            });
        }
        if self.n_dft == 0 {
            return Err(Error::ZeroLength);
        }
        let mut energies = [0.0; 8];
        for (e, &f) in energies.iter_mut().zip(BANK_FREQS_HZ.iter()) {
            *e = bank_power(&frame.samples, hz_to_radians(f, frame.fs), self.backend, self.n_dft)?;
        }
        let analysed = frame.len().min(self.n_dft) as f64;
        let floor = NO_TONE_FLOOR * analysed * analysed;

        let (row, row_best, row_ratio) = best_of(&energies[..4]);
        let (col, col_best, col_ratio) = best_of(&energies[4..4 + self.columns.count()]);
        let confidence = row_ratio.min(col_ratio);
        let symbol = if row_best < floor || col_best < floor || confidence <= 1.0 {
            None
        } else {
            Symbol::from_grid(row, col)
        };
        Ok(FrameClass {
            symbol,
            confidence,
            energies,
            row_hz: BANK_FREQS_HZ[row],
            col_hz: BANK_FREQS_HZ[4 + col],
        })
    }
}

/// Classifies one frame against the twelve-key keypad.
pub fn classify_frame(frame: &SignalBuffer, backend: Backend, n_dft: usize) -> Result<FrameClass> {
    Classifier::new(backend, n_dft).classify(frame)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub start: usize,
    pub len: usize,
    /// `None` when the frame was too short to classify.
    pub class: Option<FrameClass>,
}

impl FrameRecord {
    pub fn symbol(&self) -> Option<Symbol> {
        self.class.as_ref().and_then(|c| c.symbol)
    }
}

/// Decoded string with per-frame diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    pub digits: String,
    pub frames: Vec<FrameRecord>,
    pub backend: Backend,
    pub n_dft: usize,
}

/// Segments `x` and classifies every frame; frames without a tone are kept
/// in the diagnostics but contribute no digit.
pub fn decode_with(x: &SignalBuffer, cfg: &SegmentationConfig, classifier: &Classifier) -> Result<DecodeReport> {
    let frames: Vec<FrameRecord> = segment(x, cfg)?
        .into_iter()
        .map(|(start, len)| {
            let class = match classifier.classify(&x.slice(start, len)) {
                Ok(c) => Some(c),
                Err(Error::FrameTooShort { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(FrameRecord { start, len, class })
        })
        .collect::<Result<_>>()?;
    let digits = frames.iter().filter_map(FrameRecord::symbol).map(|s| s.to_char()).collect();
    Ok(DecodeReport {
        digits,
        frames,
        backend: classifier.backend,
        n_dft: classifier.n_dft,
    })
}

pub fn decode_number(
    x: &SignalBuffer,
    cfg: &SegmentationConfig,
    backend: Backend,
    n_dft: usize,
) -> Result<DecodeReport> {
    decode_with(x, cfg, &Classifier::new(backend, n_dft))
}

/// Monte Carlo misclassification tally for one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolErrors {
    pub symbol: Symbol,
    /// Frames of this symbol that were classified.
    pub trials: u64,
    pub errors: u64,
}

impl SymbolErrors {
    pub fn percent(&self) -> f64 {
        100.0 * self.errors as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRateReport {
    pub snr_db: f64,
    pub trials: u64,
    /// One entry per distinct symbol, in order of first appearance.
    pub per_symbol: Vec<SymbolErrors>,
    pub measured_pct: f64,
    pub theoretical_pct: f64,
}

/// Monte Carlo setup for [`digit_error_rate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRateTrial<'a> {
    pub symbols: &'a [Symbol],
    pub timing: &'a TimingProfile,
    pub fs: f64,
    pub classifier: Classifier,
    pub master_seed: u64,
    /// Run trials on the rayon pool; the tallies do not depend on this.
    pub parallel: bool,
}

/// Per-symbol misclassification rate at `snr_db` over `trials` noisy
/// renditions of the dial string.
///
/// Frames are cut at their true boundaries, so only classification is
/// measured. Trial `t` uses noise seed `trial_seed(master_seed, t)` at every
/// SNR, which keeps curves over SNR on common random numbers.
pub fn digit_error_rate(trials: u64, snr_db: f64, setup: &ErrorRateTrial<'_>) -> Result<ErrorRateReport> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let clean = synthesize_sequence(setup.symbols, setup.timing, setup.fs)?;
    let bounds = setup.timing.mark_bounds(setup.symbols.len())?;

    let run_trial = |t: u64| -> Result<Vec<u64>> {
        let noisy = add_awgn(&clean, &NoiseSpec::new(snr_db, trial_seed(setup.master_seed, t)))?;
        bounds
            .iter()
            .zip(setup.symbols)
            .map(|(&(start, len), &truth)| {
                let class = setup.classifier.classify(&noisy.slice(start, len))?;
                Ok(u64::from(class.symbol != Some(truth)))
            })
            .collect()
    };
    let add = |a: Vec<u64>, b: Vec<u64>| -> Vec<u64> { a.iter().zip(&b).map(|(p, q)| p + q).collect() };
    let zero = vec![0u64; setup.symbols.len()];

    let mistakes = if setup.parallel {
        (0..trials)
            .into_par_iter()
            .map(run_trial)
            .try_reduce(|| zero.clone(), |a, b| Ok(add(a, b)))?
    } else {
        (0..trials).map(run_trial).try_fold(zero.clone(), |a, b| b.map(|b| add(a, b)))?
    };

    let mut per_symbol: Vec<SymbolErrors> = Vec::new();
    for (&symbol, &errors) in setup.symbols.iter().zip(&mistakes) {
        match per_symbol.iter_mut().find(|e| e.symbol == symbol) {
            Some(entry) => {
                entry.trials += trials;
                entry.errors += errors;
            }
            None => per_symbol.push(SymbolErrors { symbol, trials, errors }),
        }
    }
    let total_frames = trials * setup.symbols.len() as u64;
    let total_errors: u64 = mistakes.iter().sum();
    Ok(ErrorRateReport {
        snr_db,
        trials,
        per_symbol,
        measured_pct: if total_frames == 0 {
            0.0
        } else {
            100.0 * total_errors as f64 / total_frames as f64
        },
        theoretical_pct: theoretical_error_rate(snr_db),
    })
}

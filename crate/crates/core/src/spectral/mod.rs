//! Frequency-domain kernels and the eight-tone DTMF bank.

mod goertzel;
mod subband;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

pub use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keypad::{hz_to_radians, SignalBuffer, BANK_FREQS_HZ};

pub use goertzel::{goertzel, goertzel_generalized_power, goertzel_power, nearest_bin, GoertzelPower};
pub use subband::{
    ndft_point, sbndft_power, sbndft_uncompensated_power, subband_decompose, subband_reconstruct,
    SubbandPair,
};

/// Spectral backend used to measure the eight bank energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Direct DTFT sum at the exact tone frequencies.
    Dtft,
    /// Goertzel filter at the nearest bin of an `N`-point DFT.
    Goertzel,
    /// Low-subband NDFT with high-band compensation.
    Sbndft,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Dtft, Backend::Goertzel, Backend::Sbndft];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Dtft => "dtft",
            Backend::Goertzel => "goertzel",
            Backend::Sbndft => "sbndft",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dtft" => Ok(Backend::Dtft),
            "goertzel" => Ok(Backend::Goertzel),
            "sbndft" => Ok(Backend::Sbndft),
            other => Err(format!("unknown backend {other:?} (expected dtft, goertzel or sbndft)")),
        }
    }
}

/// Which transform produced a [`SpectrumEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Dft,
    Bank(Backend),
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Dft => f.write_str("dft"),
            Transform::Bank(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumValues {
    Complex(Vec<Complex64>),
    Power(Vec<f64>),
}

/// Spectrum values at a list of angular frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    /// Angular frequencies in rad/sample.
    pub freqs: Vec<f64>,
    pub values: SpectrumValues,
    pub source: Transform,
    /// Transform length `N` the estimate was computed with.
    pub n_dft: usize,
    /// Sample rate of the analysed signal, for Hz conversion.
    pub fs: f64,
}

impl SpectrumEstimate {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn powers(&self) -> Vec<f64> {
        match &self.values {
            SpectrumValues::Complex(v) => v.iter().map(|c| c.norm_sqr()).collect(),
            SpectrumValues::Power(p) => p.clone(),
        }
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        match &self.values {
            SpectrumValues::Complex(v) => v.iter().map(|c| c.norm()).collect(),
            SpectrumValues::Power(p) => p.iter().map(|v| v.sqrt()).collect(),
        }
    }

    pub fn freq_hz(&self, i: usize) -> f64 {
        self.freqs[i] * self.fs / (2.0 * PI)
    }
}

/// `sum_{n} x[n] e^{-jwn}` over the finite support of `x`.
pub fn dtft_at(x: &[f64], w: f64) -> Complex64 {
    x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (n, &v)| {
        let (s, c) = (w * n as f64).sin_cos();
        acc + Complex64::new(v * c, -v * s)
    })
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroLength)
    } else {
        Ok(())
    }
}

/// `N`-point DFT by direct summation. `x` is zero-padded or truncated to `N`.
pub fn dft_direct(x: &[f64], n: usize) -> Result<Vec<Complex64>> {
    check_n(n)?;
    let twiddle: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n as f64))
        .collect();
    let used = &x[..x.len().min(n)];
    Ok((0..n)
        .map(|k| {
            let mut idx = 0usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for &v in used {
                acc += twiddle[idx] * v;
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect())
}

fn dft_fast(x: &[f64], n: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x
        .iter()
        .take(n)
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    buf.resize(n, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf
}

/// Uniformly sampled spectrum `X[k]` at `w_k = 2πk/N`, `k = 0..N`.
///
/// Samples past `N` are ignored; shorter input is zero-padded. Power-of-two
/// lengths take an FFT path, everything else is summed directly.
pub fn dft_uniform(x: &SignalBuffer, n: usize) -> Result<SpectrumEstimate> {
    check_n(n)?;
    let values = if n.is_power_of_two() && n >= 64 {
        dft_fast(&x.samples, n)
    } else {
        dft_direct(&x.samples, n)?
    };
    Ok(SpectrumEstimate {
        freqs: (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect(),
        values: SpectrumValues::Complex(values),
        source: Transform::Dft,
        n_dft: n,
        fs: x.fs,
    })
}

/// Indices of the `count` largest local maxima of `values` within `range`,
/// strongest first.
pub fn dominant_peaks(values: &[f64], range: std::ops::Range<usize>, count: usize) -> Vec<usize> {
    let end = range.end.min(values.len());
    let mut peaks: Vec<usize> = (range.start..end)
        .filter(|&k| {
            let left = k.checked_sub(1).map_or(f64::NEG_INFINITY, |j| values[j]);
            let right = values.get(k + 1).copied().unwrap_or(f64::NEG_INFINITY);
            values[k] >= left && values[k] > right
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    peaks.truncate(count);
    peaks
}

/// The two strongest positive-frequency peaks of the `N`-point DFT of `x`,
/// in increasing bin order. Fewer are returned when the spectrum has fewer.
pub fn dual_tone_peaks(x: &SignalBuffer, n: usize) -> Result<Vec<usize>> {
    let powers = dft_uniform(x, n)?.powers();
    let mut peaks = dominant_peaks(&powers, 1..n / 2 + 1, 2);
    peaks.sort_unstable();
    Ok(peaks)
}

/// Power at one bank frequency `w`, using at most `n` samples of `x`.
pub fn bank_power(x: &[f64], w: f64, backend: Backend, n: usize) -> Result<f64> {
    check_n(n)?;
    let used = &x[..x.len().min(n)];
    match backend {
        Backend::Dtft => Ok(dtft_at(used, w).norm_sqr()),
        Backend::Goertzel => Ok(goertzel_power(x, w, n)?.power),
        Backend::Sbndft => sbndft_power(&used[..used.len() & !1], w),
    }
}

/// Squared-magnitude estimates at the eight DTMF frequencies (rows first).
pub fn dtmf_bank(x: &SignalBuffer, backend: Backend, n: usize) -> Result<SpectrumEstimate> {
    if x.is_empty() {
        return Err(Error::ZeroLength);
    }
    let top = BANK_FREQS_HZ[7];
    if x.fs <= 2.0 * top {
        return Err(Error::Aliasing {
            fs: x.fs,
            freq: top,
            nyquist: 2.0 * top,
        });
    }
    let freqs: Vec<f64> = BANK_FREQS_HZ.iter().map(|&f| hz_to_radians(f, x.fs)).collect();
    let powers = freqs
        .iter()
        .map(|&w| bank_power(&x.samples, w, backend, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumEstimate {
        freqs,
        values: SpectrumValues::Power(powers),
        source: Transform::Bank(backend),
        n_dft: n,
        fs: x.fs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keypad::{synthesize_digit, Symbol};

    const FS: f64 = 8192.0;

    #[test]
    fn impulse_is_flat() {
        let mut x = vec![0.0; 32];
        x[0] = 1.0;
        for w in [0.0, 0.3, 1.7, PI] {
            assert_eq!(dtft_at(&x, w), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn on_tone_dtft() {
        let x = synthesize_digit(Symbol::Two, 1000, FS).unwrap();
        let on = dtft_at(&x.samples, 2.0 * PI * 697.0 / FS).norm();
        let off = dtft_at(&x.samples, 0.8).norm();
        assert!((on - 500.0).abs() < 15.0, "{on}");
        assert!(on >= 50.0 * off, "{on} {off}");
    }

    #[test]
    fn dtft_is_linear() {
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).cos()).collect();
        let y: Vec<f64> = (0..50).map(|i| ((i * i) % 7) as f64).collect();
        let (a, b) = (1.5, -0.25);
        let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let w = 0.91;
        let lhs = dtft_at(&mix, w);
        let rhs = dtft_at(&x, w) * a + dtft_at(&y, w) * b;
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn dc_constant() {
        for n in [7, 64, 100] {
            let x = SignalBuffer::new(vec![1.0; n], FS).unwrap();
            let est = dft_uniform(&x, n).unwrap();
            let p = est.magnitudes();
            assert!((p[0] - n as f64).abs() < 1e-9);
            assert!(p[1..].iter().all(|v| v.abs() < 1e-9), "n = {n}");
        }
    }

    #[test]
    fn zero_length_dft() {
        let x = SignalBuffer::new(vec![1.0; 4], FS).unwrap();
        assert!(matches!(dft_uniform(&x, 0), Err(Error::ZeroLength)));
    }

    #[test]
    fn fast_path_matches_direct() {
        let x: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.011).sin() * ((i % 13) as f64)).collect();
        let fast = dft_fast(&x, 1024);
        let direct = dft_direct(&x, 1024).unwrap();
        for (a, b) in fast.iter().zip(&direct) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn truncates_long_input() {
        let x = SignalBuffer::new((0..20).map(|i| i as f64).collect(), FS).unwrap();
        let est = dft_uniform(&x, 10).unwrap();
        let head = SignalBuffer::new((0..10).map(|i| i as f64).collect(), FS).unwrap();
        assert_eq!(est.values, dft_uniform(&head, 10).unwrap().values);
    }

    #[test]
    fn peaks_are_local_maxima() {
        let v = [0.0, 5.0, 4.0, 4.5, 9.0, 8.0, 1.0];
        assert_eq!(dominant_peaks(&v, 0..7, 2), vec![4, 1]);
        assert_eq!(dominant_peaks(&v, 2..4, 5), Vec::<usize>::new());
        assert_eq!(dominant_peaks(&v, 3..6, 5), vec![4]);
    }

    #[test]
    fn bank_picks_digit_nine() {
        let x = synthesize_digit(Symbol::Nine, 1000, FS).unwrap();
        for backend in Backend::ALL {
            let p = dtmf_bank(&x, backend, 2048).unwrap().powers();
            let mut idx: Vec<usize> = (0..8).collect();
            idx.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
            let mut top = [BANK_FREQS_HZ[idx[0]], BANK_FREQS_HZ[idx[1]]];
            top.sort_by(f64::total_cmp);
            assert_eq!(top, [852.0, 1477.0], "{backend}");
        }
    }

    #[test]
    fn bank_on_silence() {
        let x = SignalBuffer::zeros(512, FS).unwrap();
        for backend in Backend::ALL {
            assert!(dtmf_bank(&x, backend, 512).unwrap().powers().iter().all(|&v| v == 0.0));
        }
        let empty = SignalBuffer::zeros(0, FS).unwrap();
        assert!(dtmf_bank(&empty, Backend::Dtft, 512).is_err());
        let low_rate = SignalBuffer::zeros(10, 3000.0).unwrap();
        assert!(dtmf_bank(&low_rate, Backend::Dtft, 16).is_err());
    }

    #[test]
    fn backend_names_round_trip() {
        for b in Backend::ALL {
            assert_eq!(b.name().parse::<Backend>().unwrap(), b);
        }
        assert!("fft".parse::<Backend>().is_err());
    }
}

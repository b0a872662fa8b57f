//! Two-band split of a sequence and the subband NDFT built on it.
//!
//! A length-`N` sequence splits into half-length sums and differences,
//!
//! ```text
//! g_low[n]  = (x[2n] + x[2n+1]) / 2
//! g_high[n] = (x[2n] - x[2n+1]) / 2
//! ```
//!
//! so that `X(z) = (1 + z^-1) G_low(z^2) + (1 - z^-1) G_high(z^2)`. For signals
//! whose energy sits below `fs/4` the high term is dropped, and the magnitude
//! lost with it is restored by the factor `2 / (1 + cos w)`, which is exact for
//! a complex exponential evaluated at its own frequency.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::goertzel::goertzel_generalized_power;
use crate::error::{Error, Result};
use crate::keypad::SignalBuffer;

/// Low and high half-rate subsequences; each runs at half the input rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandPair {
    pub low: SignalBuffer,
    pub high: SignalBuffer,
}

fn split_low(x: &[f64]) -> Vec<f64> {
    x.chunks_exact(2).map(|p| (p[0] + p[1]) / 2.0).collect()
}

fn split_high(x: &[f64]) -> Vec<f64> {
    x.chunks_exact(2).map(|p| (p[0] - p[1]) / 2.0).collect()
}

pub fn subband_decompose(x: &SignalBuffer) -> Result<SubbandPair> {
    if !x.len().is_multiple_of(2) {
        return Err(Error::OddLength(x.len()));
    }
    Ok(SubbandPair {
        low: SignalBuffer::new(split_low(&x.samples), x.fs / 2.0)?,
        high: SignalBuffer::new(split_high(&x.samples), x.fs / 2.0)?,
    })
}

/// Inverse of [`subband_decompose`]: `x[2n] = lo + hi`, `x[2n+1] = lo - hi`.
pub fn subband_reconstruct(pair: &SubbandPair) -> Result<SignalBuffer> {
    let (lo, hi) = (&pair.low.samples, &pair.high.samples);
    if lo.len() != hi.len() {
        return Err(Error::LengthMismatch {
            left: lo.len(),
            right: hi.len(),
        });
    }
    let samples = lo
        .iter()
        .zip(hi)
        .flat_map(|(&l, &h)| [l + h, l - h])
        .collect();
    SignalBuffer::new(samples, pair.low.fs * 2.0)
}

/// `sum x[n] z^-n`, evaluated by Horner's rule in `z^-1`.
pub fn ndft_point(x: &[f64], z: Complex64) -> Result<Complex64> {
    match x.len() {
        0 => Ok(Complex64::new(0.0, 0.0)),
        1 => Ok(Complex64::new(x[0], 0.0)),
        _ if z == Complex64::new(0.0, 0.0) => Err(Error::SingularPoint),
        _ => {
            let z_inv = z.inv();
            Ok(x
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &v| acc * z_inv + v))
        }
    }
}

fn check_subband_args(x: &[f64], w: f64) -> Result<()> {
    if !x.len().is_multiple_of(2) {
        return Err(Error::OddLength(x.len()));
    }
    if w == PI {
        return Err(Error::CompensationSingularity);
    }
    if !(0.0..PI).contains(&w) {
        return Err(Error::FrequencyOutOfRange(w));
    }
    Ok(())
}

/// `|G_low(e^{j2w})|^2`, via the generalized Goertzel recursion over `N/2`
/// samples.
fn lowband_power(x: &[f64], w: f64) -> f64 {
    goertzel_generalized_power(&split_low(x), 2.0 * w)
}

/// Squared magnitude of the low-band-only approximation
/// `X^(e^{jw}) = (1 + e^{-jw}) G_low(e^{j2w})`, without compensation.
///
/// Equals `|X(e^{jw})|^2` exactly whenever the high subband is identically zero.
pub fn sbndft_uncompensated_power(x: &[f64], w: f64) -> Result<f64> {
    check_subband_args(x, w)?;
    Ok(2.0 * (1.0 + w.cos()) * lowband_power(x, w))
}

/// Compensated subband estimate of `|X(e^{jw})|^2`:
/// `8 |G_low(e^{j2w})|^2 / (1 + cos w)`.
///
/// Intended for `w < π/2`; the recursion runs over half as many samples as a
/// full-length Goertzel filter.
pub fn sbndft_power(x: &[f64], w: f64) -> Result<f64> {
    check_subband_args(x, w)?;
    Ok(8.0 * lowband_power(x, w) / (1.0 + w.cos()))
}

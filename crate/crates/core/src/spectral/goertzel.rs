//! Goertzel filter: a two-pole resonator that yields a single DFT bin.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Runs `s[n] = x[n] + coeff * s[n-1] - s[n-2]` over `n` samples of `x`,
/// zero-padding or truncating to length `n`. Returns `(s[n-1], s[n-2])`.
fn resonate(x: &[f64], n: usize, coeff: f64) -> (f64, f64) {
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for &v in x.iter().take(n) {
        let s = v + coeff * s1 - s2;
        s2 = s1;
        s1 = s;
    }
    // Zero-padded tail: input is zero, only the recursion runs.
    for _ in x.len().min(n)..n {
        let s = coeff * s1 - s2;
        s2 = s1;
        s1 = s;
    }
    (s1, s2)
}

/// Bin `k` of the `n`-point DFT of `x`, computed by the Goertzel recursion.
///
/// `x` is zero-padded or truncated to `n` samples. After the recursion a single
/// direct step `s[n-1] e^{j2πk/n} - s[n-2]` produces the filter output at time
/// `n`, which equals `sum x[r] e^{-j2πkr/n}` exactly (no extra phase factor).
pub fn goertzel(x: &[f64], k: usize, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::ZeroLength);
    }
    if k >= n {
        return Err(Error::BinOutOfRange { k, n });
    }
    let theta = 2.0 * PI * k as f64 / n as f64;
    let (s1, s2) = resonate(x, n, 2.0 * theta.cos());
    Ok(Complex64::from_polar(1.0, theta) * s1 - s2)
}

/// Squared magnitude of the Goertzel output at an arbitrary angular frequency
/// `theta`, over all of `x`.
///
/// For `theta = 2πk/len` this is `|X[k]|^2`; for other values it is the squared
/// magnitude of the z-transform of `x` at `e^{j theta}`.
pub fn goertzel_generalized_power(x: &[f64], theta: f64) -> f64 {
    let c = theta.cos();
    let (s1, s2) = resonate(x, x.len(), 2.0 * c);
    (s1 * s1 + s2 * s2 - 2.0 * c * s1 * s2).max(0.0)
}

/// Result of [`goertzel_power`]: the power and the bin it was measured at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoertzelPower {
    pub power: f64,
    pub bin: usize,
    /// Angular frequency of `bin`, `2π bin / n`.
    pub omega: f64,
}

/// Nearest DFT bin to `w` for an `n`-point transform, ties rounding up.
pub fn nearest_bin(w: f64, n: usize) -> usize {
    let k = (w * n as f64 / (2.0 * PI) + 0.5).floor() as usize;
    k % n.max(1)
}

/// `|X[k]|^2` at the bin nearest to `w`.
pub fn goertzel_power(x: &[f64], w: f64, n: usize) -> Result<GoertzelPower> {
    if !(0.0..=PI).contains(&w) {
        return Err(Error::FrequencyOutOfRange(w));
    }
    if n == 0 {
        return Err(Error::ZeroLength);
    }
    let bin = nearest_bin(w, n);
    let power = goertzel(x, bin, n)?.norm_sqr();
    Ok(GoertzelPower {
        power,
        bin,
        omega: 2.0 * PI * bin as f64 / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_on_bin() {
        let n = 64;
        let k = 5;
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * (k * i) as f64 / n as f64).cos())
            .collect();
        let y = goertzel(&x, k, n).unwrap();
        assert!((y.norm() - n as f64 / 2.0).abs() < 1e-9);
        // the cosine bin is real and positive
        assert!((y.re - 32.0).abs() < 1e-9 && y.im.abs() < 1e-9);
    }

    #[test]
    fn zeros_give_zero() {
        let y = goertzel(&[0.0; 16], 3, 16).unwrap();
        assert_eq!(y, Complex64::new(0.0, 0.0));
        assert_eq!(goertzel_power(&[0.0; 16], 1.0, 16).unwrap().power, 0.0);
    }

    #[test]
    fn bin_range() {
        assert!(matches!(goertzel(&[1.0], 4, 4), Err(Error::BinOutOfRange { k: 4, n: 4 })));
        assert!(matches!(goertzel(&[1.0], 0, 0), Err(Error::ZeroLength)));
        assert!(goertzel_power(&[1.0], 3.5, 8).is_err());
        assert!(goertzel_power(&[1.0], -0.1, 8).is_err());
    }

    #[test]
    fn nearest_bin_rounding() {
        assert_eq!(nearest_bin(0.5346, 2048), 174);
        assert_eq!(nearest_bin(2.0 * PI * 697.0 / 8192.0, 2048), 174);
        // exact half rounds up
        assert_eq!(nearest_bin(2.0 * PI * 2.5 / 8.0, 8), 3);
        assert_eq!(nearest_bin(PI, 1), 0);
    }

    #[test]
    fn power_is_homogeneous() {
        let x: Vec<f64> = (0..300).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let scaled: Vec<f64> = x.iter().map(|v| v * 3.5).collect();
        let a = goertzel_power(&x, 0.9, 512).unwrap().power;
        let b = goertzel_power(&scaled, 0.9, 512).unwrap().power;
        assert!((b - 12.25 * a).abs() <= 1e-9 * b);
    }

    #[test]
    fn generalized_matches_bin_power() {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin() + 0.2).collect();
        let k = 6;
        let theta = 2.0 * PI * k as f64 / 40.0;
        let a = goertzel_generalized_power(&x, theta);
        let b = goertzel(&x, k, 40).unwrap().norm_sqr();
        assert!((a - b).abs() <= 1e-9 * b);
    }
}

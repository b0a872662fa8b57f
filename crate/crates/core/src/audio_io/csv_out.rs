use std::path::Path;

use serde::Serialize;

use crate::decoder::DecodeReport;
use crate::error::Result;
use crate::keypad::{SignalBuffer, Symbol, BANK_FREQS_HZ};
use crate::spectral::SpectrumEstimate;

pub const SPECTRUM_HEADER: [&str; 5] = ["k", "omega_rad", "freq_hz", "magnitude", "magnitude_normalized"];

pub const SWEEP_HEADER: [&str; 6] = [
    "snr_db",
    "digit",
    "trials",
    "errors",
    "measured_pct",
    "theoretical_pct",
];

/// Formats `v` with 9 significant digits, fixed-point for moderate magnitudes
/// and scientific otherwise. Output does not depend on locale.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.8e}")
    }
}

/// Writes a header and pre-formatted rows.
pub fn write_csv_rows<I, R>(path: impl AsRef<Path>, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per spectrum point; `magnitude_normalized` divides by the largest
/// magnitude (all zeros stay zero).
pub fn write_csv_spectrum(est: &SpectrumEstimate, path: impl AsRef<Path>) -> Result<()> {
    let mags = est.magnitudes();
    let peak = mags.iter().copied().fold(0.0, f64::max);
    let rows = mags.iter().enumerate().map(|(k, &m)| {
        vec![
            k.to_string(),
            format_float(est.freqs[k]),
            format_float(est.freq_hz(k)),
            format_float(m),
            format_float(if peak > 0.0 { m / peak } else { 0.0 }),
        ]
    });
    write_csv_rows(path, &SPECTRUM_HEADER, rows)
}

/// One point of an SNR sweep for one digit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub digit: Symbol,
    pub trials: u64,
    pub errors: u64,
    pub measured_pct: f64,
    pub theoretical_pct: f64,
}

pub fn write_csv_sweep(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let rows = rows.iter().map(|r| {
        vec![
            format_float(r.snr_db),
            r.digit.to_string(),
            r.trials.to_string(),
            r.errors.to_string(),
            format_float(r.measured_pct),
            format_float(r.theoretical_pct),
        ]
    });
    write_csv_rows(path, &SWEEP_HEADER, rows)
}

/// Per-frame decode diagnostics: bounds, symbol, winners, confidence and the
/// eight bank energies.
pub fn write_csv_report(report: &DecodeReport, path: impl AsRef<Path>) -> Result<()> {
    let mut header: Vec<String> = ["frame", "start", "length", "symbol", "row_hz", "col_hz", "confidence"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(BANK_FREQS_HZ.iter().map(|f| format!("e{f}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();

    let rows = report.frames.iter().enumerate().map(|(i, f)| {
        let mut row = vec![i.to_string(), f.start.to_string(), f.len.to_string()];
        match &f.class {
            Some(c) => {
                row.push(c.symbol.map_or_else(|| "-".to_string(), |s| s.to_string()));
                row.push(format_float(c.row_hz));
                row.push(format_float(c.col_hz));
                row.push(format_float(c.confidence));
                row.extend(c.energies.iter().map(|&e| format_float(e)));
            }
            None => row.extend(std::iter::repeat_n(String::new(), 12)),
        }
        row
    });
    write_csv_rows(path, &header, rows)
}

/// Time-domain dump: `n, sample`.
pub fn write_csv_samples(x: &SignalBuffer, path: impl AsRef<Path>) -> Result<()> {
    let rows = x
        .samples
        .iter()
        .enumerate()
        .map(|(n, &v)| vec![n.to_string(), format_float(v)]);
    write_csv_rows(path, &["n", "sample"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keypad::synthesize_digit;
    use crate::spectral::dft_uniform;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(79.4328234724), "79.4328235");
        assert_eq!(format_float(-0.000123456789123), "-0.000123456789");
        assert_eq!(format_float(1e20), "1.00000000e20");
        assert_eq!(format_float(2.5e-7), "2.50000000e-7");
        assert_eq!(format_float(f64::INFINITY), "inf");
        let v: f64 = 0.123456789012;
        let back: f64 = format_float(v).parse().unwrap();
        assert!((back - v).abs() <= 1e-9 * v.abs());
    }

    #[test]
    fn spectrum_file_has_n_plus_one_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let x = synthesize_digit(crate::Symbol::Two, 1000, 8192.0).unwrap();
        let est = dft_uniform(&x, 2048).unwrap();
        write_csv_spectrum(&est, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2049);
        assert_eq!(text.lines().next().unwrap(), "k,omega_rad,freq_hz,magnitude,magnitude_normalized");
        let again = dir.path().join("t.csv");
        write_csv_spectrum(&est, &again).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn sweep_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.csv");
        let rows = [SweepRow {
            snr_db: 1.0,
            digit: Symbol::Zero,
            trials: 10,
            errors: 0,
            measured_pct: 0.0,
            theoretical_pct: 79.43282347242815,
        }];
        write_csv_sweep(&rows, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "snr_db,digit,trials,errors,measured_pct,theoretical_pct\n1,0,10,0,0,79.4328235\n"
        );
    }
}

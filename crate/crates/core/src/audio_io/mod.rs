//! File interchange: 16-bit PCM mono WAV and the CSV artifacts.
//!
//! WAV samples are scaled by `32767 / 2` so that the analytic peak of a
//! two-tone digit maps to full scale. CSV floats carry 9 significant digits.

mod csv_out;
mod wav;

pub use csv_out::{
    format_float, write_csv_report, write_csv_rows, write_csv_samples, write_csv_spectrum,
    write_csv_sweep, SweepRow, SPECTRUM_HEADER, SWEEP_HEADER,
};
pub use wav::{dequantize, quantize, read_wav, write_wav, WavSpec, WavStats};

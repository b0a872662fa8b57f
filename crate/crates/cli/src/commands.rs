use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use touchtone::audio_io::{
    format_float, read_wav, write_csv_report, write_csv_rows, write_csv_samples, write_csv_spectrum,
    write_csv_sweep, write_wav, SweepRow, WavSpec,
};
use touchtone::channel::{add_awgn, NoiseSpec};
use touchtone::decoder::{
    decode_with, digit_error_rate, segment, Classifier, ColumnSet, ErrorRateTrial, FrameClass,
    FrameRecord,
};
use touchtone::keypad::{synthesize_digit, synthesize_sequence, symbols_to_string, Symbol};
use touchtone::spectral::{dft_uniform, dtmf_bank, dual_tone_peaks, Backend};
use touchtone::SignalBuffer;

use crate::args::{digits, parse_snr_range, CommonArgs, Preset, TimingArgs};
use crate::manifest::{create_out_dir, write_manifest, RunConfig};

/// Everything a subcommand needs besides its own arguments.
pub struct Run {
    pub argv: Vec<String>,
}

fn base_config(name: &str, common: &CommonArgs) -> RunConfig {
    RunConfig {
        subcommand: name.to_string(),
        fs: common.fs,
        seed: common.seed,
        out_dir: common.out_dir.clone(),
        ..RunConfig::default()
    }
}

fn finish(run: &Run, config: &RunConfig, artifacts: &[String]) -> Result<()> {
    let path = write_manifest(config, &run.argv, artifacts)?;
    eprintln!("manifest: {}", path.display());
    Ok(())
}

fn with_noise(x: SignalBuffer, snr: Option<f64>, common: &CommonArgs) -> Result<SignalBuffer> {
    match snr {
        None => Ok(x),
        Some(snr) => {
            let seed = common.require_seed("--snr adds noise")?;
            add_awgn(&x, &NoiseSpec::new(snr, seed)).context("adding noise")
        }
    }
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    /// Dial string; '-' and spaces are ignored.
    #[arg(long)]
    pub digits: String,
    #[command(flatten)]
    pub timing: TimingArgs,
    /// Add white Gaussian noise at this SNR (dB).
    #[arg(long)]
    pub snr: Option<f64>,
    /// Also dump the samples as CSV.
    #[arg(long)]
    pub csv: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn encode(run: &Run, a: &EncodeArgs) -> Result<()> {
    let symbols = digits(&a.digits)?;
    let (timing, record) = a.timing.resolve(symbols.len(), &a.common)?;
    let clean = synthesize_sequence(&symbols, &timing, a.common.fs)?;
    let x = with_noise(clean, a.snr, &a.common)?;

    create_out_dir(&a.common.out_dir)?;
    let mut artifacts = vec!["signal.wav".to_string()];
    let stats = write_wav(&x, a.common.out_dir.join("signal.wav"), WavSpec::for_buffer(&x))?;
    if stats.clipped > 0 {
        eprintln!("warning: {} of {} samples clipped", stats.clipped, stats.samples);
    }
    if a.csv {
        write_csv_samples(&x, a.common.out_dir.join("samples.csv"))?;
        artifacts.push("samples.csv".into());
    }
    eprintln!("encoded {} digits into {} samples", symbols.len(), x.len());

    let config = RunConfig {
        digits: Some(symbols_to_string(&symbols)),
        timing: Some(record),
        snr_db: a.snr,
        ..base_config("encode", &a.common)
    };
    finish(run, &config, &artifacts)
}

#[derive(Args, Debug)]
pub struct DecoderArgs {
    #[arg(long, default_value = "goertzel")]
    pub backend: Backend,
    /// Transform length: at most this many samples of each frame are analysed.
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    /// Segmentation settings.
    #[arg(long, value_enum, default_value_t = Preset::Auto)]
    pub preset: Preset,
    /// Also recognise the A-D column.
    #[arg(long)]
    pub extended: bool,
}

impl DecoderArgs {
    fn classifier(&self, n: usize) -> Classifier {
        let columns = if self.extended { ColumnSet::Extended } else { ColumnSet::Standard };
        Classifier::new(self.backend, n).with_columns(columns)
    }
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// 16-bit mono WAV file to decode.
    #[arg(long, required_unless_present = "digits", conflicts_with = "digits")]
    pub input: Option<PathBuf>,
    /// Synthesize this dial string instead of reading a file.
    #[arg(long)]
    pub digits: Option<String>,
    #[command(flatten)]
    pub timing: TimingArgs,
    /// Add white Gaussian noise at this SNR (dB) before decoding.
    #[arg(long)]
    pub snr: Option<f64>,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn decode(run: &Run, a: &DecodeArgs) -> Result<()> {
    let mut config = base_config("decode", &a.common);
    let clean = match (&a.input, &a.digits) {
        (Some(path), _) => {
            config.input = Some(path.clone());
            read_wav(path).with_context(|| format!("reading {}", path.display()))?
        }
        (None, Some(d)) => {
            let symbols = digits(d)?;
            let (timing, record) = a.timing.resolve(symbols.len(), &a.common)?;
            config.digits = Some(symbols_to_string(&symbols));
            config.timing = Some(record);
            synthesize_sequence(&symbols, &timing, a.common.fs)?
        }
        (None, None) => bail!("either --input or --digits is required"),
    };
    config.fs = clean.fs;
    let x = with_noise(clean, a.snr, &a.common)?;

    let seg = a.decoder.preset.config(x.fs, a.snr.is_some());
    let classifier = a.decoder.classifier(a.decoder.n);
    let report = decode_with(&x, &seg, &classifier)?;
    warn_unclassified(&report.frames);

    create_out_dir(&a.common.out_dir)?;
    write_csv_report(&report, a.common.out_dir.join("report.csv"))?;
    println!("{}", report.digits);

    config.snr_db = a.snr;
    config.n_dft = Some(a.decoder.n);
    config.backend = Some(a.decoder.backend.to_string());
    config.segmentation = Some(seg);
    config.columns = Some(classifier.columns);
    finish(run, &config, &["report.csv".into()])
}

fn warn_unclassified(frames: &[FrameRecord]) {
    for (i, f) in frames.iter().enumerate() {
        match &f.class {
            None => eprintln!("frame {i}: {} samples, too short to classify", f.len),
            Some(FrameClass { symbol: None, confidence, .. }) => {
                eprintln!("frame {i}: no tone pair found (confidence {confidence:.3})")
            }
            Some(_) => {}
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    /// Uniform N-point DFT.
    Dft,
    Dtft,
    Goertzel,
    Sbndft,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Keypad symbol to analyse.
    #[arg(long)]
    pub digit: char,
    /// Tone length in samples.
    #[arg(long, default_value_t = 1000)]
    pub mark: usize,
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = SpectrumKind::Dft)]
    pub backend: SpectrumKind,
    #[arg(long)]
    pub snr: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn spectrum(run: &Run, a: &SpectrumArgs) -> Result<()> {
    let symbol = Symbol::from_char(a.digit)?;
    ensure!(a.mark > 0, "digit length must be positive");
    ensure!(a.n > 0, "--n must be positive");
    let x = with_noise(synthesize_digit(symbol, a.mark, a.common.fs)?, a.snr, &a.common)?;

    let est = match a.backend {
        SpectrumKind::Dft => dft_uniform(&x, a.n)?,
        SpectrumKind::Dtft => dtmf_bank(&x, Backend::Dtft, a.n)?,
        SpectrumKind::Goertzel => dtmf_bank(&x, Backend::Goertzel, a.n)?,
        SpectrumKind::Sbndft => dtmf_bank(&x, Backend::Sbndft, a.n)?,
    };
    create_out_dir(&a.common.out_dir)?;
    write_csv_spectrum(&est, a.common.out_dir.join("spectrum.csv"))?;
    write_csv_samples(&x, a.common.out_dir.join("samples.csv"))?;

    if a.backend == SpectrumKind::Dft {
        for k in dual_tone_peaks(&x, a.n)? {
            println!(
                "peak k={k} omega={} hz={}",
                format_float(est.freqs[k]),
                format_float(est.freq_hz(k))
            );
        }
    } else {
        let p = est.powers();
        let row = (0..4).max_by(|&i, &j| p[i].total_cmp(&p[j])).unwrap_or(0);
        let col = (4..8).max_by(|&i, &j| p[i].total_cmp(&p[j])).unwrap_or(4);
        for i in [row, col] {
            println!("peak omega={} hz={}", format_float(est.freqs[i]), format_float(est.freq_hz(i)));
        }
    }

    let config = RunConfig {
        digits: Some(symbol.to_string()),
        snr_db: a.snr,
        n_dft: Some(a.n),
        backend: Some(format!("{:?}", a.backend).to_lowercase()),
        ..base_config("spectrum", &a.common)
    };
    finish(run, &config, &["spectrum.csv".into(), "samples.csv".into()])
}

#[derive(Args, Debug)]
pub struct SweepSnrArgs {
    #[arg(long, default_value = "02589")]
    pub digits: String,
    /// `start:stop[:step]`, a comma list, or one value (dB).
    #[arg(long, default_value = "1:5")]
    pub snr_range: String,
    /// Noisy renditions per SNR point.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value = "goertzel")]
    pub backend: Backend,
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    #[command(flatten)]
    pub timing: TimingArgs,
    /// Run trials on one thread. Results are identical either way.
    #[arg(long)]
    pub serial: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn sweep_snr(run: &Run, a: &SweepSnrArgs) -> Result<()> {
    ensure!(a.trials > 0, "--trials must be at least 1");
    let seed = a.common.require_seed("sweeping over noise")?;
    let symbols = digits(&a.digits)?;
    ensure!(!symbols.is_empty(), "--digits is empty");
    let snrs = parse_snr_range(&a.snr_range)?;
    let (timing, record) = a.timing.resolve(symbols.len(), &a.common)?;
    let setup = ErrorRateTrial {
        symbols: &symbols,
        timing: &timing,
        fs: a.common.fs,
        classifier: Classifier::new(a.backend, a.n),
        master_seed: seed,
        parallel: !a.serial,
    };

    let mut rows = Vec::new();
    for &snr in &snrs {
        let report = digit_error_rate(a.trials, snr, &setup)?;
        eprintln!(
            "snr {} dB: measured {}%, theoretical {}%",
            format_float(snr),
            format_float(report.measured_pct),
            format_float(report.theoretical_pct)
        );
        rows.extend(report.per_symbol.iter().map(|e| SweepRow {
            snr_db: snr,
            digit: e.symbol,
            trials: e.trials,
            errors: e.errors,
            measured_pct: e.percent(),
            theoretical_pct: report.theoretical_pct,
        }));
    }
    create_out_dir(&a.common.out_dir)?;
    write_csv_sweep(&rows, a.common.out_dir.join("sweep.csv"))?;

    let config = RunConfig {
        digits: Some(symbols_to_string(&symbols)),
        timing: Some(record),
        snr_list: Some(snrs),
        trials: Some(a.trials),
        n_dft: Some(a.n),
        backend: Some(a.backend.to_string()),
        parallel: Some(!a.serial),
        ..base_config("sweep-snr", &a.common)
    };
    finish(run, &config, &["sweep.csv".into()])
}

#[derive(Args, Debug)]
pub struct SweepTimingArgs {
    #[arg(long, default_value = "49158")]
    pub digits: String,
    /// Jittered timing under test.
    #[command(flatten)]
    pub timing: TimingArgs,
    /// Mark length of the fixed-timing baseline.
    #[arg(long, default_value_t = 1000)]
    pub baseline_mark: usize,
    /// Space length of the fixed-timing baseline.
    #[arg(long, default_value_t = 100)]
    pub baseline_space: usize,
    #[arg(long)]
    pub snr: Option<f64>,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn class_cells(f: Option<&FrameRecord>) -> Vec<String> {
    match f {
        None => vec![String::new(); 5],
        Some(f) => {
            let mut cells = vec![f.start.to_string(), f.len.to_string()];
            match &f.class {
                Some(c) => cells.extend([
                    c.symbol.map_or_else(|| "-".into(), |s| s.to_string()),
                    format_float(c.row_hz),
                    format_float(c.col_hz),
                ]),
                None => cells.extend(["-".into(), String::new(), String::new()]),
            }
            cells
        }
    }
}

fn winners(f: Option<&FrameRecord>) -> Option<(f64, f64)> {
    f.and_then(|f| f.class.as_ref()).map(|c| (c.row_hz, c.col_hz))
}

pub fn sweep_timing(run: &Run, a: &SweepTimingArgs) -> Result<()> {
    let symbols = digits(&a.digits)?;
    let fs = a.common.fs;
    let baseline = TimingArgs {
        mark: a.baseline_mark,
        space: a.baseline_space,
        mark_list: None,
        space_list: None,
        mark_spread: None,
        space_spread: None,
        trailing_space: a.timing.trailing_space,
    };
    let (base_profile, base_record) = baseline.resolve(symbols.len(), &a.common)?;
    let (profile, record) = a.timing.resolve(symbols.len(), &a.common)?;

    let base_x = with_noise(synthesize_sequence(&symbols, &base_profile, fs)?, a.snr, &a.common)?;
    let x = with_noise(synthesize_sequence(&symbols, &profile, fs)?, a.snr, &a.common)?;
    let seg = a.decoder.preset.config(fs, a.snr.is_some());
    let classifier = a.decoder.classifier(a.decoder.n);
    let base = decode_with(&base_x, &seg, &classifier)?;
    let jit = decode_with(&x, &seg, &classifier)?;
    warn_unclassified(&jit.frames);

    let truth = symbols_to_string(&symbols);
    let frames = base.frames.len().max(jit.frames.len());
    let mut header = vec!["frame", "truth"];
    header.extend([
        "baseline_start",
        "baseline_length",
        "baseline_symbol",
        "baseline_row_hz",
        "baseline_col_hz",
    ]);
    header.extend(["start", "length", "symbol", "row_hz", "col_hz", "same_winners"]);
    let mut mismatches = 0;
    let rows: Vec<Vec<String>> = (0..frames)
        .map(|i| {
            let (b, j) = (base.frames.get(i), jit.frames.get(i));
            let same = winners(b).is_some() && winners(b) == winners(j);
            mismatches += usize::from(!same);
            let mut row = vec![i.to_string(), symbols.get(i).map_or_else(String::new, |s| s.to_string())];
            row.extend(class_cells(b));
            row.extend(class_cells(j));
            row.push(same.to_string());
            row
        })
        .collect();

    create_out_dir(&a.common.out_dir)?;
    write_csv_rows(a.common.out_dir.join("timing.csv"), &header, rows)?;
    write_wav(&x, a.common.out_dir.join("signal.wav"), WavSpec::for_buffer(&x))?;
    println!("truth    {truth}");
    println!("baseline {}", base.digits);
    println!("jittered {}", jit.digits);
    if mismatches > 0 || jit.digits != truth {
        eprintln!("warning: {mismatches} frame(s) differ from the baseline winners");
    }

    let config = RunConfig {
        digits: Some(truth),
        timing: Some(record),
        baseline_timing: Some(base_record),
        snr_db: a.snr,
        n_dft: Some(a.decoder.n),
        backend: Some(a.decoder.backend.to_string()),
        segmentation: Some(seg),
        columns: Some(classifier.columns),
        ..base_config("sweep-timing", &a.common)
    };
    finish(run, &config, &["timing.csv".into(), "signal.wav".into()])
}

#[derive(Args, Debug)]
pub struct SweepNfftArgs {
    #[arg(long, default_value = "49158")]
    pub digits: String,
    /// Transform lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1100,1300,1500,1700,2500,2800,1900")]
    pub n_list: Vec<usize>,
    #[command(flatten)]
    pub timing: TimingArgs,
    #[arg(long)]
    pub snr: Option<f64>,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn sweep_nfft(run: &Run, a: &SweepNfftArgs) -> Result<()> {
    ensure!(!a.n_list.is_empty(), "--n-list is empty");
    ensure!(a.n_list.iter().all(|&n| n > 0), "every N must be positive");
    let symbols = digits(&a.digits)?;
    let (profile, record) = a.timing.resolve(symbols.len(), &a.common)?;
    let x = with_noise(synthesize_sequence(&symbols, &profile, a.common.fs)?, a.snr, &a.common)?;
    let seg = a.decoder.preset.config(x.fs, a.snr.is_some());
    let bounds = segment(&x, &seg)?;

    let header = [
        "n", "frame", "start", "length", "symbol", "row_hz", "col_hz", "confidence", "peak_low_k",
        "peak_low_omega", "peak_high_k", "peak_high_omega",
    ];
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &n in &a.n_list {
        let classifier = a.decoder.classifier(n);
        let mut decoded = String::new();
        let mut no_tone = 0;
        for (i, &(start, len)) in bounds.iter().enumerate() {
            let frame = x.slice(start, len);
            let mut row = vec![n.to_string(), i.to_string(), start.to_string(), len.to_string()];
            match classifier.classify(&frame) {
                Ok(c) => {
                    match c.symbol {
                        Some(s) => decoded.push(s.to_char()),
                        None => no_tone += 1,
                    }
                    row.extend([
                        c.symbol.map_or_else(|| "-".into(), |s| s.to_string()),
                        format_float(c.row_hz),
                        format_float(c.col_hz),
                        format_float(c.confidence),
                    ]);
                }
                Err(touchtone::Error::FrameTooShort { .. }) => {
                    no_tone += 1;
                    row.extend(["-".into(), String::new(), String::new(), String::new()]);
                }
                Err(e) => return Err(e.into()),
            }
            let peaks = dual_tone_peaks(&frame, n)?;
            for slot in 0..2 {
                match peaks.get(slot) {
                    Some(&k) => {
                        row.push(k.to_string());
                        row.push(format_float(2.0 * PI * k as f64 / n as f64));
                    }
                    None => row.extend([String::new(), String::new()]),
                }
            }
            rows.push(row);
        }
        if no_tone > 0 {
            eprintln!("N={n}: {no_tone} frame(s) without a recognised tone pair");
        }
        println!("N={n} {decoded}");
        summary.push(vec![n.to_string(), decoded, bounds.len().to_string(), no_tone.to_string()]);
    }

    create_out_dir(&a.common.out_dir)?;
    write_csv_rows(a.common.out_dir.join("nfft.csv"), &header, rows)?;
    write_csv_rows(
        a.common.out_dir.join("nfft_summary.csv"),
        &["n", "decoded", "frames", "no_tone_frames"],
        summary,
    )?;

    let config = RunConfig {
        digits: Some(symbols_to_string(&symbols)),
        timing: Some(record),
        snr_db: a.snr,
        n_list: Some(a.n_list.clone()),
        backend: Some(a.decoder.backend.to_string()),
        segmentation: Some(seg),
        columns: Some(a.decoder.classifier(1).columns),
        ..base_config("sweep-nfft", &a.common)
    };
    finish(run, &config, &["nfft.csv".into(), "nfft_summary.csv".into()])
}

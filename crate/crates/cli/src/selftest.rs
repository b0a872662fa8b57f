use std::hint::black_box;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::Args;
use touchtone::audio_io::write_csv_rows;
use touchtone::channel::{add_awgn, measured_snr, trial_seed, NoiseSpec};
use touchtone::decoder::{decode_number, SegmentationConfig};
use touchtone::keypad::{hz_to_radians, parse_dial_string, synthesize_digit, synthesize_sequence, Symbol};
use touchtone::spectral::{
    dft_direct, goertzel, goertzel_power, ndft_point, sbndft_power, sbndft_uncompensated_power,
    subband_decompose, subband_reconstruct, Backend, Complex64,
};
use touchtone::{SignalBuffer, TimingProfile, DEFAULT_SAMPLE_RATE};

use crate::args::CommonArgs;
use crate::commands::Run;
use crate::manifest::{create_out_dir, write_manifest, RunConfig};

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Random buffers per oracle check.
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Uniform value in [-1, 1) derived from `(seed, i)`.
fn uniform(seed: u64, i: u64) -> f64 {
    (trial_seed(seed, i) >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

fn random_buffer(seed: u64, case: u64, len: usize) -> Vec<f64> {
    let s = trial_seed(seed, case);
    (0..len as u64).map(|i| uniform(s, i)).collect()
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn goertzel_vs_dft(seed: u64, cases: usize) -> Result<Check> {
    let mut worst = 0.0f64;
    for c in 0..cases as u64 {
        let n = 1 + (trial_seed(seed ^ 0x6f, c) % 64) as usize;
        let len = (trial_seed(seed ^ 0x1e, c) % 65) as usize;
        let x = random_buffer(seed, c, len);
        for (k, want) in dft_direct(&x, n)?.iter().enumerate() {
            worst = worst.max((goertzel(&x, k, n)? - want).norm() / n as f64);
        }
    }
    Ok(Check {
        name: "goertzel equals direct DFT",
        pass: worst <= 1e-9,
        detail: format!("max |error|/N = {worst:.3e}"),
    })
}

fn subband_identities(seed: u64, cases: usize) -> Result<Check> {
    let (mut recon, mut split, mut lowband) = (0.0f64, 0.0f64, 0.0f64);
    for c in 0..cases as u64 {
        let len = 2 * (1 + (trial_seed(seed ^ 0x5b, c) % 64) as usize);
        let x = random_buffer(seed, c, len);
        let buf = SignalBuffer::new(x.clone(), DEFAULT_SAMPLE_RATE)?;
        let pair = subband_decompose(&buf)?;
        let back = subband_reconstruct(&pair)?;
        for (a, b) in x.iter().zip(&back.samples) {
            recon = recon.max((a - b).abs());
        }
        let w = (uniform(seed ^ 0x77, c) + 1.0) * 1.5;
        let z = Complex64::from_polar(1.0, w);
        let lhs = ndft_point(&x, z)?;
        let rhs = (1.0 + z.inv()) * ndft_point(&pair.low.samples, z * z)?
            + (1.0 - z.inv()) * ndft_point(&pair.high.samples, z * z)?;
        split = split.max((lhs - rhs).norm());

        let doubled: Vec<f64> = pair.low.samples.iter().flat_map(|&v| [v, v]).collect();
        let exact = ndft_point(&doubled, z)?.norm_sqr();
        let approx = sbndft_uncompensated_power(&doubled, w)?;
        lowband = lowband.max((approx - exact).abs() / exact.max(1e-12));
    }
    let pass = recon <= 1e-15 && split <= 1e-9 && lowband <= 1e-9;
    Ok(Check {
        name: "subband identities",
        pass,
        detail: format!("reconstruction {recon:.1e}, split {split:.1e}, low-band {lowband:.1e}"),
    })
}

fn snr_calibration(seed: u64) -> Result<Check> {
    let x = synthesize_digit(Symbol::Five, 100_000, DEFAULT_SAMPLE_RATE)?;
    let (mut inside, mut total, mut worst) = (0, 0, 0.0f64);
    for snr in [1.0, 2.0, 3.0, 4.0, 5.0] {
        for s in 0..20 {
            let y = add_awgn(&x, &NoiseSpec::new(snr, trial_seed(seed, s)))?;
            let err = (measured_snr(&x, &y)? - snr).abs();
            worst = worst.max(err);
            inside += usize::from(err <= 0.1);
            total += 1;
        }
    }
    Ok(Check {
        name: "noise calibration",
        pass: inside * 100 >= total * 99,
        detail: format!("{inside}/{total} within 0.1 dB, worst {worst:.3} dB"),
    })
}

fn round_trip() -> Result<Check> {
    let s = parse_dial_string("2474481221")?;
    let x = synthesize_sequence(&s, &TimingProfile::fixed(1000, 100), DEFAULT_SAMPLE_RATE)?;
    let cfg = SegmentationConfig::experiment(DEFAULT_SAMPLE_RATE);
    let mut decoded = Vec::new();
    for backend in Backend::ALL {
        decoded.push(decode_number(&x, &cfg, backend, 2048)?.digits);
    }
    Ok(Check {
        name: "clean round trip",
        pass: decoded.iter().all(|d| d == "2474481221"),
        detail: decoded.join(" "),
    })
}

/// Mean time per eight-frequency bank evaluation, sbndft over goertzel.
fn time_ratio() -> Result<f64> {
    let x = synthesize_digit(Symbol::Nine, 1024, DEFAULT_SAMPLE_RATE)?;
    let ws: Vec<f64> = touchtone::keypad::BANK_FREQS_HZ
        .iter()
        .map(|&f| hz_to_radians(f, DEFAULT_SAMPLE_RATE))
        .collect();
    let reps = 2000;
    let t0 = Instant::now();
    for _ in 0..reps {
        for &w in &ws {
            black_box(goertzel_power(black_box(&x.samples), w, 1024)?);
        }
    }
    let goertzel_time = t0.elapsed();
    let t1 = Instant::now();
    for _ in 0..reps {
        for &w in &ws {
            black_box(sbndft_power(black_box(&x.samples), w)?);
        }
    }
    Ok(t1.elapsed().as_secs_f64() / goertzel_time.as_secs_f64())
}

pub fn selftest(run: &Run, a: &SelftestArgs) -> Result<()> {
    let seed = a.common.seed.unwrap_or(1);
    let checks = [
        goertzel_vs_dft(seed, a.cases)?,
        subband_identities(seed, a.cases)?,
        snr_calibration(seed)?,
        round_trip()?,
    ];
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("sbndft/goertzel time per op: {:.2}", time_ratio()?);

    create_out_dir(&a.common.out_dir)?;
    let rows = checks
        .iter()
        .map(|c| vec![c.name.to_string(), if c.pass { "pass" } else { "fail" }.to_string(), c.detail.clone()]);
    write_csv_rows(a.common.out_dir.join("selftest.csv"), &["check", "status", "detail"], rows)?;
    let config = RunConfig {
        seed: Some(seed),
        trials: Some(a.cases as u64),
        ..RunConfig {
            subcommand: "selftest".into(),
            fs: DEFAULT_SAMPLE_RATE,
            out_dir: a.common.out_dir.clone(),
            ..RunConfig::default()
        }
    };
    write_manifest(&config, &run.argv, &["selftest.csv".into()])?;

    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        bail!("{failed} self-test check(s) failed");
    }
    Ok(())
}

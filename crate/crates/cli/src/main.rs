//! `touchtone`: encode, decode and sweep DTMF experiments from the shell.
//!
//! Every subcommand writes its artifacts and a `manifest.json` with the
//! resolved configuration into `--out-dir`. Data goes to files and stdout,
//! diagnostics to stderr.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod args;
mod commands;
mod manifest;
mod selftest;

use commands::Run;

#[derive(Parser, Debug)]
#[command(name = "touchtone", version, about = "DTMF synthesis, channel and decoding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a dial string into a 16-bit WAV file.
    Encode(commands::EncodeArgs),
    /// Decode a WAV file (or a synthesized dial string) to digits.
    Decode(commands::DecodeArgs),
    /// Spectrum of a single digit tone.
    Spectrum(commands::SpectrumArgs),
    /// Monte Carlo misclassification rate over a range of SNRs.
    SweepSnr(commands::SweepSnrArgs),
    /// Compare jittered Mark/Space timing against a fixed baseline.
    SweepTiming(commands::SweepTimingArgs),
    /// Decode one signal at several transform lengths.
    SweepNfft(commands::SweepNfftArgs),
    /// Run the built-in oracle checks.
    Selftest(selftest::SelftestArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = Run {
        argv: std::env::args().skip(1).collect(),
    };
    let result = match &cli.command {
        Command::Encode(a) => commands::encode(&run, a),
        Command::Decode(a) => commands::decode(&run, a),
        Command::Spectrum(a) => commands::spectrum(&run, a),
        Command::SweepSnr(a) => commands::sweep_snr(&run, a),
        Command::SweepTiming(a) => commands::sweep_timing(&run, a),
        Command::SweepNfft(a) => commands::sweep_nfft(&run, a),
        Command::Selftest(a) => selftest::selftest(&run, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

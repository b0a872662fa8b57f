use std::path::Path;
use std::process::{Command, Output};

use touchtone::audio_io::{write_wav, WavSpec};
use touchtone::SignalBuffer;

fn touchtone(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_touchtone"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn decode_of_encode_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let enc = dir.path().join("enc");
    let o = touchtone(&["encode", "--digits", "247-448-1221"], &enc);
    assert!(o.status.success(), "{}", stderr(&o));
    let wav = enc.join("signal.wav");
    assert_eq!(std::fs::metadata(&wav).unwrap().len(), 44 + 2 * 10_900);
    assert!(enc.join("manifest.json").exists());

    for backend in ["dtft", "goertzel", "sbndft"] {
        let o = touchtone(
            &["decode", "--input", wav.to_str().unwrap(), "--backend", backend],
            &dir.path().join(backend),
        );
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(stdout(&o).trim(), "2474481221");
        let report = std::fs::read_to_string(dir.path().join(backend).join("report.csv")).unwrap();
        assert_eq!(report.lines().count(), 11);
    }
}

#[test]
fn empty_dial_string_and_silence_decode_to_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let o = touchtone(&["encode", "--digits", ""], &dir.path().join("empty"));
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::metadata(dir.path().join("empty/signal.wav")).unwrap().len(), 44);

    let silence = dir.path().join("silence.wav");
    write_wav(&SignalBuffer::zeros(8192, 8192.0).unwrap(), &silence, WavSpec::default()).unwrap();
    let o = touchtone(&["decode", "--input", silence.to_str().unwrap()], &dir.path().join("dec"));
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "\n");
}

#[test]
fn noisy_decode_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["decode", "--digits", "2474481221", "--snr", "3", "--seed", "7"];
    let a = touchtone(&args, &dir.path().join("a"));
    let b = touchtone(&args, &dir.path().join("b"));
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(
        std::fs::read(dir.path().join("a/report.csv")).unwrap(),
        std::fs::read(dir.path().join("b/report.csv")).unwrap()
    );
}

#[test]
fn stochastic_runs_need_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = touchtone(&["decode", "--digits", "123", "--snr", "3"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("--seed"));
    let o = touchtone(&["sweep-snr", "--trials", "10"], dir.path());
    assert!(!o.status.success());
    let o = touchtone(&["encode", "--digits", "12", "--mark-spread", "10"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn rejected_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = touchtone(&["sweep-snr", "--trials", "0", "--seed", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("trials"));
    let o = touchtone(&["spectrum", "--digit", "2", "--mark", "0"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = touchtone(&["encode", "--digits", "12x"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = touchtone(&["encode"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = touchtone(&["encode", "--digits", "123", "--mark-list", "900,1000"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn single_point_transform_reports_no_tone() {
    let dir = tempfile::tempdir().unwrap();
    let o = touchtone(&["sweep-nfft", "--n-list", "1,2048"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "N=1 \nN=2048 49158\n");
    assert!(stderr(&o).contains("without a recognised tone pair"));
    let summary = std::fs::read_to_string(dir.path().join("nfft_summary.csv")).unwrap();
    assert_eq!(summary, "n,decoded,frames,no_tone_frames\n1,,5,5\n2048,49158,5,0\n");
}

#[test]
fn spectrum_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let o = touchtone(&["spectrum", "--digit", "2"], dir.path());
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert!(lines[0].starts_with("peak k=174 "), "{lines:?}");
    assert!(lines[1].starts_with("peak k=334 "), "{lines:?}");
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2049);

    let o = touchtone(&["spectrum", "--digit", "9", "--backend", "goertzel"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("hz=852"));
}

#[test]
fn sweeps_write_expected_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = touchtone(&["sweep-snr", "--snr-range", "3", "--trials", "20", "--seed", "4"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let sweep = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 5);

    let o = touchtone(&["sweep-timing"], &dir.path().join("t"));
    assert!(o.status.success());
    let timing = std::fs::read_to_string(dir.path().join("t/timing.csv")).unwrap();
    assert!(timing.lines().skip(1).all(|l| l.ends_with(",true")), "{timing}");

    let manifest = std::fs::read_to_string(dir.path().join("t/manifest.json")).unwrap();
    assert!(manifest.contains("\"subcommand\": \"sweep-timing\""));
    assert!(manifest.contains("\"baseline_timing\""));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = touchtone(&["selftest", "--cases", "200"], dir.path());
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 4);
    assert!(stdout(&o).contains("sbndft/goertzel time per op"));
}

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use touchtone::channel::{add_awgn, NoiseSpec};
use touchtone::decoder::decode_number;
use touchtone::keypad::{parse_dial_string, synthesize_sequence};
use touchtone::{Backend, SegmentationConfig, TimingProfile};

const FS: f64 = 8192.0;

fn decode(c: &mut Criterion) {
    let symbols = parse_dial_string("247-448-1221").unwrap();
    let clean = synthesize_sequence(&symbols, &TimingProfile::fixed(1000, 100), FS).unwrap();
    let noisy = add_awgn(&clean, &NoiseSpec::new(5.0, 1)).unwrap();

    let mut group = c.benchmark_group("decode_number");
    for backend in Backend::ALL {
        let cfg = SegmentationConfig::experiment(FS);
        group.bench_function(format!("clean_{backend}"), |b| {
            b.iter(|| decode_number(black_box(&clean), &cfg, backend, 2048).unwrap())
        });
    }
    let cfg = SegmentationConfig::noisy(FS);
    group.bench_function("noisy_goertzel", |b| {
        b.iter(|| decode_number(black_box(&noisy), &cfg, Backend::Goertzel, 2048).unwrap())
    });
    group.finish();
}

criterion_group!(benches, decode);
criterion_main!(benches);

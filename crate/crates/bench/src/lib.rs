//! Criterion benchmarks for the `touchtone` kernels live under `benches/`.

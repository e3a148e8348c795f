//! Benchmarks for the `bfredholm` kernels live in `benches/`.

//! Criterion benchmarks for the homsense kernels live in `benches/`.

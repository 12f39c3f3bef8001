//! Criterion benchmarks for the residuum kernels live under `benches/`.

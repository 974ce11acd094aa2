//! Criterion benchmarks for the fairfront kernels; see `benches/`.

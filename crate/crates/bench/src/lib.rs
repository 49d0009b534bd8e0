//! Criterion benchmarks for the window LP and the rolling simulation; see `benches/`.

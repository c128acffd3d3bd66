//! Criterion benchmarks for the workbench pipeline; see `benches/`.

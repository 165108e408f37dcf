//! Criterion benchmarks for diffreduce; see `benches/`.

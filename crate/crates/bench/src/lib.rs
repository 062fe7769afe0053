//! Criterion benchmarks for the aidyn workspace live in `benches/`.

//! Benchmarks for `hmcreal` live in `benches/`.

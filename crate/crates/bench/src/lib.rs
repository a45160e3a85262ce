//! Benchmarks for the catgraph engine live in `benches/`.

//! Benchmarks for the parse, check and run pipeline live in `benches/`.

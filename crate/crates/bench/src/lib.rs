//! Criterion benchmarks for the simulator and spanner pipeline live in
//! `benches/`; this crate intentionally exports nothing.

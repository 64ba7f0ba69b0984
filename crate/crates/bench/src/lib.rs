//! Benchmarks live in `benches/` (`cargo bench -p equisep-perf`); the
//! acceptance suite in `tests/acceptance.rs` (`cargo test -p equisep-perf`).

// Benchmark-only crate; see benches/lifts.rs.

//! Benchmarks for jacobi-core; run with `cargo bench -p jacobi-bench`.

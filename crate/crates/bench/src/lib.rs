//! Criterion benchmarks for nodal-lab; see `benches/`.

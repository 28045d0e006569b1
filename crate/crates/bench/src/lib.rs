//! Criterion benchmarks for sensefold live in `benches/`. Run them with
//! `cargo bench -p sensefold-bench`; set `SENSEFOLD_WORDNET_DIR` to also time
//! the mapping build on full WordNet.

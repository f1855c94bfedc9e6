//! Hosts the `acceptance` test target: `cargo test -p hpdiv-validation`.

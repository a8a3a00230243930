//! Holds the `acceptance` test target, which checks the solvers, models and
//! benchmark tooling end to end. Run it with `cargo test -p rrs-validation`.

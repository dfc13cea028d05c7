//! Acceptance criteria for `cone-deform`, run with `cargo test -p cone-deform-validation`.

//! Acceptance suite for the workspace. Run it with
//! `cargo test -p sveiqhr-validation --test acceptance`; it prints one
//! PASS or FAIL line per criterion and exits nonzero if any fails.

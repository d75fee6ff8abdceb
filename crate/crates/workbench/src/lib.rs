//! Generators, bench harness and command-line front end for `divkit`.

pub mod bench;
pub mod cli;
pub mod generators;
pub mod solve;

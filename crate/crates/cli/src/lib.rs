//! Front end for the `levyft` solver: configuration, solve runs, convergence
//! tables, timing benchmarks and an oracle self-check.

pub mod commands;
pub mod config;
pub mod output;

//! Command-line front end for `relfam`: commands, a synthetic system
//! generator and the incremental-versus-batch benchmark.

pub mod bench;
pub mod commands;
pub mod generate;

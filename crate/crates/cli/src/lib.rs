//! Command-line front end for the conformal-core library: definition-file
//! parsing, subcommand dispatch, and deterministic JSON/text reports.

pub mod commands;
pub mod defs;
pub mod report;

//! Command-line front end for the `frdtm` solver.
//!
//! The binary reads a line-oriented `key = value` configuration, runs one of
//! four batch commands (`solve`, `table`, `surface`, `sweep`), and emits CSV
//! with 15-significant-digit values to stdout or a file.
//!
//! - [`config`] — configuration parsing and validation
//! - [`run`] — command execution producing CSV text
//! - [`output`] — number formatting and CSV rendering

pub mod config;
pub mod output;
pub mod run;

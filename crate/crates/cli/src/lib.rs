//! Command-line front end: argument grammar, value parsers and the runner
//! that turns a [`RunConfig`] into a CSV or JSON report.
//!
//! Exit status is 0 on success, 2 on invalid input (the message names the
//! offending path or value) and 3 when a computation does not converge.

mod config;
mod parse;
mod run;

pub use config::{Cli, Command, Format, RunConfig, DEFAULT_TOL};
pub use parse::{parse_index_range, parse_real_list, parse_wavenumber, Wavenumber, MAX_INDICES, MAX_REALS};
pub use run::{render, resolve_k, run, Report, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION};

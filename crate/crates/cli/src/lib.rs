//! Command-line front end: input parsing, solver dispatch, verification,
//! the query-scaling bench and the operator-norm demonstration.
//!
//! Every command prints one JSON document (`schema_version` 1). Exit codes:
//! 0 success, 1 usage or input error, 2 no ball found.

pub mod args;
pub mod bench;
pub mod commands;
pub mod error;
pub mod io;

pub use args::Cli;
pub use commands::{run, Outcome, SCHEMA_VERSION};
pub use error::{CliError, CliResult, EXIT_NO_SOLUTION, EXIT_OK, EXIT_USAGE};

//! File formats and command-line front end for `psi-ham-core`.
//!
//! - [`doc`]: JSON documents for problems, series and residual reports.
//! - [`table`]: `lo:hi:count` axes, grid evaluation and CSV output.
//! - [`figures`]: presets for the six published figures.
//! - [`tolerances`]: the versioned budget file.
//! - [`cli`]: the `psi-ham` subcommands.

pub mod cli;
pub mod doc;
pub mod error;
pub mod figures;
pub mod table;
pub mod tolerances;

pub use error::{CliError, CliResult};

//! Configuration parsing and subcommands behind the `ucfem` binary.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{dispatch, report_document, Command};
pub use config::{parse_config, parse_with_overrides, RunConfig};
pub use error::CliError;

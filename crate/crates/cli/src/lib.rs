//! File formats and commands behind the `ispd` binary: forward generation of
//! s-function tables, identity reports, inverse reconstruction, conversion of
//! point samples and interval sweeps.

pub mod commands;
pub mod convert;
pub mod error;
pub mod formats;

pub use error::{CliError, ExitKind};

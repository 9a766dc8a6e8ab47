//! Problem registry, CSV output and the `run` / `table1` commands built on
//! `hbvm-core`.

pub mod error;
pub mod output;
pub mod registry;
pub mod run;
pub mod table1;

pub use error::{CliError, CliResult};
pub use registry::ProblemRegistry;
pub use run::{cmd_run, RunDescriptor, RunOutcome};

//! Job parsing, execution and report rendering behind the `mukai` binary.

pub mod job;
pub mod render;
pub mod run;

pub use job::{parse_batch, parse_job, CliError, Command, JobSpec};
pub use render::{render_csv, render_table, ColorMode};
pub use run::{envelope, run_job, run_value};

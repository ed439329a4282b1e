//! The `hcut` command-line tool: CSV ingestion, clustering, evaluation,
//! instance generation and timing.

pub mod app;
pub mod bench;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod json;

pub use app::{run, Cli};
pub use error::{CliError, CliResult};

//! Batch pipeline around `arima-core`: CSV ingestion, optional price
//! download, and per-command CSV/JSON/SVG reports.

pub mod commands;
pub mod dataset;
pub mod error;
pub mod fetch;
pub mod report;
pub mod svg;

pub use commands::{run_command, Command, Format, RunConfig, RunOutcome};
pub use dataset::{ingest_csv, write_series_csv, DatasetSpec, FillPolicy};
pub use error::{CliError, Result};
pub use fetch::{fetch_prices, FetchRequest};

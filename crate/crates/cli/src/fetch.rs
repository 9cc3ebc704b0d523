//! Download a raw `date,close` CSV from an HTTP endpoint.
//!
//! The body is checked for shape and written to disk unchanged; it only
//! reaches the pipeline through [`crate::dataset::ingest_csv`].

use std::path::Path;
use std::time::Duration;

use chrono::NaiveDate;

use crate::dataset::parse_rows;
use crate::error::{CliError, Result};
use crate::report::write_atomic;

pub const URL_ENV: &str = "BTC_ARIMA_FETCH_URL";
pub const KEY_ENV: &str = "BTC_ARIMA_API_KEY";

#[derive(Debug, Clone)]
pub struct FetchRequest<'a> {
    pub url: &'a str,
    pub api_key: Option<&'a str>,
    pub start: NaiveDate,
    /// Exclusive.
    pub end: NaiveDate,
}

/// Fetches the CSV body and writes it to `dest`; returns the data row count.
pub fn fetch_prices(req: &FetchRequest<'_>, dest: &Path) -> Result<usize> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(60)))
        .http_status_as_error(false)
        .build()
        .into();
    let mut call = agent
        .get(req.url)
        .query("start", req.start.to_string())
        .query("end", req.end.to_string());
    if let Some(key) = req.api_key {
        call = call.header("X-Api-Key", key);
    }
    let mut resp = call.call().map_err(|e| CliError::Network(e.to_string()))?;
    let status = resp.status();
    if !status.is_success() {
        return Err(CliError::Network(format!("HTTP status {}", status.as_u16())));
    }
    let body = resp
        .body_mut()
        .read_to_string()
        .map_err(|e| CliError::Network(e.to_string()))?;
    let rows = validate_body(&body)?;
    write_atomic(dest, body.as_bytes())?;
    Ok(rows)
}

fn validate_body(body: &str) -> Result<usize> {
    let rows = parse_rows(body).map_err(|e| CliError::MalformedResponse(e.to_string()))?;
    if rows.is_empty() {
        return Err(CliError::MalformedResponse("no data rows".into()));
    }
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_validation() {
        assert_eq!(validate_body("date,close\n2015-09-01,230.1\n").unwrap(), 1);
        assert!(matches!(
            validate_body("date,open\n2015-09-01,230.1\n"),
            Err(CliError::MalformedResponse(_))
        ));
        assert!(matches!(validate_body("date,close\n"), Err(CliError::MalformedResponse(_))));
        assert!(matches!(validate_body("<html>oops</html>"), Err(CliError::MalformedResponse(_))));
    }
}

//! `date,close` CSV ingestion.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use arima_core::TimeSeries;
use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FillPolicy {
    Error,
    ForwardFill,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub start_date: NaiveDate,
    pub span_days: u32,
    pub fill_policy: FillPolicy,
}

impl DatasetSpec {
    pub fn end_date(&self) -> NaiveDate {
        self.start_date + Days::new(self.span_days as u64)
    }
}

struct Columns {
    date: usize,
    close: usize,
}

fn header_columns(record: &csv::StringRecord) -> Option<Columns> {
    let find = |name: &str| {
        record
            .iter()
            .position(|f| f.trim().eq_ignore_ascii_case(name))
    };
    Some(Columns {
        date: find("date")?,
        close: find("close")?,
    })
}

/// Parses `(date, close)` rows from CSV text. A header row is optional; when
/// present it must name `date` and `close` columns.
pub(crate) fn parse_rows(text: &str) -> Result<Vec<(usize, NaiveDate, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut cols = Columns { date: 0, close: 1 };
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| CliError::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let first = record.get(0).unwrap_or("");
        if line == 1 && NaiveDate::parse_from_str(first, "%Y-%m-%d").is_err() {
            cols = header_columns(&record).ok_or_else(|| CliError::Parse {
                line,
                message: "header must contain `date` and `close` columns".into(),
            })?;
            continue;
        }
        let field = |idx: usize, what: &str| {
            record.get(idx).ok_or_else(|| CliError::Parse {
                line,
                message: format!("missing {what} field"),
            })
        };
        let date = NaiveDate::parse_from_str(field(cols.date, "date")?, "%Y-%m-%d").map_err(|e| {
            CliError::Parse {
                line,
                message: format!("bad date: {e}"),
            }
        })?;
        let raw = field(cols.close, "close")?;
        let close: f64 = raw.parse().map_err(|_| CliError::Parse {
            line,
            message: format!("bad close value `{raw}`"),
        })?;
        if !close.is_finite() {
            return Err(CliError::Parse {
                line,
                message: format!("close value `{raw}` is not finite"),
            });
        }
        rows.push((line, date, close));
    }
    Ok(rows)
}

/// Loads the price series described by `spec`: rows sorted by date, clipped
/// to `[start_date, start_date + span_days)`, gaps handled per the fill
/// policy.
pub fn ingest_csv(spec: &DatasetSpec) -> Result<TimeSeries> {
    let text = std::fs::read_to_string(&spec.path).map_err(|e| CliError::io(&spec.path, e))?;
    ingest_text(&text, spec)
}

pub(crate) fn ingest_text(text: &str, spec: &DatasetSpec) -> Result<TimeSeries> {
    if spec.span_days == 0 {
        return Err(CliError::Config("span must be at least one day".into()));
    }
    let end = spec.end_date();
    let mut by_date = BTreeMap::new();
    for (line, date, close) in parse_rows(text)? {
        if date < spec.start_date || date >= end {
            continue;
        }
        if close <= 0.0 {
            return Err(CliError::NonPositivePrice { line, value: close });
        }
        if by_date.insert(date, close).is_some() {
            return Err(CliError::Parse {
                line,
                message: format!("duplicate date {date}"),
            });
        }
    }
    if by_date.len() < 2 {
        return Err(CliError::EmptyRange { rows: by_date.len() });
    }

    let mut dates: Vec<NaiveDate> = Vec::with_capacity(by_date.len());
    let mut values = Vec::with_capacity(by_date.len());
    for (date, close) in by_date {
        if let Some(&prev) = dates.last() {
            let missing = (date - prev).num_days() - 1;
            if missing > 0 {
                match spec.fill_policy {
                    FillPolicy::Error => return Err(CliError::Gap { after: prev, missing }),
                    FillPolicy::ForwardFill => {
                        log::warn!("forward-filling {missing} missing day(s) after {prev}");
                        let last = *values.last().expect("non-empty");
                        for k in 1..=missing as u64 {
                            dates.push(prev + Days::new(k));
                            values.push(last);
                        }
                    }
                }
            }
        }
        dates.push(date);
        values.push(close);
    }
    if dates[0] != spec.start_date {
        log::warn!("dataset starts at {} rather than {}", dates[0], spec.start_date);
    }
    Ok(TimeSeries::new(dates, values)?)
}

/// Writes `series` as `date,close` with full round-trip precision.
pub fn write_series_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    let mut out = String::from("date,close\n");
    for (d, v) in series.dates().iter().zip(series.values()) {
        out.push_str(&format!("{d},{v}\n"));
    }
    crate::report::write_atomic(path, out.as_bytes())
}

//! CSV ingestion of hourly series.
//!
//! The input has a header row, a `timestamp` column holding ISO-8601 times
//! and one column per feature. Rows must be hourly and contiguous.

use std::path::Path;

use chrono::{DateTime, NaiveDateTime, TimeDelta};

use crate::error::{Error, Result};
use crate::series::AnnualSeries;

pub const TIMESTAMP_COLUMN: &str = "timestamp";

const NAIVE_FORMATS: &[&str] = &[
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

/// Parses an ISO-8601 timestamp. Offsets are normalized to UTC.
pub fn parse_timestamp(raw: &str) -> Option<NaiveDateTime> {
    let raw = raw.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.naive_utc());
    }
    NAIVE_FORMATS
        .iter()
        .find_map(|fmt| NaiveDateTime::parse_from_str(raw, fmt).ok())
}

/// Reads `path`, keeping `feature_columns` in the given order. An empty
/// list takes every column except the timestamp, in file order.
///
/// `truncate_to_hours` keeps only the first N rows; without it the row
/// count must already be a multiple of 24.
pub fn load_csv(
    path: impl AsRef<Path>,
    feature_columns: &[String],
    truncate_to_hours: Option<usize>,
) -> Result<AnnualSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, feature_columns, truncate_to_hours).map_err(|e| match e {
        Error::Csv { message, .. } => Error::Csv {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

pub fn read_csv<R: std::io::Read>(
    reader: R,
    feature_columns: &[String],
    truncate_to_hours: Option<usize>,
) -> Result<AnnualSeries> {
    let csv_err = |e: csv::Error| Error::Csv {
        path: Default::default(),
        message: e.to_string(),
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();

    let mut seen = std::collections::HashSet::new();
    for h in headers.iter() {
        if !seen.insert(h) {
            return Err(Error::DuplicateColumn(h.to_string()));
        }
    }
    let all_columns: Vec<String>;
    let feature_columns = if feature_columns.is_empty() {
        all_columns = headers
            .iter()
            .filter(|h| *h != TIMESTAMP_COLUMN)
            .map(String::from)
            .collect();
        if all_columns.is_empty() {
            return Err(Error::InvalidSeries(
                "no feature columns in the input".into(),
            ));
        }
        &all_columns[..]
    } else {
        feature_columns
    };
    let mut requested = std::collections::HashSet::new();
    for c in feature_columns {
        if !requested.insert(c.as_str()) {
            return Err(Error::DuplicateColumn(c.clone()));
        }
    }
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let ts_col = find(TIMESTAMP_COLUMN)?;
    let cols = feature_columns
        .iter()
        .map(|c| find(c))
        .collect::<Result<Vec<_>>>()?;

    let mut values = Vec::new();
    let mut previous: Option<NaiveDateTime> = None;
    let mut rows = 0usize;
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let raw_ts = record.get(ts_col).unwrap_or("");
        let ts = parse_timestamp(raw_ts).ok_or_else(|| Error::BadCell {
            row,
            column: TIMESTAMP_COLUMN.into(),
            message: format!("cannot parse `{raw_ts}` as an ISO-8601 timestamp"),
        })?;
        if let Some(prev) = previous {
            if ts - prev != TimeDelta::hours(1) {
                return Err(Error::NonContiguous {
                    row,
                    previous: prev.to_string(),
                    found: ts.to_string(),
                });
            }
        }
        previous = Some(ts);
        for (&c, name) in cols.iter().zip(feature_columns) {
            let cell = record.get(c).unwrap_or("");
            if cell.is_empty() {
                return Err(Error::BadCell {
                    row,
                    column: name.clone(),
                    message: "missing value".into(),
                });
            }
            let v: f64 = cell.parse().map_err(|_| Error::BadCell {
                row,
                column: name.clone(),
                message: format!("`{cell}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::BadCell {
                    row,
                    column: name.clone(),
                    message: format!("`{cell}` is not finite"),
                });
            }
            values.push(v);
        }
        rows += 1;
    }

    let keep = match truncate_to_hours {
        Some(n) if n > rows => {
            return Err(Error::InvalidSeries(format!(
                "--truncate-to-hours {n} exceeds the {rows} rows available"
            )))
        }
        Some(n) if n % 24 != 0 => {
            return Err(Error::InvalidSeries(format!(
                "--truncate-to-hours {n} is not a multiple of 24"
            )))
        }
        Some(n) => n,
        None => rows,
    };
    if keep == 0 {
        return Err(Error::InvalidSeries("no data rows".into()));
    }
    values.truncate(keep * feature_columns.len());
    AnnualSeries::new(values, feature_columns.to_vec())
}

//! On-disk formats: `selection.json`, `representatives.csv`, `elbow.csv`
//! and the distance matrix dump.

use std::io::Write;

use chrono::{NaiveDateTime, TimeDelta};
use serde::{Deserialize, Serialize};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::evaluation::ElbowCurve;
use crate::geometry::SliceGeometry;
use crate::ingest::TIMESTAMP_COLUMN;
use crate::select::{segment_counts, weights, Method, Optimality, Selection};
use crate::series::AnnualSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryRecord {
    pub hours: usize,
    pub length_hours: usize,
    pub stride_hours: usize,
    pub segments: usize,
    pub subsequences: usize,
    pub days_per_period: usize,
}

impl From<&SliceGeometry> for GeometryRecord {
    fn from(g: &SliceGeometry) -> Self {
        Self {
            hours: g.hours,
            length_hours: g.length,
            stride_hours: g.stride,
            segments: g.segments(),
            subsequences: g.subsequences(),
            days_per_period: g.days_per_period(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub subsequence: usize,
    pub start_day: usize,
    pub start_hour: usize,
    pub segments_served: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityRecord {
    pub status: String,
    pub lower_bound: Option<f64>,
    pub gap: Option<f64>,
}

impl From<&Optimality> for OptimalityRecord {
    fn from(o: &Optimality) -> Self {
        let (lower_bound, gap) = match *o {
            Optimality::ProvenOptimal => (None, Some(0.0)),
            Optimality::Heuristic => (None, None),
            Optimality::Bounded { lower_bound, gap } => (Some(lower_bound), Some(gap)),
        };
        Self {
            status: o.label().to_string(),
            lower_bound,
            gap,
        }
    }
}

/// Serialized form of a [`Selection`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub geometry: GeometryRecord,
    pub method: Method,
    pub k: usize,
    pub objective: f64,
    pub optimality: OptimalityRecord,
    pub periods: Vec<PeriodRecord>,
    /// Chosen subsequence serving each segment.
    pub assignment: Vec<usize>,
    pub dist: Vec<f64>,
    /// Free-form provenance (input file, features, normalization).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<serde_json::Value>,
}

impl SelectionRecord {
    pub fn new(selection: &Selection, source: Option<serde_json::Value>) -> Self {
        let g = &selection.geometry;
        let periods = selection
            .chosen
            .iter()
            .enumerate()
            .map(|(p, &j)| PeriodRecord {
                subsequence: j,
                start_day: j * g.stride / 24,
                start_hour: j * g.stride,
                segments_served: selection.counts[p],
                weight: selection.weights[p],
            })
            .collect();
        Self {
            geometry: g.into(),
            method: selection.method,
            k: selection.k(),
            objective: selection.objective,
            optimality: (&selection.optimality).into(),
            periods,
            assignment: selection.assignment.clone(),
            dist: selection.dist.clone(),
            source,
        }
    }

    pub fn to_selection(&self) -> Result<Selection> {
        let g = &self.geometry;
        let geometry = SliceGeometry::new(g.hours, g.length_hours, g.stride_hours)?;
        let chosen: Vec<usize> = self.periods.iter().map(|p| p.subsequence).collect();
        if chosen.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSelection(
                "periods must be ascending and distinct".into(),
            ));
        }
        if let Some(&bad) = chosen.iter().find(|&&j| j >= geometry.subsequences()) {
            return Err(Error::IndexOutOfRange {
                kind: "subsequence",
                index: bad,
                count: geometry.subsequences(),
            });
        }
        if self.assignment.len() != geometry.segments() || self.dist.len() != geometry.segments() {
            return Err(Error::InvalidSelection(
                "one assignment per segment expected".into(),
            ));
        }
        if self.assignment.iter().any(|a| !chosen.contains(a)) {
            return Err(Error::InvalidSelection(
                "segment assigned to an unchosen period".into(),
            ));
        }
        let counts = segment_counts(&chosen, &self.assignment);
        let optimality = match self.optimality.status.as_str() {
            "proven-optimal" => Optimality::ProvenOptimal,
            "heuristic" => Optimality::Heuristic,
            "bounded" => Optimality::Bounded {
                lower_bound: self.optimality.lower_bound.unwrap_or(0.0),
                gap: self.optimality.gap.unwrap_or(f64::NAN),
            },
            other => {
                return Err(Error::InvalidSelection(format!("unknown status `{other}`")));
            }
        };
        let file_weights: Vec<f64> = self.periods.iter().map(|p| p.weight).collect();
        let expected = weights(&counts, &geometry);
        if file_weights
            .iter()
            .zip(&expected)
            .any(|(a, b)| (a - b).abs() > 1e-9)
        {
            log::warn!("selection weights differ from segment counts; using file weights");
        }
        Ok(Selection {
            geometry,
            method: self.method,
            chosen,
            assignment: self.assignment.clone(),
            dist: self.dist.clone(),
            counts,
            weights: file_weights,
            objective: self.objective,
            optimality,
        })
    }
}

pub fn write_selection_json<W: Write>(
    w: W,
    selection: &Selection,
    source: Option<serde_json::Value>,
) -> Result<()> {
    let record = SelectionRecord::new(selection, source);
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, &record)?;
    writeln!(w).map_err(io_err)?;
    Ok(())
}

pub fn read_selection_json<R: std::io::Read>(r: R) -> Result<SelectionRecord> {
    Ok(serde_json::from_reader(r)?)
}

fn io_err(source: std::io::Error) -> Error {
    Error::Io {
        path: Default::default(),
        source,
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv {
        path: Default::default(),
        message: e.to_string(),
    }
}

/// One row per (period, hour in period) with the series values.
///
/// `series` should be in the units the consumer expects; pass the raw
/// series, not the normalized one.
pub fn write_representatives_csv<W: Write>(
    w: W,
    series: &AnnualSeries,
    selection: &Selection,
) -> Result<()> {
    let g = &selection.geometry;
    series.check_geometry(g)?;
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec![
        "period".to_string(),
        "subsequence".into(),
        "start_hour".into(),
        "hour_in_period".into(),
        "weight".into(),
    ];
    header.extend(series.feature_names().iter().cloned());
    out.write_record(&header).map_err(csv_err)?;
    for (p, (&j, &w)) in selection.chosen.iter().zip(&selection.weights).enumerate() {
        for (offset, hour) in g.subsequence_range(j)?.enumerate() {
            let mut rec = vec![
                p.to_string(),
                j.to_string(),
                (j * g.stride).to_string(),
                offset.to_string(),
                w.to_string(),
            ];
            rec.extend(series.row(hour).iter().map(|v| v.to_string()));
            out.write_record(&rec).map_err(csv_err)?;
        }
    }
    out.flush().map_err(io_err)?;
    Ok(())
}

/// Writes `series` in the ingest format, one row per hour from `start`.
pub fn write_series_csv<W: Write>(w: W, series: &AnnualSeries, start: NaiveDateTime) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(
        std::iter::once(TIMESTAMP_COLUMN).chain(series.feature_names().iter().map(String::as_str)),
    )
    .map_err(csv_err)?;
    for h in 0..series.hours() {
        let ts = start + TimeDelta::hours(h as i64);
        let mut rec = vec![ts.format("%Y-%m-%dT%H:%M:%S").to_string()];
        rec.extend(series.row(h).iter().map(|v| v.to_string()));
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(())
}

/// Columns `length_days,k,total_days,objective,status`.
pub fn write_elbow_csv<W: Write>(w: W, curves: &[ElbowCurve]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["length_days", "k", "total_days", "objective", "status"])
        .map_err(csv_err)?;
    for c in curves {
        for p in &c.points {
            out.write_record([
                c.length_days.to_string(),
                p.k.to_string(),
                p.total_days.to_string(),
                p.objective.to_string(),
                p.optimality.label().to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    out.flush().map_err(io_err)?;
    Ok(())
}

/// `n` rows by `m` columns, headers `j0..j{m-1}`, 17 significant digits.
pub fn write_distance_csv<W: Write>(w: W, d: &DistanceMatrix) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record((0..d.m()).map(|j| format!("j{j}")))
        .map_err(csv_err)?;
    for i in 0..d.n() {
        out.write_record(d.row(i).iter().map(|v| format!("{v:.16e}")))
            .map_err(csv_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(())
}

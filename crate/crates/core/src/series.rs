//! The annual multivariate hourly series and its feature scaling.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SliceGeometry;

/// Per-feature scaling applied to an [`AnnualSeries`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Scaling {
    Raw,
    MinMax { min: Vec<f64>, max: Vec<f64> },
    ZScore { mean: Vec<f64>, std: Vec<f64> },
}

impl Scaling {
    pub fn name(&self) -> &'static str {
        match self {
            Scaling::Raw => "raw",
            Scaling::MinMax { .. } => "min-max",
            Scaling::ZScore { .. } => "z-score",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizeMethod {
    #[default]
    MinMax,
    ZScore,
    None,
}

impl std::str::FromStr for NormalizeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minmax" | "min-max" => Ok(Self::MinMax),
            "zscore" | "z-score" => Ok(Self::ZScore),
            "none" => Ok(Self::None),
            other => Err(Error::InvalidSeries(format!(
                "unknown normalization `{other}` (expected minmax, zscore or none)"
            ))),
        }
    }
}

/// A year of hourly observations, `hours × features`, stored row (hour) major.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnualSeries {
    values: Vec<f64>,
    feature_names: Vec<String>,
    hours: usize,
    scaling: Scaling,
}

impl AnnualSeries {
    /// Builds a raw series from row-major values.
    pub fn new(values: Vec<f64>, feature_names: Vec<String>) -> Result<Self> {
        if feature_names.is_empty() {
            return Err(Error::InvalidSeries(
                "at least one feature is required".into(),
            ));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if name.is_empty() {
                return Err(Error::InvalidSeries(
                    "feature names must be non-empty".into(),
                ));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        let f = feature_names.len();
        if !values.len().is_multiple_of(f) {
            return Err(Error::ShapeMismatch(format!(
                "{} values do not fill rows of {f} features",
                values.len()
            )));
        }
        let hours = values.len() / f;
        if hours == 0 {
            return Err(Error::InvalidSeries("series is empty".into()));
        }
        if !hours.is_multiple_of(24) {
            return Err(Error::NotWholeDays {
                hours,
                suggested: hours - hours % 24,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::BadCell {
                row: pos / f,
                column: feature_names[pos % f].clone(),
                message: "value is not finite".into(),
            });
        }
        Ok(Self {
            values,
            feature_names,
            hours,
            scaling: Scaling::Raw,
        })
    }

    pub fn hours(&self) -> usize {
        self.hours
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn scaling(&self) -> &Scaling {
        &self.scaling
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Rows `[start, end)` as a flat row-major slice.
    pub fn rows(&self, range: std::ops::Range<usize>) -> &[f64] {
        let f = self.num_features();
        &self.values[range.start * f..range.end * f]
    }

    pub fn row(&self, hour: usize) -> &[f64] {
        self.rows(hour..hour + 1)
    }

    pub fn value(&self, hour: usize, feature: usize) -> f64 {
        self.values[hour * self.num_features() + feature]
    }

    pub fn column(&self, feature: usize) -> Vec<f64> {
        self.values
            .iter()
            .skip(feature)
            .step_by(self.num_features())
            .copied()
            .collect()
    }

    /// Segment `T_i`, the `u × F` block of rows `[i·u, (i+1)·u)`.
    pub fn segment(&self, geometry: &SliceGeometry, i: usize) -> Result<&[f64]> {
        self.check_geometry(geometry)?;
        Ok(self.rows(geometry.segment_range(i)?))
    }

    /// Subsequence `S_j`, the `s × F` block of rows `[j·u, j·u + s)`.
    pub fn subsequence(&self, geometry: &SliceGeometry, j: usize) -> Result<&[f64]> {
        self.check_geometry(geometry)?;
        Ok(self.rows(geometry.subsequence_range(j)?))
    }

    pub fn check_geometry(&self, geometry: &SliceGeometry) -> Result<()> {
        if geometry.hours != self.hours {
            return Err(Error::Geometry(format!(
                "geometry built for t = {} but series has t = {}",
                geometry.hours, self.hours
            )));
        }
        Ok(())
    }

    /// Keeps only the listed features, in the given order.
    pub fn select_features(&self, order: &[usize]) -> Result<Self> {
        let f = self.num_features();
        if let Some(&bad) = order.iter().find(|&&c| c >= f) {
            return Err(Error::IndexOutOfRange {
                kind: "feature",
                index: bad,
                count: f,
            });
        }
        let values = (0..self.hours)
            .flat_map(|h| order.iter().map(move |&c| self.values[h * f + c]))
            .collect();
        let names = order
            .iter()
            .map(|&c| self.feature_names[c].clone())
            .collect();
        let mut out = Self::new(values, names)?;
        out.scaling = match &self.scaling {
            Scaling::Raw => Scaling::Raw,
            Scaling::MinMax { min, max } => Scaling::MinMax {
                min: order.iter().map(|&c| min[c]).collect(),
                max: order.iter().map(|&c| max[c]).collect(),
            },
            Scaling::ZScore { mean, std } => Scaling::ZScore {
                mean: order.iter().map(|&c| mean[c]).collect(),
                std: order.iter().map(|&c| std[c]).collect(),
            },
        };
        Ok(out)
    }

    /// Keeps the first `hours` rows.
    pub fn truncate(&self, hours: usize) -> Result<Self> {
        if hours > self.hours {
            return Err(Error::InvalidSeries(format!(
                "cannot truncate {} hours to {hours}",
                self.hours
            )));
        }
        let f = self.num_features();
        let mut out = Self::new(
            self.values[..hours * f].to_vec(),
            self.feature_names.clone(),
        )?;
        out.scaling = self.scaling.clone();
        Ok(out)
    }

    /// Applies per-feature scaling. `None` returns an identical copy.
    pub fn normalize(&self, method: NormalizeMethod) -> Result<Self> {
        if method == NormalizeMethod::None {
            return Ok(self.clone());
        }
        if self.scaling != Scaling::Raw {
            return Err(Error::AlreadyScaled(self.scaling.name()));
        }
        let f = self.num_features();
        let t = self.hours as f64;
        let mut values = self.values.clone();
        let scaling = match method {
            NormalizeMethod::MinMax => {
                let mut min = vec![f64::INFINITY; f];
                let mut max = vec![f64::NEG_INFINITY; f];
                for row in self.values.chunks_exact(f) {
                    for (c, &v) in row.iter().enumerate() {
                        min[c] = min[c].min(v);
                        max[c] = max[c].max(v);
                    }
                }
                for row in values.chunks_exact_mut(f) {
                    for (c, v) in row.iter_mut().enumerate() {
                        let range = max[c] - min[c];
                        *v = if range > 0.0 {
                            ((*v - min[c]) / range).clamp(0.0, 1.0)
                        } else {
                            0.0
                        };
                    }
                }
                Scaling::MinMax { min, max }
            }
            NormalizeMethod::ZScore => {
                let mut mean = vec![0.0; f];
                for row in self.values.chunks_exact(f) {
                    for (c, &v) in row.iter().enumerate() {
                        mean[c] += v;
                    }
                }
                mean.iter_mut().for_each(|m| *m /= t);
                let mut std = vec![0.0; f];
                for row in self.values.chunks_exact(f) {
                    for (c, &v) in row.iter().enumerate() {
                        std[c] += (v - mean[c]).powi(2);
                    }
                }
                std.iter_mut().for_each(|s| *s = (*s / t).sqrt());
                for (c, s) in std.iter().enumerate() {
                    if *s == 0.0 {
                        log::warn!(
                            "feature `{}` is constant; z-score maps it to zeros",
                            self.feature_names[c]
                        );
                    }
                }
                for row in values.chunks_exact_mut(f) {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = if std[c] > 0.0 {
                            (*v - mean[c]) / std[c]
                        } else {
                            0.0
                        };
                    }
                }
                Scaling::ZScore { mean, std }
            }
            NormalizeMethod::None => unreachable!(),
        };
        Ok(Self {
            values,
            feature_names: self.feature_names.clone(),
            hours: self.hours,
            scaling,
        })
    }

    /// Maps a single scaled value of `feature` back to raw units.
    pub fn raw_value(&self, feature: usize, v: f64) -> f64 {
        match &self.scaling {
            Scaling::Raw => v,
            Scaling::MinMax { min, max } => min[feature] + v * (max[feature] - min[feature]),
            Scaling::ZScore { mean, std } => mean[feature] + v * std[feature],
        }
    }

    /// Inverse of [`normalize`](Self::normalize).
    pub fn denormalize(&self) -> Self {
        let f = self.num_features();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, &v)| self.raw_value(idx % f, v))
            .collect();
        Self {
            values,
            feature_names: self.feature_names.clone(),
            hours: self.hours,
            scaling: Scaling::Raw,
        }
    }
}

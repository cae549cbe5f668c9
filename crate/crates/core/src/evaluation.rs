//! Elbow curves and fidelity diagnostics for a set of representatives.

use serde::{Deserialize, Serialize};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::select::greedy::grow;
use crate::select::{check_k, solve_exact_with, ExactOptions, Optimality, Selection};
use crate::series::AnnualSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElbowPoint {
    pub k: usize,
    pub total_days: usize,
    pub objective: f64,
    pub optimality: Optimality,
}

/// Objective against `k` for one period length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElbowCurve {
    pub length_days: usize,
    pub points: Vec<ElbowPoint>,
}

impl ElbowCurve {
    /// True when the objective never rises as `k` grows.
    pub fn is_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[0].k >= w[1].k || w[1].objective <= w[0].objective)
    }
}

/// Solves each `k` in turn.
///
/// When `k` follows a smaller value, the previous set grown by greedy
/// additions is offered as a starting incumbent, so objectives never rise
/// with `k` even when a budget stops a solve early.
pub fn elbow(d: &DistanceMatrix, k_values: &[usize], opts: &ExactOptions) -> Result<ElbowCurve> {
    for &k in k_values {
        check_k(d, k)?;
    }
    let span = d.geometry().days_per_period();
    let mut points = Vec::with_capacity(k_values.len());
    let mut previous: Option<Vec<usize>> = None;
    for &k in k_values {
        let mut run = opts.clone();
        if let Some(prev) = previous.as_ref().filter(|p| p.len() < k) {
            let mut start = prev.clone();
            start.extend(grow(d, prev, k).into_iter().map(|(j, _)| j));
            run.warm_start = Some(start);
        }
        let (s, stats) = solve_exact_with(d, k, &run)?;
        log::info!(
            "elbow: {span}-day periods, k={k}: {:.6} ({}, {} nodes, {:?})",
            s.objective,
            s.optimality.label(),
            stats.nodes,
            stats.elapsed
        );
        points.push(ElbowPoint {
            k,
            total_days: k * span,
            objective: s.objective,
            optimality: s.optimality,
        });
        previous = Some(s.chosen);
    }
    Ok(ElbowCurve {
        length_days: span,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFidelity {
    pub feature: String,
    /// RMSE between the annual and the weighted duration curves, over the
    /// annual range of the feature.
    pub duration_curve_nrmse: f64,
    /// |weighted mean - annual mean| over the annual range.
    pub mean_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub features: Vec<FeatureFidelity>,
    /// Frobenius norm of the difference between the off-diagonal feature
    /// correlations of the weighted set and of the year.
    pub correlation_error: f64,
    pub represented_hours: f64,
}

/// Hours of the series with the weight each one carries.
type Sample = Vec<(usize, f64)>;

fn annual_sample(series: &AnnualSeries) -> Sample {
    (0..series.hours()).map(|h| (h, 1.0)).collect()
}

fn weighted_sample(series: &AnnualSeries, selection: &Selection) -> Result<Sample> {
    let g = &selection.geometry;
    series.check_geometry(g)?;
    if selection.weights.len() != selection.chosen.len() {
        return Err(Error::InvalidSelection(
            "one weight per chosen period expected".into(),
        ));
    }
    let mut out = Vec::with_capacity(selection.k() * g.length);
    for (&j, &w) in selection.chosen.iter().zip(&selection.weights) {
        out.extend(g.subsequence_range(j)?.map(|h| (h, w)));
    }
    Ok(out)
}

fn range_of(series: &AnnualSeries, feature: usize) -> f64 {
    let (lo, hi) = (0..series.hours())
        .map(|h| series.value(h, feature))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if hi > lo {
        hi - lo
    } else {
        1.0
    }
}

fn weighted_mean(series: &AnnualSeries, sample: &Sample, feature: usize) -> f64 {
    let (sum, total) = sample.iter().fold((0.0, 0.0), |(s, t), &(h, w)| {
        (s + w * series.value(h, feature), t + w)
    });
    sum / total
}

/// Descending (value, width) steps of the weighted duration curve.
fn duration_steps(series: &AnnualSeries, sample: &Sample, feature: usize) -> Vec<(f64, f64)> {
    let mut steps: Vec<(f64, f64)> = sample
        .iter()
        .filter(|&&(_, w)| w > 0.0)
        .map(|&(h, w)| (series.value(h, feature), w))
        .collect();
    steps.sort_by(|a, b| b.0.total_cmp(&a.0));
    steps
}

/// Integrated squared difference of two step curves over `[0, span]`.
fn step_l2(a: &[(f64, f64)], b: &[(f64, f64)], span: f64) -> f64 {
    let (mut ia, mut ib) = (0, 0);
    let (mut end_a, mut end_b) = (a[0].1, b[0].1);
    let mut x = 0.0;
    let mut acc = 0.0;
    while x < span {
        let end = end_a.min(end_b).min(span);
        let diff = a[ia].0 - b[ib].0;
        acc += diff * diff * (end - x);
        x = end;
        if end_a <= x && ia + 1 < a.len() {
            ia += 1;
            end_a += a[ia].1;
        } else if end_a <= x {
            end_a = f64::INFINITY;
        }
        if end_b <= x && ib + 1 < b.len() {
            ib += 1;
            end_b += b[ib].1;
        } else if end_b <= x {
            end_b = f64::INFINITY;
        }
    }
    acc
}

fn correlations(series: &AnnualSeries, sample: &Sample) -> Vec<f64> {
    let f = series.num_features();
    let means: Vec<f64> = (0..f).map(|c| weighted_mean(series, sample, c)).collect();
    let mut cov = vec![0.0; f * f];
    for &(h, w) in sample {
        for a in 0..f {
            let da = series.value(h, a) - means[a];
            for b in a..f {
                cov[a * f + b] += w * da * (series.value(h, b) - means[b]);
            }
        }
    }
    let mut out = Vec::new();
    for a in 0..f {
        for b in a + 1..f {
            let denom = (cov[a * f + a] * cov[b * f + b]).sqrt();
            out.push(if denom > 0.0 {
                cov[a * f + b] / denom
            } else {
                0.0
            });
        }
    }
    out
}

/// Compares the weighted representative hours with the full year.
///
/// Each hour of chosen period `j` stands for `w_j` hours of the year.
pub fn fidelity(series: &AnnualSeries, selection: &Selection) -> Result<FidelityReport> {
    let annual = annual_sample(series);
    let reps = weighted_sample(series, selection)?;
    let span = series.hours() as f64;
    let represented_hours: f64 = reps.iter().map(|&(_, w)| w).sum();
    if represented_hours <= 0.0 {
        return Err(Error::InvalidSelection(
            "selection carries no weight".into(),
        ));
    }

    let features = series
        .feature_names()
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let range = range_of(series, c);
            let a = duration_steps(series, &annual, c);
            let r = duration_steps(series, &reps, c);
            FeatureFidelity {
                feature: name.clone(),
                duration_curve_nrmse: (step_l2(&a, &r, span) / span).sqrt() / range,
                mean_error: (weighted_mean(series, &reps, c) - weighted_mean(series, &annual, c))
                    .abs()
                    / range,
            }
        })
        .collect();

    let ca = correlations(series, &annual);
    let cr = correlations(series, &reps);
    let correlation_error = ca
        .iter()
        .zip(&cr)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();

    Ok(FidelityReport {
        features,
        correlation_error,
        represented_hours,
    })
}

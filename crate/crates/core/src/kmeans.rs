//! k-means over day vectors with medoid representatives.
//!
//! Each day is flattened into a `24 × F` vector. Clusters come from Lloyd
//! iterations seeded by k-means++, and every cluster is then represented by
//! the member day with the smallest summed Euclidean distance to the rest
//! of its cluster, so the representatives are real days.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distance::day_distance;
use crate::error::{Error, Result};
use crate::geometry::SliceGeometry;
use crate::select::{weights, Method, Optimality, Selection};
use crate::series::AnnualSeries;

pub const DEFAULT_MAX_ITERS: usize = 300;

/// Full output of a clustering run.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOutcome {
    pub selection: Selection,
    /// Cluster id of each day.
    pub labels: Vec<usize>,
    /// Medoid day of each cluster, indexed by cluster id.
    pub medoids: Vec<usize>,
    /// Within-cluster sum of squares after each Lloyd update.
    pub wcss: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(point, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Like [`nearest`] but a point only leaves `current` for a strictly closer center.
fn reassign(point: &[f64], centers: &[Vec<f64>], current: usize) -> usize {
    let mut best = (current, sq_dist(point, &centers[current]));
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(point, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best.0
}

fn plus_plus(points: &[&[f64]], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = points.len();
    let mut picked = vec![rng.random_range(0..n)];
    let mut closest: Vec<f64> = points
        .iter()
        .map(|p| sq_dist(p, points[picked[0]]))
        .collect();
    while picked.len() < k {
        let next = match WeightedIndex::new(&closest) {
            Ok(dist) => dist.sample(rng),
            // Every remaining point sits on a center.
            Err(_) => (0..n).find(|i| !picked.contains(i)).expect("k <= n"),
        };
        picked.push(next);
        for (c, p) in closest.iter_mut().zip(points) {
            *c = c.min(sq_dist(p, points[next]));
        }
    }
    picked
}

/// Member minimizing summed distance to its cluster, lowest day on ties.
pub fn medoid(points: &[&[f64]], members: &[usize]) -> usize {
    let mut best = (members[0], f64::INFINITY);
    for &p in members {
        let total: f64 = members
            .iter()
            .map(|&q| day_distance(points[p], points[q]).expect("equal day shapes"))
            .sum();
        if total < best.1 {
            best = (p, total);
        }
    }
    best.0
}

/// Clusters the days of `series` and returns the medoid selection.
pub fn kmeans_medoid(
    series: &AnnualSeries,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<Selection> {
    kmeans_medoid_detailed(series, k, seed, max_iters).map(|o| o.selection)
}

pub fn kmeans_medoid_detailed(
    series: &AnnualSeries,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<KMeansOutcome> {
    let geometry = SliceGeometry::days(series.hours(), 1)?;
    let n = geometry.segments();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, max: n });
    }
    let points: Vec<&[f64]> = (0..n)
        .map(|i| series.segment(&geometry, i))
        .collect::<Result<_>>()?;
    let dim = points[0].len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Vec<f64>> = plus_plus(&points, k, &mut rng)
        .into_iter()
        .map(|i| points[i].to_vec())
        .collect();
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
    let mut wcss = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iters {
        iterations += 1;
        let mut sums = vec![vec![0.0; dim]; k];
        let mut sizes = vec![0usize; k];
        for (p, &c) in points.iter().zip(&labels) {
            sizes[c] += 1;
            sums[c].iter_mut().zip(p.iter()).for_each(|(s, v)| *s += v);
        }
        for c in 0..k {
            if sizes[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / sizes[c] as f64).collect();
            }
        }
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            // Re-seed from the point farthest from its own center.
            let far = (0..n)
                .filter(|&i| sizes[labels[i]] > 1)
                .map(|i| (i, sq_dist(points[i], &centers[labels[i]])))
                .fold(None::<(usize, f64)>, |acc, (i, d)| match acc {
                    Some((_, best)) if best >= d => acc,
                    _ => Some((i, d)),
                })
                .map(|(i, _)| i)
                .expect("an empty cluster implies a cluster with two members");
            log::debug!("k-means: cluster {c} empty, re-seeding from day {far}");
            sizes[labels[far]] -= 1;
            sizes[c] = 1;
            labels[far] = c;
            centers[c] = points[far].to_vec();
        }
        wcss.push(
            points
                .iter()
                .zip(&labels)
                .map(|(p, &c)| sq_dist(p, &centers[c]))
                .sum(),
        );
        let next: Vec<usize> = points
            .iter()
            .zip(&labels)
            .map(|(p, &c)| reassign(p, &centers, c))
            .collect();
        if next == labels {
            converged = true;
            break;
        }
        labels = next;
    }

    let mut members = vec![Vec::new(); k];
    for (i, &c) in labels.iter().enumerate() {
        members[c].push(i);
    }
    if let Some(c) = members.iter().position(Vec::is_empty) {
        // Only reachable when max_iters stops right after a reassignment.
        return Err(Error::InvalidSelection(format!(
            "cluster {c} is empty after {iterations} iterations; raise max_iters"
        )));
    }
    let medoids: Vec<usize> = members.iter().map(|m| medoid(&points, m)).collect();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&c| medoids[c]);
    let chosen: Vec<usize> = order.iter().map(|&c| medoids[c]).collect();
    let counts: Vec<usize> = order.iter().map(|&c| members[c].len()).collect();
    let assignment: Vec<usize> = labels.iter().map(|&c| medoids[c]).collect();
    let dist: Vec<f64> = (0..n)
        .map(|i| day_distance(points[i], points[assignment[i]]))
        .collect::<Result<_>>()?;
    let objective = dist.iter().sum();
    let selection = Selection {
        geometry,
        method: Method::KMeansMedoid,
        weights: weights(&counts, &geometry),
        chosen,
        assignment,
        dist,
        counts,
        objective,
        optimality: Optimality::Heuristic,
    };
    Ok(KMeansOutcome {
        selection,
        labels,
        medoids,
        wcss,
        iterations,
        converged,
    })
}

//! Choosing `k` representative periods.
//!
//! The selection problem is a p-median instance over the distance matrix:
//! pick `k` columns so that the sum over rows of the smallest chosen entry
//! is minimal. For a fixed set of columns the row-to-column assignment is
//! just a per-row argmin, so every solver here only searches over column
//! sets and then calls [`assign`].

mod brute;
mod exact;
pub(crate) mod greedy;
mod swap;

use serde::{Deserialize, Serialize};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::geometry::SliceGeometry;

pub use brute::{brute_force, brute_force_with_cap, DEFAULT_ENUMERATION_CAP};
pub use exact::{solve_exact, solve_exact_with, ExactOptions, ExactStats};
pub use greedy::{greedy_path, solve_greedy};
pub use swap::local_search_swap;

/// How much is known about a [`Selection`]'s objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Optimality {
    ProvenOptimal,
    Heuristic,
    /// Search stopped on a budget. `gap` is `(objective - lower_bound) / objective`.
    Bounded {
        lower_bound: f64,
        gap: f64,
    },
}

impl Optimality {
    pub fn label(&self) -> &'static str {
        match self {
            Optimality::ProvenOptimal => "proven-optimal",
            Optimality::Heuristic => "heuristic",
            Optimality::Bounded { .. } => "bounded",
        }
    }

    pub fn gap(&self) -> f64 {
        match self {
            Optimality::ProvenOptimal => 0.0,
            Optimality::Heuristic => f64::NAN,
            Optimality::Bounded { gap, .. } => *gap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Greedy,
    Swap,
    BruteForce,
    #[serde(rename = "kmeans-medoid")]
    KMeansMedoid,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Greedy => "greedy",
            Method::Swap => "swap",
            Method::BruteForce => "brute-force",
            Method::KMeansMedoid => "kmeans-medoid",
        }
    }
}

/// Per-segment mapping onto the chosen columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Chosen column serving each segment.
    pub assignment: Vec<usize>,
    /// `D[i, assignment[i]]`.
    pub dist: Vec<f64>,
    /// Sum of `dist` in segment order.
    pub objective: f64,
}

/// Maps every segment to its closest chosen column, lowest index on ties.
pub fn assign(d: &DistanceMatrix, chosen: &[usize]) -> Result<Assignment> {
    if chosen.is_empty() {
        return Err(Error::EmptySelection);
    }
    if let Some(&bad) = chosen.iter().find(|&&j| j >= d.m()) {
        return Err(Error::IndexOutOfRange {
            kind: "subsequence",
            index: bad,
            count: d.m(),
        });
    }
    let mut sorted = chosen.to_vec();
    sorted.sort_unstable();
    let mut assignment = Vec::with_capacity(d.n());
    let mut dist = Vec::with_capacity(d.n());
    for i in 0..d.n() {
        let row = d.row(i);
        let mut best = sorted[0];
        for &j in &sorted[1..] {
            if row[j] < row[best] {
                best = j;
            }
        }
        assignment.push(best);
        dist.push(row[best]);
    }
    let objective = dist.iter().sum();
    Ok(Assignment {
        assignment,
        dist,
        objective,
    })
}

/// Objective of a column set, summed in segment order.
///
/// Equal to `assign(d, chosen).objective` bit for bit.
pub(crate) fn objective_of(d: &DistanceMatrix, chosen: &[usize]) -> f64 {
    (0..d.n())
        .map(|i| {
            let row = d.row(i);
            chosen.iter().map(|&j| row[j]).fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Segments served by each chosen column, in `chosen` order.
pub fn segment_counts(chosen: &[usize], assignment: &[usize]) -> Vec<usize> {
    chosen
        .iter()
        .map(|&j| assignment.iter().filter(|&&a| a == j).count())
        .collect()
}

/// Period weights: segments served divided by segments per period.
///
/// `Σ w_j · (s/u) = n` holds for every complete assignment.
pub fn weights(counts: &[usize], geometry: &SliceGeometry) -> Vec<f64> {
    let span = geometry.days_per_period() as f64;
    counts.iter().map(|&c| c as f64 / span).collect()
}

/// Number of periods covering roughly `target_days` modeled days.
pub fn k_for_target_days(target_days: usize, days_per_period: usize) -> usize {
    ((target_days as f64 / days_per_period as f64).round() as usize).max(1)
}

/// A set of chosen periods with its assignment, weights and objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub geometry: SliceGeometry,
    pub method: Method,
    /// Chosen subsequence indices, ascending.
    pub chosen: Vec<usize>,
    /// Chosen column serving each segment.
    pub assignment: Vec<usize>,
    pub dist: Vec<f64>,
    /// Segments served per chosen period, aligned with `chosen`.
    pub counts: Vec<usize>,
    /// Period weights, aligned with `chosen`.
    pub weights: Vec<f64>,
    pub objective: f64,
    pub optimality: Optimality,
}

impl Selection {
    /// Builds a selection from a column set using the argmin assignment.
    pub fn from_chosen(
        d: &DistanceMatrix,
        chosen: &[usize],
        method: Method,
        optimality: Optimality,
    ) -> Result<Self> {
        let mut chosen = chosen.to_vec();
        chosen.sort_unstable();
        if chosen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSelection(
                "chosen indices must be distinct".into(),
            ));
        }
        let a = assign(d, &chosen)?;
        Ok(Self::from_parts(
            *d.geometry(),
            method,
            chosen,
            a,
            optimality,
        ))
    }

    pub(crate) fn from_parts(
        geometry: SliceGeometry,
        method: Method,
        chosen: Vec<usize>,
        a: Assignment,
        optimality: Optimality,
    ) -> Self {
        let counts = segment_counts(&chosen, &a.assignment);
        let weights = weights(&counts, &geometry);
        Self {
            geometry,
            method,
            chosen,
            assignment: a.assignment,
            dist: a.dist,
            counts,
            weights,
            objective: a.objective,
            optimality,
        }
    }

    pub fn k(&self) -> usize {
        self.chosen.len()
    }

    /// Weight of chosen column `j`, or 0 for unchosen columns.
    pub fn weight_of(&self, j: usize) -> f64 {
        self.chosen
            .iter()
            .position(|&c| c == j)
            .map_or(0.0, |p| self.weights[p])
    }
}

pub(crate) fn check_k(d: &DistanceMatrix, k: usize) -> Result<()> {
    if k == 0 || k > d.m() {
        return Err(Error::KOutOfRange { k, max: d.m() });
    }
    Ok(())
}

/// `a` strictly better than `b`: lower objective, then lexicographically smaller.
pub(crate) fn improves(obj: f64, set: &[usize], best_obj: f64, best_set: &[usize]) -> bool {
    obj < best_obj || (obj == best_obj && set < best_set)
}


#[cfg(test)]
mod tests {
    use super::fixtures::three_by_three;
    use super::*;

    #[test]
    fn assign_single_column() {
        let d = three_by_three();
        let a = assign(&d, &[1]).unwrap();
        assert_eq!(a.assignment, vec![1, 1, 1]);
        assert_eq!(a.objective, 3.0);
    }

    #[test]
    fn assign_all_columns_gives_row_minimum() {
        let d = three_by_three();
        let a = assign(&d, &[0, 1, 2]).unwrap();
        for i in 0..3 {
            assert_eq!(a.dist[i], d.row_min(i));
        }
        assert_eq!(a.objective, 0.0);
    }

    #[test]
    fn assign_ties_go_to_lowest_index() {
        let d = DistanceMatrix::from_rows(vec![
            vec![9.0, 9.0, 1.0, 9.0, 1.0],
            vec![9.0, 9.0, 3.0, 9.0, 2.0],
            vec![9.0, 9.0, 3.0, 9.0, 2.0],
            vec![9.0, 9.0, 3.0, 9.0, 2.0],
            vec![9.0, 9.0, 3.0, 9.0, 2.0],
        ])
        .unwrap();
        let a = assign(&d, &[4, 2]).unwrap();
        assert_eq!(a.assignment[0], 2);
        assert_eq!(a.assignment[1], 4);
    }

    #[test]
    fn assign_errors() {
        let d = three_by_three();
        assert!(matches!(assign(&d, &[]), Err(Error::EmptySelection)));
        assert!(assign(&d, &[3]).is_err());
    }

    #[test]
    fn weights_for_days_and_periods() {
        let g = SliceGeometry::days(8760, 1).unwrap();
        let counts = vec![100, 200, 65];
        let w = weights(&counts, &g);
        assert_eq!(w.iter().sum::<f64>(), 365.0);
        let g3 = SliceGeometry::days(8760, 3).unwrap();
        assert_eq!(weights(&[9], &g3), vec![3.0]);
        let all = weights(&[365, 0], &g3);
        assert_eq!(all[1], 0.0);
        assert!((all[0] - 365.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn k_from_target_days() {
        assert_eq!(k_for_target_days(35, 1), 35);
        assert_eq!(k_for_target_days(35, 3), 12);
        assert_eq!(k_for_target_days(36, 4), 9);
        assert_eq!(k_for_target_days(35, 5), 7);
        assert_eq!(k_for_target_days(36, 5), 7);
        assert_eq!(k_for_target_days(1, 5), 1);
    }

    #[test]
    fn from_chosen_rejects_duplicates() {
        let d = three_by_three();
        assert!(
            Selection::from_chosen(&d, &[1, 1], Method::Greedy, Optimality::Heuristic).is_err()
        );
        let s = Selection::from_chosen(&d, &[2, 0], Method::Greedy, Optimality::Heuristic).unwrap();
        assert_eq!(s.chosen, vec![0, 2]);
        assert_eq!(s.counts.iter().sum::<usize>(), 3);
        assert_eq!(s.weight_of(1), 0.0);
    }

    #[test]
    fn objective_helper_matches_assign() {
        let d = three_by_three();
        for set in [vec![0], vec![1], vec![0, 2], vec![0, 1, 2]] {
            assert_eq!(objective_of(&d, &set), assign(&d, &set).unwrap().objective);
        }
    }
}

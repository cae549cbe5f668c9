use itertools::Itertools;

use super::{assign, check_k, objective_of, Method, Optimality, Selection};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::par::{self, Execution};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

const BATCH: usize = 4096;

/// Binomial coefficient, saturating.
pub(crate) fn binomial(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((m - i) as u128) / (i as u128 + 1)
    })
}

/// Exhaustive search over all `k`-subsets, capped at
/// [`DEFAULT_ENUMERATION_CAP`] subsets.
pub fn brute_force(d: &DistanceMatrix, k: usize) -> Result<Selection> {
    brute_force_with_cap(d, k, DEFAULT_ENUMERATION_CAP, Execution::default())
}

/// Subsets are enumerated in lexicographic order and scored in batches;
/// the first subset reaching the minimum wins.
pub fn brute_force_with_cap(
    d: &DistanceMatrix,
    k: usize,
    cap: u128,
    exec: Execution,
) -> Result<Selection> {
    check_k(d, k)?;
    let count = binomial(d.m(), k);
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for batch in &(0..d.m()).combinations(k).chunks(BATCH) {
        let batch: Vec<Vec<usize>> = batch.collect();
        let scores = par::map_slice(&batch, exec, |set| objective_of(d, set));
        for (set, obj) in batch.into_iter().zip(scores) {
            if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                best = Some((obj, set));
            }
        }
    }
    let (_, chosen) = best.expect("at least one subset");
    let a = assign(d, &chosen)?;
    Ok(Selection::from_parts(
        *d.geometry(),
        Method::BruteForce,
        chosen,
        a,
        Optimality::ProvenOptimal,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::select::fixtures::three_by_three;

    #[test]
    fn binomials() {
        assert_eq!(binomial(18, 3), 816);
        assert_eq!(binomial(10, 2), 45);
        assert_eq!(binomial(5, 5), 1);
        assert_eq!(binomial(5, 0), 1);
        assert!(binomial(363, 36) > 1_000_000);
    }

    #[test]
    fn three_by_three_k1() {
        let s = brute_force(&three_by_three(), 1).unwrap();
        assert_eq!(s.chosen, vec![1]);
        assert_eq!(s.objective, 3.0);
    }

    #[test]
    fn all_columns() {
        let d = three_by_three();
        let s = brute_force(&d, 3).unwrap();
        assert_eq!(s.chosen, vec![0, 1, 2]);
        assert_eq!(s.objective, 0.0);
    }

    #[test]
    fn ties_pick_lexicographically_smallest() {
        let d = DistanceMatrix::from_rows(vec![vec![1.0; 4]; 4]).unwrap();
        assert_eq!(brute_force(&d, 2).unwrap().chosen, vec![0, 1]);
    }

    #[test]
    fn cap_is_enforced() {
        let d = DistanceMatrix::from_rows(vec![vec![0.0; 30]; 30]).unwrap();
        assert!(matches!(
            brute_force_with_cap(&d, 10, 1000, Execution::Sequential),
            Err(Error::EnumerationCap { .. })
        ));
    }
}

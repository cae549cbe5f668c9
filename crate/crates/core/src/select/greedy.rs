use super::{assign, check_k, Method, Optimality, Selection};
use crate::distance::DistanceMatrix;
use crate::error::Result;

/// Greedy picks and the objective after each pick.
///
/// Each step adds the column giving the lowest cumulative objective,
/// lowest index on ties.
pub fn greedy_path(d: &DistanceMatrix, k: usize) -> Result<Vec<(usize, f64)>> {
    check_k(d, k)?;
    Ok(grow(d, &[], k))
}

/// Greedy additions on top of `base` until `k` columns are taken.
pub(crate) fn grow(d: &DistanceMatrix, base: &[usize], k: usize) -> Vec<(usize, f64)> {
    let (n, m) = (d.n(), d.m());
    let mut current = vec![f64::INFINITY; n];
    let mut taken = vec![false; m];
    for &j in base {
        taken[j] = true;
        for (i, c) in current.iter_mut().enumerate() {
            *c = c.min(d.get(i, j));
        }
    }
    let mut path = Vec::with_capacity(k.saturating_sub(base.len()));
    for _ in base.len()..k {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..m).filter(|&j| !taken[j]) {
            let obj: f64 = (0..n).map(|i| current[i].min(d.get(i, j))).sum();
            if best.is_none_or(|(_, b)| obj < b) {
                best = Some((j, obj));
            }
        }
        let (j, obj) = best.expect("k <= m leaves a free column");
        taken[j] = true;
        for (i, c) in current.iter_mut().enumerate() {
            *c = c.min(d.get(i, j));
        }
        path.push((j, obj));
    }
    path
}

pub fn solve_greedy(d: &DistanceMatrix, k: usize) -> Result<Selection> {
    let mut chosen: Vec<usize> = greedy_path(d, k)?.into_iter().map(|(j, _)| j).collect();
    chosen.sort_unstable();
    let a = assign(d, &chosen)?;
    Ok(Selection::from_parts(
        *d.geometry(),
        Method::Greedy,
        chosen,
        a,
        Optimality::Heuristic,
    ))
}

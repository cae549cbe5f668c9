use super::{assign, Method, Optimality, Selection};
use crate::distance::DistanceMatrix;
use crate::error::Result;

/// Best-improvement swap local search.
///
/// Each pass evaluates every (chosen out, unchosen in) pair, scanning the
/// outgoing column ascending and then the incoming one, and applies the
/// pair with the lowest resulting objective if it is strictly better.
pub fn local_search_swap(d: &DistanceMatrix, start: &Selection) -> Result<Selection> {
    let chosen = improve(d, start.chosen.clone(), start.objective);
    if chosen == start.chosen {
        return Ok(Selection {
            method: Method::Swap,
            ..start.clone()
        });
    }
    let a = assign(d, &chosen)?;
    Ok(Selection::from_parts(
        *d.geometry(),
        Method::Swap,
        chosen,
        a,
        Optimality::Heuristic,
    ))
}

/// Runs swaps to a local optimum and returns the sorted column set.
pub(crate) fn improve(
    d: &DistanceMatrix,
    mut chosen: Vec<usize>,
    mut objective: f64,
) -> Vec<usize> {
    let (n, m) = (d.n(), d.m());
    chosen.sort_unstable();
    let mut in_set = vec![false; m];
    let mut nearest = vec![(0usize, 0.0f64); n];
    let mut second = vec![0.0f64; n];
    loop {
        in_set.iter_mut().for_each(|b| *b = false);
        chosen.iter().for_each(|&j| in_set[j] = true);
        for i in 0..n {
            let row = d.row(i);
            let (mut b1, mut c1, mut b2) = (f64::INFINITY, usize::MAX, f64::INFINITY);
            for &j in &chosen {
                let v = row[j];
                if v < b1 {
                    b2 = b1;
                    b1 = v;
                    c1 = j;
                } else if v < b2 {
                    b2 = v;
                }
            }
            nearest[i] = (c1, b1);
            second[i] = b2;
        }

        let mut best: Option<(usize, usize, f64)> = None;
        for (slot, &out) in chosen.iter().enumerate() {
            for incoming in (0..m).filter(|&j| !in_set[j]) {
                let obj: f64 = (0..n)
                    .map(|i| {
                        let keep = if nearest[i].0 == out {
                            second[i]
                        } else {
                            nearest[i].1
                        };
                        keep.min(d.get(i, incoming))
                    })
                    .sum();
                if best.is_none_or(|(_, _, b)| obj < b) {
                    best = Some((slot, incoming, obj));
                }
            }
        }
        match best {
            Some((slot, incoming, obj)) if obj < objective => {
                chosen[slot] = incoming;
                chosen.sort_unstable();
                objective = obj;
            }
            _ => return chosen,
        }
    }
}

//! Exact p-median search over column sets.
//!
//! Depth-first branch-and-bound on column inclusion. Each node is bounded
//! by the Lagrangian dual obtained by relaxing the "every segment assigned
//! once" rows: for multipliers `λ` the relaxed problem separates into
//! `Σ λ_i` plus the `k` cheapest column scores
//! `ρ_j = Σ_i min(0, D[i, j] - λ_i)`, and subgradient ascent tightens it to
//! the LP bound. The same scores give reduced-cost tests that fix columns
//! in or out of a subtree.
//!
//! Among co-optimal column sets the lexicographically smallest one is
//! returned: a subtree whose bound ties the incumbent is only pruned once
//! its smallest reachable set is not lexicographically below the incumbent.

use std::time::{Duration, Instant};

use super::greedy::greedy_path;
use super::swap::improve;
use super::{assign, check_k, improves, objective_of, Method, Optimality, Selection};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};

/// Budgets and effort knobs for [`solve_exact_with`].
#[derive(Debug, Clone)]
pub struct ExactOptions {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
    pub root_iterations: usize,
    pub node_iterations: usize,
    /// Extra starting incumbent of exactly `k` distinct columns.
    pub warm_start: Option<Vec<usize>>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            node_limit: 5_000_000,
            time_limit: None,
            root_iterations: 3000,
            node_iterations: 250,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactStats {
    pub nodes: u64,
    pub root_bound: f64,
    pub fixed_at_root: usize,
    pub elapsed: Duration,
}

/// Proven-optimal selection with default budgets.
pub fn solve_exact(d: &DistanceMatrix, k: usize) -> Result<Selection> {
    solve_exact_with(d, k, &ExactOptions::default()).map(|(s, _)| s)
}

pub fn solve_exact_with(
    d: &DistanceMatrix,
    k: usize,
    opts: &ExactOptions,
) -> Result<(Selection, ExactStats)> {
    check_k(d, k)?;
    let started = Instant::now();
    let mut search = Search::new(d, k)?;
    if let Some(start) = &opts.warm_start {
        search.warm_start(start)?;
    }
    let outcome = search.run(opts, started);
    let stats = ExactStats {
        nodes: search.nodes,
        root_bound: search.root_bound,
        fixed_at_root: search.fixed_at_root,
        elapsed: started.elapsed(),
    };
    let optimality = match outcome {
        None => Optimality::ProvenOptimal,
        Some(lower) => {
            let lower = lower.clamp(0.0, search.best_obj);
            let gap = if search.best_obj > 0.0 {
                (search.best_obj - lower) / search.best_obj
            } else {
                0.0
            };
            Optimality::Bounded {
                lower_bound: lower,
                gap,
            }
        }
    };
    let a = assign(d, &search.best_set)?;
    let selection = Selection::from_parts(
        *d.geometry(),
        Method::Exact,
        search.best_set.clone(),
        a,
        optimality,
    );
    Ok((selection, stats))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Col {
    Free,
    In,
    Out,
}

struct Node {
    status: Vec<Col>,
    lambda: Vec<f64>,
    bound: f64,
}

/// Result of one subgradient run at the best multipliers found.
struct DualBound {
    value: f64,
    rho: Vec<f64>,
    /// Free columns picked by the relaxation, ascending by (ρ, j).
    picked: Vec<usize>,
    /// Cheapest free column left out, if any.
    next: Option<usize>,
}

struct Search<'a> {
    d: &'a DistanceMatrix,
    k: usize,
    best_obj: f64,
    best_set: Vec<usize>,
    tol: f64,
    nodes: u64,
    root_bound: f64,
    fixed_at_root: usize,
    rho: Vec<f64>,
    order: Vec<usize>,
    /// Per row, `(D[i, j], j)` ascending, flattened.
    sorted: Vec<(f64, u32)>,
}

impl<'a> Search<'a> {
    fn new(d: &'a DistanceMatrix, k: usize) -> Result<Self> {
        let path = greedy_path(d, k)?;
        let greedy: Vec<usize> = path.iter().map(|&(j, _)| j).collect();
        let greedy_obj = path.last().map_or(f64::INFINITY, |p| p.1);
        let best_set = improve(d, greedy, greedy_obj);
        let best_obj = objective_of(d, &best_set);
        // Ties are judged relative to the single-period objective, which
        // scales with D and bounds every k.
        let tol = 1e-10 * path[0].1;
        Ok(Self {
            d,
            k,
            best_obj,
            best_set,
            tol,
            nodes: 0,
            root_bound: f64::NEG_INFINITY,
            fixed_at_root: 0,
            rho: vec![0.0; d.m()],
            order: Vec::with_capacity(d.m()),
            sorted: sorted_rows(d),
        })
    }

    fn warm_start(&mut self, start: &[usize]) -> Result<()> {
        let mut set = start.to_vec();
        set.sort_unstable();
        set.dedup();
        if set.len() != self.k || set.last().is_some_and(|&j| j >= self.d.m()) {
            return Err(Error::InvalidSelection(format!(
                "warm start needs {} distinct periods below {}",
                self.k,
                self.d.m()
            )));
        }
        let obj = objective_of(self.d, &set);
        let polished = improve(self.d, set.clone(), obj);
        self.offer(&set);
        self.offer(&polished);
        Ok(())
    }

    fn offer(&mut self, set: &[usize]) {
        let obj = objective_of(self.d, set);
        if improves(obj, set, self.best_obj, &self.best_set) {
            self.best_obj = obj;
            self.best_set = set.to_vec();
        }
    }

    /// Smallest column set, in lexicographic order, reachable below `status`.
    fn lex_floor(&self, status: &[Col]) -> Vec<usize> {
        let n_in = status.iter().filter(|&&c| c == Col::In).count();
        let mut free_left = self.k.saturating_sub(n_in);
        let mut out = Vec::with_capacity(self.k);
        for (j, &c) in status.iter().enumerate() {
            match c {
                Col::In => out.push(j),
                Col::Free if free_left > 0 => {
                    out.push(j);
                    free_left -= 1;
                }
                _ => {}
            }
        }
        out
    }

    fn worth_exploring(&self, bound: f64, status: &[Col]) -> bool {
        if bound < self.best_obj - self.tol {
            return true;
        }
        if bound > self.best_obj + self.tol {
            return false;
        }
        self.lex_floor(status) < self.best_set
    }

    /// Returns `None` when the search finished, or the smallest open bound
    /// when a budget stopped it.
    fn run(&mut self, opts: &ExactOptions, started: Instant) -> Option<f64> {
        let (n, m, k) = (self.d.n(), self.d.m(), self.k);
        if k == m {
            self.best_set = (0..m).collect();
            self.best_obj = objective_of(self.d, &self.best_set);
            return None;
        }
        let incumbent = assign(self.d, &self.best_set).expect("valid incumbent");
        let mut stack = vec![Node {
            status: vec![Col::Free; m],
            lambda: incumbent.dist,
            bound: f64::NEG_INFINITY,
        }];
        debug_assert_eq!(stack[0].lambda.len(), n);

        while let Some(node) = stack.pop() {
            let over_nodes = self.nodes >= opts.node_limit;
            let over_time = opts.time_limit.is_some_and(|t| started.elapsed() >= t);
            if over_nodes || over_time {
                stack.push(node);
                let open = stack.iter().map(|s| s.bound).fold(f64::INFINITY, f64::min);
                return Some(open);
            }
            let is_root = self.nodes == 0;
            self.nodes += 1;
            self.process(node, is_root, opts, &mut stack);
        }
        None
    }

    fn process(&mut self, node: Node, is_root: bool, opts: &ExactOptions, stack: &mut Vec<Node>) {
        let Node {
            mut status,
            mut lambda,
            bound: inherited,
        } = node;
        if !self.worth_exploring(inherited, &status) {
            return;
        }
        if self.settle_leaf(&status) {
            return;
        }

        let iterations = if is_root {
            opts.root_iterations
        } else {
            opts.node_iterations
        };
        let dual = self.subgradient(
            &mut lambda,
            &status,
            iterations,
            if is_root { 2.0 } else { 0.5 },
        );
        let bound = dual.value.max(inherited);
        if is_root {
            self.root_bound = bound;
        }

        let relaxed: Vec<usize> = {
            let mut s: Vec<usize> = (0..status.len())
                .filter(|&j| status[j] == Col::In)
                .chain(dual.picked.iter().copied())
                .collect();
            s.sort_unstable();
            s
        };
        self.offer(&relaxed);
        if is_root {
            let obj = objective_of(self.d, &relaxed);
            let polished = improve(self.d, relaxed.clone(), obj);
            self.offer(&polished);
        }
        if !self.worth_exploring(bound, &status) {
            return;
        }

        // Reduced-cost tests: a column is fixed when every completion that
        // flips it is strictly worse than the incumbent.
        let cutoff = self.best_obj + self.tol;
        let last = dual.picked.last().map(|&j| dual.rho[j]);
        let next = dual.next.map(|j| dual.rho[j]);
        let mut fixed = 0;
        for (j, st) in status.iter_mut().enumerate() {
            if *st != Col::Free {
                continue;
            }
            let picked = dual.picked.contains(&j);
            if picked {
                if let Some(nx) = next {
                    if dual.value - dual.rho[j] + nx > cutoff {
                        *st = Col::In;
                        fixed += 1;
                    }
                }
            } else if let Some(l) = last {
                if dual.value - l + dual.rho[j] > cutoff {
                    *st = Col::Out;
                    fixed += 1;
                }
            }
        }
        if is_root {
            self.fixed_at_root = fixed;
        }
        if fixed > 0 && (!self.worth_exploring(bound, &status) || self.settle_leaf(&status)) {
            return;
        }

        // Branch on the picked free column whose removal costs the most.
        let branch = dual
            .picked
            .iter()
            .copied()
            .filter(|&j| status[j] == Col::Free)
            .map(|j| {
                let out_bound = next.map_or(f64::INFINITY, |nx| dual.value - dual.rho[j] + nx);
                (j, out_bound)
            })
            .fold(None::<(usize, f64)>, |acc, (j, b)| match acc {
                Some((_, best)) if best >= b => acc,
                _ => Some((j, b)),
            });
        let (j, out_bound) = match branch {
            Some(x) => x,
            None => {
                // Every picked column got fixed in; branch on the cheapest free one.
                let j = (0..status.len())
                    .filter(|&j| status[j] == Col::Free)
                    .min_by(|&a, &b| dual.rho[a].total_cmp(&dual.rho[b]).then(a.cmp(&b)))
                    .expect("non-leaf node has a free column");
                let in_bound = last.map_or(bound, |l| dual.value - l + dual.rho[j]);
                let mut with = status.clone();
                with[j] = Col::In;
                let mut without = status;
                without[j] = Col::Out;
                stack.push(Node {
                    status: without,
                    lambda: lambda.clone(),
                    bound,
                });
                stack.push(Node {
                    status: with,
                    lambda,
                    bound: in_bound.max(bound),
                });
                return;
            }
        };
        let mut with = status.clone();
        with[j] = Col::In;
        let mut without = status;
        without[j] = Col::Out;
        stack.push(Node {
            status: without,
            lambda: lambda.clone(),
            bound: out_bound.max(bound),
        });
        stack.push(Node {
            status: with,
            lambda,
            bound,
        });
    }

    /// Evaluates nodes whose completion is forced. Returns true if handled.
    fn settle_leaf(&mut self, status: &[Col]) -> bool {
        let n_in = status.iter().filter(|&&c| c == Col::In).count();
        let n_free = status.iter().filter(|&&c| c == Col::Free).count();
        if n_in > self.k || n_in + n_free < self.k {
            return true;
        }
        if n_in == self.k || n_in + n_free == self.k {
            let set: Vec<usize> = (0..status.len())
                .filter(|&j| match status[j] {
                    Col::In => true,
                    Col::Free => n_in < self.k,
                    Col::Out => false,
                })
                .collect();
            self.offer(&set);
            return true;
        }
        false
    }

    /// Lagrangian value at `lambda`; fills `self.rho` and `self.order`.
    fn evaluate(&mut self, lambda: &[f64], status: &[Col], need: usize) -> f64 {
        let m = self.d.m();
        self.rho.iter_mut().for_each(|r| *r = 0.0);
        for (&li, row) in lambda.iter().zip(self.sorted.chunks_exact(m)) {
            for &(v, j) in row {
                if v >= li {
                    break;
                }
                self.rho[j as usize] += v - li;
            }
        }
        self.order.clear();
        self.order
            .extend((0..m).filter(|&j| status[j] == Col::Free));
        let rho = &self.rho;
        self.order
            .sort_unstable_by(|&a, &b| rho[a].total_cmp(&rho[b]).then(a.cmp(&b)));
        let fixed_in: f64 = (0..m)
            .filter(|&j| status[j] == Col::In)
            .map(|j| rho[j])
            .sum();
        let picked: f64 = self.order[..need].iter().map(|&j| rho[j]).sum();
        lambda.iter().sum::<f64>() + fixed_in + picked
    }

    fn subgradient(
        &mut self,
        lambda: &mut [f64],
        status: &[Col],
        iterations: usize,
        theta0: f64,
    ) -> DualBound {
        let (n, m) = (self.d.n(), self.d.m());
        let need = self.k - status.iter().filter(|&&c| c == Col::In).count();
        let mut theta = theta0;
        let patience = 12;
        let mut stale = 0;
        let mut best_value = f64::NEG_INFINITY;
        let mut best_lambda = lambda.to_vec();
        let mut g = vec![0.0; n];
        let mut active: Vec<usize> = Vec::with_capacity(self.k);

        for _ in 0..iterations.max(1) {
            let value = self.evaluate(lambda, status, need);
            if value > best_value {
                if value > best_value + 1e-12 * value.abs() {
                    stale = 0;
                } else {
                    stale += 1;
                }
                best_value = value;
                best_lambda.copy_from_slice(lambda);
            } else {
                stale += 1;
            }
            if best_value > self.best_obj + self.tol {
                break;
            }
            active.clear();
            active.extend((0..m).filter(|&j| status[j] == Col::In));
            active.extend_from_slice(&self.order[..need]);
            let mut norm2 = 0.0;
            for i in 0..n {
                let row = self.d.row(i);
                let covered = active.iter().filter(|&&j| row[j] < lambda[i]).count();
                g[i] = 1.0 - covered as f64;
                norm2 += g[i] * g[i];
            }
            if norm2 == 0.0 {
                break;
            }
            if stale >= patience {
                theta *= 0.5;
                stale = 0;
                if theta < 1e-5 {
                    break;
                }
            }
            let gap = (self.best_obj - value).max(self.tol.max(1e-12 * value.abs()));
            let step = theta * gap / norm2;
            for i in 0..n {
                lambda[i] += step * g[i];
            }
        }

        lambda.copy_from_slice(&best_lambda);
        let value = self.evaluate(lambda, status, need);
        let picked = self.order[..need].to_vec();
        let next = self.order.get(need).copied();
        DualBound {
            value,
            rho: self.rho.clone(),
            picked,
            next,
        }
    }
}

fn sorted_rows(d: &DistanceMatrix) -> Vec<(f64, u32)> {
    let mut out = Vec::with_capacity(d.n() * d.m());
    for i in 0..d.n() {
        let start = out.len();
        out.extend(d.row(i).iter().enumerate().map(|(j, &v)| (v, j as u32)));
        out[start..].sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    out
}

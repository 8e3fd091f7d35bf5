//! Mixed-binary solving: branch-and-bound and an exhaustive enumeration
//! oracle that shares nothing with it beyond the LP solver.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

use log::{debug, warn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve_lp_with, verify_certificate, BoundOverride, LpOptions, LpResult, LpStatus};
use crate::model::{LinearModel, VarKind};

pub const INT_TOL: f64 = 1e-6;
pub const ABS_GAP: f64 = 1e-6;
pub const REL_GAP: f64 = 1e-9;
pub const DEFAULT_BINARY_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

/// Search statistics shared by both solvers.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SearchStats {
    pub nodes: usize,
    pub lp_solves: usize,
    pub certificates_checked: usize,
    pub certificate_failures: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    pub objective: f64,
    /// Values in model column order; see [`Solution::value`] for lookups.
    pub values: Vec<f64>,
    pub names: Vec<String>,
    pub open_hubs: Vec<usize>,
    pub collaborative_hubs: Vec<usize>,
    pub noncollaborative_hubs: Vec<usize>,
    pub stats: SearchStats,
    /// Every incumbent accepted during the search, in acceptance order.
    pub incumbents: Vec<Vec<f64>>,
}

impl Solution {
    pub fn infeasible(model: &LinearModel, stats: SearchStats) -> Self {
        Self {
            status: SolveStatus::Infeasible,
            objective: f64::INFINITY,
            values: Vec::new(),
            names: model.variables().iter().map(|v| v.name.clone()).collect(),
            open_hubs: Vec::new(),
            collaborative_hubs: Vec::new(),
            noncollaborative_hubs: Vec::new(),
            stats,
            incumbents: Vec::new(),
        }
    }

    pub fn from_values(model: &LinearModel, values: Vec<f64>, stats: SearchStats, incumbents: Vec<Vec<f64>>) -> Self {
        let objective = model.objective_value(&values);
        let names: Vec<String> = model.variables().iter().map(|v| v.name.clone()).collect();
        let hubs = |prefix: &str| -> Vec<usize> {
            names
                .iter()
                .zip(&values)
                .filter_map(|(name, &v)| {
                    let k = name.strip_prefix(prefix)?.strip_suffix(']')?.parse().ok()?;
                    (v >= 0.5).then_some(k)
                })
                .collect()
        };
        Self {
            status: SolveStatus::Optimal,
            objective,
            open_hubs: hubs("H["),
            collaborative_hubs: hubs("I["),
            noncollaborative_hubs: hubs("T["),
            values,
            names,
            stats,
            incumbents,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        let j = self.names.iter().position(|n| n == name)?;
        self.values.get(j).copied()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MilpOptions {
    pub int_tol: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
    /// Stop with an error once this many nodes have been explored.
    pub max_nodes: usize,
    pub verbose: bool,
}

impl Default for MilpOptions {
    fn default() -> Self {
        Self {
            int_tol: INT_TOL,
            abs_gap: ABS_GAP,
            rel_gap: REL_GAP,
            max_nodes: 1_000_000,
            verbose: false,
        }
    }
}

impl MilpOptions {
    fn gap(&self, incumbent: f64) -> f64 {
        self.abs_gap.max(self.rel_gap * incumbent.abs())
    }
}

struct Node {
    bound: f64,
    depth: usize,
    id: usize,
    fixings: Vec<BoundOverride>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap order: lowest bound first, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

static CERTIFICATES_CHECKED: AtomicUsize = AtomicUsize::new(0);
static CERTIFICATE_FAILURES: AtomicUsize = AtomicUsize::new(0);

/// Process-wide `(checked, failed)` certificate counts over every LP solved
/// by either solver.
pub fn certificate_counters() -> (usize, usize) {
    (CERTIFICATES_CHECKED.load(AtomicOrdering::Relaxed), CERTIFICATE_FAILURES.load(AtomicOrdering::Relaxed))
}

/// Solves an LP and checks its optimality certificate.
fn checked_lp(model: &LinearModel, relax: bool, bounds: &[BoundOverride], opts: &MilpOptions, stats: &mut SearchStats) -> Result<LpResult> {
    let lp = solve_lp_with(model, LpOptions { relax_binaries: relax, verbose: opts.verbose }, bounds)?;
    stats.lp_solves += 1;
    if lp.status == LpStatus::Optimal {
        stats.certificates_checked += 1;
        CERTIFICATES_CHECKED.fetch_add(1, AtomicOrdering::Relaxed);
        let cert = verify_certificate(model, &lp);
        if !cert.pass {
            stats.certificate_failures += 1;
            CERTIFICATE_FAILURES.fetch_add(1, AtomicOrdering::Relaxed);
            warn!("LP certificate failed: {:?}", cert.failures);
        }
    }
    Ok(lp)
}

pub fn solve_milp(model: &LinearModel) -> Result<Solution> {
    solve_milp_with(model, &MilpOptions::default())
}

/// Best-bound branch-and-bound on the binary columns.
///
/// Branches on the most fractional binary (lowest index on ties). Integral
/// LP solutions are re-solved with the binaries fixed at their rounded
/// values, and the fixed LP must pass certificate replay before it becomes
/// the incumbent.
pub fn solve_milp_with(model: &LinearModel, opts: &MilpOptions) -> Result<Solution> {
    let start = Instant::now();
    let binaries = model.binary_indices();
    let mut stats = SearchStats::default();
    let mut incumbent: Option<LpResult> = None;
    let mut history: Vec<Vec<f64>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut next_id = 0usize;
    heap.push(Node { bound: f64::NEG_INFINITY, depth: 0, id: next_id, fixings: Vec::new() });
    next_id += 1;

    while let Some(node) = heap.pop() {
        let cutoff = incumbent.as_ref().map(|inc| inc.objective - opts.gap(inc.objective));
        if let Some(c) = cutoff {
            if node.bound >= c {
                continue;
            }
        }
        if stats.nodes >= opts.max_nodes {
            return Err(Error::NumericalBreakdown { iterations: stats.nodes });
        }
        stats.nodes += 1;
        let lp = checked_lp(model, true, &node.fixings, opts, &mut stats)?;
        match lp.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Err(Error::InvalidModel("LP relaxation is unbounded".into()));
            }
            LpStatus::Optimal => {}
        }
        if let Some(c) = cutoff {
            if lp.objective >= c {
                continue;
            }
        }

        let mut branch: Option<(usize, f64)> = None;
        for &j in &binaries {
            let v = lp.values[j];
            let frac = (v - v.round()).abs();
            if frac > opts.int_tol && branch.map_or(true, |(_, f)| frac > f) {
                branch = Some((j, frac));
            }
        }

        match branch {
            None => {
                let fixed: Vec<BoundOverride> = binaries
                    .iter()
                    .map(|&j| {
                        let v = lp.values[j].round();
                        (j, v, v)
                    })
                    .collect();
                let exact = checked_lp(model, false, &fixed, opts, &mut stats)?;
                if exact.status != LpStatus::Optimal {
                    warn!("integral relaxation point could not be re-solved with fixed binaries");
                    continue;
                }
                if !verify_certificate(model, &exact).pass {
                    continue;
                }
                let better = incumbent.as_ref().map_or(true, |inc| exact.objective < inc.objective);
                if better {
                    debug!("node {}: new incumbent {:.9}", stats.nodes, exact.objective);
                    history.push(exact.values.clone());
                    incumbent = Some(exact);
                }
            }
            Some((j, _)) => {
                for (lo, hi) in [(0.0, 0.0), (1.0, 1.0)] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, lo, hi));
                    heap.push(Node { bound: lp.objective, depth: node.depth + 1, id: next_id, fixings });
                    next_id += 1;
                }
            }
        }
    }

    stats.wall_time = start.elapsed();
    Ok(match incumbent {
        Some(inc) => Solution::from_values(model, inc.values, stats, history),
        None => Solution::infeasible(model, stats),
    })
}

/// Exhaustive oracle: one LP per binary assignment that satisfies every
/// row made only of binary columns.
pub fn solve_by_enumeration(model: &LinearModel, binary_cap: usize) -> Result<Solution> {
    let start = Instant::now();
    let binaries = model.binary_indices();
    if binaries.len() > binary_cap {
        return Err(Error::CapExceeded { binaries: binaries.len(), cap: binary_cap });
    }
    let pure_rows: Vec<_> = model
        .constraints()
        .iter()
        .filter(|c| c.terms.iter().all(|&(j, _)| model.variables()[j].kind == VarKind::Binary))
        .collect();

    let opts = MilpOptions::default();
    let mut stats = SearchStats::default();
    let mut best: Option<LpResult> = None;
    let mut history = Vec::new();
    let mut assignment = vec![0.0; model.num_vars()];
    for code in 0u64..(1u64 << binaries.len()) {
        for (p, &j) in binaries.iter().enumerate() {
            assignment[j] = ((code >> p) & 1) as f64;
        }
        stats.nodes += 1;
        if pure_rows.iter().any(|c| c.violation(&assignment) > 1e-9) {
            continue;
        }
        let fixed: Vec<BoundOverride> = binaries.iter().map(|&j| (j, assignment[j], assignment[j])).collect();
        let lp = checked_lp(model, false, &fixed, &opts, &mut stats)?;
        match lp.status {
            LpStatus::Optimal => {
                if best.as_ref().map_or(true, |b| lp.objective < b.objective) {
                    history.push(lp.values.clone());
                    best = Some(lp);
                }
            }
            LpStatus::Infeasible => {}
            LpStatus::Unbounded => return Err(Error::InvalidModel("LP with fixed binaries is unbounded".into())),
        }
    }
    stats.wall_time = start.elapsed();
    Ok(match best {
        Some(b) => Solution::from_values(model, b.values, stats, history),
        None => Solution::infeasible(model, stats),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Relation;

    /// Small knapsack: max 5a + 4b + 3c s.t. 2a + 3b + c <= 4, plus a
    /// continuous slack-like variable that must cover a - c.
    fn knapsack() -> LinearModel {
        let mut m = LinearModel::new();
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        let c = m.add_binary("c");
        let s = m.add_continuous("s");
        m.add_constraint("cap", [(a, 2.0), (b, 3.0), (c, 1.0)], Relation::Le, 4.0);
        m.add_constraint("cover", [(s, 1.0), (a, -1.0), (c, 1.0)], Relation::Ge, 0.0);
        m.set_objective([(a, -5.0), (b, -4.0), (c, -3.0), (s, 0.5)]);
        m
    }

    #[test]
    fn branch_and_bound_matches_enumeration() {
        let m = knapsack();
        let bb = solve_milp(&m).unwrap();
        let en = solve_by_enumeration(&m, DEFAULT_BINARY_CAP).unwrap();
        // a + c: 5 + 3 - 0 (s = 0) = -8; a + b infeasible; b + c = -7.
        assert!((bb.objective + 8.0).abs() < 1e-9);
        assert!((en.objective + 8.0).abs() < 1e-9);
        assert_eq!(bb.stats.certificate_failures, 0);
        assert!(m.check_feasibility(&bb.values).unwrap().is_empty());
    }

    #[test]
    fn infeasible_after_exhaustion() {
        let mut m = LinearModel::new();
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        m.add_constraint("both", [(a, 1.0), (b, 1.0)], Relation::Ge, 1.5);
        m.add_constraint("one", [(a, 1.0), (b, 1.0)], Relation::Le, 1.0);
        let en = solve_by_enumeration(&m, 4).unwrap();
        assert_eq!(en.status, SolveStatus::Infeasible);
        assert_eq!(en.stats.nodes, 4);
        assert_eq!(solve_milp(&m).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn cap_is_enforced() {
        let mut m = LinearModel::new();
        for i in 0..5 {
            m.add_binary(format!("b{i}"));
        }
        assert!(matches!(solve_by_enumeration(&m, 4), Err(Error::CapExceeded { binaries: 5, cap: 4 })));
    }

    #[test]
    fn node_order_is_best_bound_then_depth() {
        let mk = |bound, depth, id| Node { bound, depth, id, fixings: vec![] };
        let mut heap = BinaryHeap::new();
        heap.push(mk(2.0, 5, 0));
        heap.push(mk(1.0, 1, 1));
        heap.push(mk(1.0, 3, 2));
        heap.push(mk(1.0, 3, 3));
        let order: Vec<usize> = std::iter::from_fn(|| heap.pop().map(|n| n.id)).collect();
        assert_eq!(order, vec![2, 3, 1, 0]);
    }
}

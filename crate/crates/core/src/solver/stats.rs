use std::time::Duration;

use crate::dag::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    LimitReached,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::LimitReached => "limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<W> {
    pub status: Status,
    pub path: Option<Path<W>>,
    /// Complete assignment satisfying the formula, agreeing with `path`.
    pub witness: Option<Vec<bool>>,
}

impl<W: Copy> Solution<W> {
    pub fn cost(&self) -> Option<W> {
        self.path.as_ref().map(|p| p.weight)
    }
}

/// How a dequeued node was disposed of. Every node gets exactly one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Outcomes {
    pub pruned_by_bound: u64,
    pub logic_infeasible: u64,
    pub graph_infeasible: u64,
    pub incumbent_updates: u64,
    pub branched: u64,
}

impl Outcomes {
    pub fn total(&self) -> u64 {
        self.pruned_by_bound + self.logic_infeasible + self.graph_infeasible + self.incumbent_updates + self.branched
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats<W> {
    pub nodes: u64,
    /// Shortest-path searches, look-ahead searches included.
    pub sp_searches: u64,
    /// Searches made by strong-branching look-ahead.
    pub lookahead_searches: u64,
    pub arc_relaxations: u64,
    pub time_total: Duration,
    pub time_sp: Duration,
    /// `(node count, cost)` at every incumbent improvement.
    pub incumbent_history: Vec<(u64, W)>,
    pub outcomes: Outcomes,
    pub parent_path_reuses: u64,
    /// Relaxation paths computed more than once within the solve.
    pub duplicate_paths: u64,
    /// Graph conflicts that came out empty and fell back to a standard one.
    pub conflict_fallbacks: u64,
    /// Largest dual bound (minimum relaxation value of the open nodes) seen
    /// at a dequeue.
    pub peak_dual_bound: Option<W>,
    pub max_depth: u32,
}

impl<W> Default for SolveStats<W> {
    fn default() -> Self {
        SolveStats {
            nodes: 0,
            sp_searches: 0,
            lookahead_searches: 0,
            arc_relaxations: 0,
            time_total: Duration::ZERO,
            time_sp: Duration::ZERO,
            incumbent_history: Vec::new(),
            outcomes: Outcomes::default(),
            parent_path_reuses: 0,
            duplicate_paths: 0,
            conflict_fallbacks: 0,
            peak_dual_bound: None,
            max_depth: 0,
        }
    }
}

use std::cmp::Ordering;

use super::config::NodeRule;
use crate::scalar::Weight;

pub type NodeId = usize;

/// What a node rule sees of an open node. `relaxation` and `violations`
/// describe the parent's path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<W> {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub relaxation: W,
    pub violations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionContext<W> {
    /// The node processed last and its parent.
    pub current: Option<NodeId>,
    pub current_parent: Option<NodeId>,
    pub incumbent: Option<W>,
    /// Root path weight `w(p⁰)` and its violation count `v₀`.
    pub root: Option<(W, usize)>,
    /// Consecutive child selections made by the hybrid rule.
    pub plunge_depth: u32,
    pub hybrid_depth: u32,
}

impl<W> Default for SelectionContext<W> {
    fn default() -> Self {
        SelectionContext {
            current: None,
            current_parent: None,
            incumbent: None,
            root: None,
            plunge_depth: 0,
            hybrid_depth: 4,
        }
    }
}

fn argmin_by<W>(open: &[Candidate<W>], mut cmp: impl FnMut(&Candidate<W>, &Candidate<W>) -> Ordering) -> usize {
    let mut best = 0;
    for i in 1..open.len() {
        let o = cmp(&open[i], &open[best]).then_with(|| open[i].id.cmp(&open[best].id));
        if o == Ordering::Less {
            best = i;
        }
    }
    best
}

fn best_first<W: Weight>(open: &[Candidate<W>]) -> usize {
    argmin_by(open, |a, b| a.relaxation.total_cmp(&b.relaxation))
}

/// Newest open child of `parent`.
fn newest_child<W>(open: &[Candidate<W>], parent: Option<NodeId>) -> Option<usize> {
    let parent = parent?;
    open.iter()
        .enumerate()
        .filter(|(_, c)| c.parent == Some(parent))
        .max_by_key(|(_, c)| c.id)
        .map(|(i, _)| i)
}

/// Position in `open` of the node chosen by `rule`. Ties go to the node
/// queued first, except for the depth-first rules, which take the newest.
///
/// Panics if `open` is empty.
pub fn select_node<W: Weight>(open: &[Candidate<W>], rule: NodeRule, ctx: &SelectionContext<W>) -> usize {
    assert!(!open.is_empty(), "selecting from an empty queue");
    match rule {
        NodeRule::Dfs => argmin_by(open, |a, b| b.id.cmp(&a.id)),
        NodeRule::MostFeasible => argmin_by(open, |a, b| a.violations.cmp(&b.violations)),
        NodeRule::BestFirst => best_first(open),
        NodeRule::BestFirstPlunge => newest_child(open, ctx.current)
            .or_else(|| newest_child(open, ctx.current_parent))
            .unwrap_or_else(|| best_first(open)),
        NodeRule::Hybrid => {
            if ctx.plunge_depth < ctx.hybrid_depth {
                if let Some(i) = newest_child(open, ctx.current) {
                    return i;
                }
            }
            best_first(open)
        }
        NodeRule::BestProjection => match (ctx.incumbent, ctx.root) {
            (Some(best), Some((w0, v0))) if v0 > 0 => {
                let rate = (best.as_f64() - w0.as_f64()) / v0 as f64;
                let score = |c: &Candidate<W>| c.relaxation.as_f64() + rate * c.violations as f64;
                argmin_by(open, |a, b| score(a).total_cmp(&score(b)))
            }
            _ => argmin_by(open, |a, b| {
                a.violations
                    .cmp(&b.violations)
                    .then_with(|| a.relaxation.total_cmp(&b.relaxation))
            }),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(id: NodeId, parent: Option<NodeId>, relaxation: i64, violations: usize) -> Candidate<i64> {
        Candidate {
            id,
            parent,
            relaxation,
            violations,
        }
    }

    #[test]
    fn best_first_takes_minimum() {
        let open = [cand(1, Some(0), 7, 1), cand(2, Some(0), 5, 1), cand(3, Some(0), 9, 1)];
        assert_eq!(select_node(&open, NodeRule::BestFirst, &SelectionContext::default()), 1);
    }

    #[test]
    fn projection_hand_evaluation() {
        // w* = 10, w0 = 6, v0 = 2: scores 7 + 2·1 = 9 and 8 + 2·0 = 8
        let open = [cand(1, Some(0), 7, 1), cand(2, Some(0), 8, 0)];
        let ctx = SelectionContext {
            incumbent: Some(10),
            root: Some((6, 2)),
            ..SelectionContext::default()
        };
        assert_eq!(select_node(&open, NodeRule::BestProjection, &ctx), 1);
    }

    #[test]
    fn dfs_takes_up_child() {
        // down child pushed first, up child last
        let open = [cand(1, Some(0), 2, 1), cand(2, Some(0), 2, 1)];
        assert_eq!(select_node(&open, NodeRule::Dfs, &SelectionContext::default()), 1);
    }

    #[test]
    fn ties_are_fifo() {
        let open = [cand(4, Some(1), 3, 2), cand(3, Some(1), 3, 2)];
        let ctx = SelectionContext::default();
        assert_eq!(select_node(&open, NodeRule::BestFirst, &ctx), 1);
        assert_eq!(select_node(&open, NodeRule::MostFeasible, &ctx), 1);
    }

    #[test]
    fn plunging_prefers_children_then_siblings() {
        let open = [cand(2, Some(0), 1, 0), cand(3, Some(1), 9, 0), cand(4, Some(1), 9, 0)];
        let mut ctx = SelectionContext {
            current: Some(1),
            current_parent: Some(0),
            ..SelectionContext::default()
        };
        assert_eq!(select_node(&open, NodeRule::BestFirstPlunge, &ctx), 2);
        ctx.current = Some(5);
        ctx.current_parent = Some(1);
        assert_eq!(select_node(&open, NodeRule::BestFirstPlunge, &ctx), 2);
        ctx.current_parent = Some(7);
        assert_eq!(select_node(&open, NodeRule::BestFirstPlunge, &ctx), 0);
    }

    #[test]
    fn hybrid_plunges_to_depth_limit() {
        let open = [cand(2, Some(0), 1, 0), cand(3, Some(1), 9, 0)];
        let mut ctx = SelectionContext {
            current: Some(1),
            hybrid_depth: 2,
            ..SelectionContext::default()
        };
        assert_eq!(select_node(&open, NodeRule::Hybrid, &ctx), 1);
        ctx.plunge_depth = 2;
        assert_eq!(select_node(&open, NodeRule::Hybrid, &ctx), 0);
    }
}

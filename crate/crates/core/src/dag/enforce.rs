use thiserror::Error;

use super::graph::{ArcId, Dag};
use crate::logic::Trail;
use crate::scalar::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EnforceError {
    /// An arc whose variable is true in the trail was deleted.
    #[error("arc {0} is enforced and deleted at the same time")]
    Contradiction(ArcId),
    /// An enforced arc lies outside every s,t-path of the base graph.
    #[error("enforced arc {0} cannot lie on any s,t-path")]
    OutOfSpan(ArcId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DagMark {
    journal: usize,
    enforced: usize,
    cursor: usize,
}

/// The subgraph induced by a trail: an active-arc mask over the base DAG
/// with a deletion journal for rollback.
#[derive(Debug, Clone)]
pub struct InducedDag<'d, W> {
    dag: &'d Dag<W>,
    active: Vec<bool>,
    num_active: usize,
    journal: Vec<ArcId>,
    enforced: Vec<ArcId>,
    /// Number of trail entries already enforced.
    cursor: usize,
}

impl<'d, W: Weight> InducedDag<'d, W> {
    pub fn new(dag: &'d Dag<W>) -> Self {
        InducedDag {
            dag,
            active: vec![true; dag.num_arcs()],
            num_active: dag.num_arcs(),
            journal: Vec::new(),
            enforced: Vec::new(),
            cursor: 0,
        }
    }

    pub fn dag(&self) -> &'d Dag<W> {
        self.dag
    }

    pub fn is_active(&self, a: ArcId) -> bool {
        self.active[a]
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn num_active(&self) -> usize {
        self.num_active
    }

    pub fn enforced(&self) -> &[ArcId] {
        &self.enforced
    }

    /// Deleted arcs in deletion order.
    pub fn deleted(&self) -> &[ArcId] {
        &self.journal
    }

    pub fn mark(&self) -> DagMark {
        DagMark {
            journal: self.journal.len(),
            enforced: self.enforced.len(),
            cursor: self.cursor,
        }
    }

    pub fn rollback(&mut self, mark: DagMark) {
        for a in self.journal.drain(mark.journal..) {
            self.active[a] = true;
            self.num_active += 1;
        }
        self.enforced.truncate(mark.enforced);
        self.cursor = mark.cursor;
    }

    fn delete(&mut self, a: ArcId, trail: &Trail, fresh: &mut Vec<ArcId>) -> Result<(), EnforceError> {
        if !self.active[a] {
            return Ok(());
        }
        self.active[a] = false;
        self.num_active -= 1;
        self.journal.push(a);
        if let Some(v) = self.dag.arc_var(a) {
            match trail.value(v) {
                Some(true) => return Err(EnforceError::Contradiction(a)),
                Some(false) => {}
                None => fresh.push(a),
            }
        }
        Ok(())
    }

    /// Enforces the trail entries added since the previous call.
    ///
    /// `¬σ(a)` deletes `a`. `σ(a)` with `a = (u,v)` deletes the other
    /// out-arcs of `u` and every arc jumping over `u` in topological order,
    /// which turns `a` into a bridge. Returns the arcs deleted by this call
    /// whose variable is still unassigned, in deletion order.
    pub fn enforce(&mut self, trail: &Trail) -> Result<Vec<ArcId>, EnforceError> {
        let dag = self.dag;
        let mut fresh = Vec::new();
        let entries = trail.entries();
        while self.cursor < entries.len() {
            let lit = entries[self.cursor].0;
            self.cursor += 1;
            let Some(arc) = dag.var_arc(lit.var()) else {
                continue;
            };
            if !lit.is_positive() {
                self.delete(arc, trail, &mut fresh)?;
                continue;
            }
            let (u, v) = (dag.arc(arc).tail, dag.arc(arc).head);
            let (s, t) = (dag.source(), dag.target());
            if dag.rank(u) < dag.rank(s)
                || dag.rank(v) > dag.rank(t)
                || !dag.reachable_from_source(u)
                || !dag.reaches_target(v)
            {
                return Err(EnforceError::OutOfSpan(arc));
            }
            if !self.active[arc] {
                return Err(EnforceError::Contradiction(arc));
            }
            self.enforced.push(arc);
            for &b in dag.out_arcs(u) {
                if b != arc {
                    self.delete(b, trail, &mut fresh)?;
                }
            }
            let ru = dag.rank(u);
            for &i in &dag.order()[..ru] {
                for &b in dag.out_arcs(i) {
                    if dag.rank(dag.arc(b).head) > ru {
                        self.delete(b, trail, &mut fresh)?;
                    }
                }
            }
        }
        Ok(fresh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Lit, Var};

    // s=0, v2=1, v3=2, v4=3, v5=4, t=5; arc ids in this order
    fn figure_dag() -> Dag<i64> {
        let arcs = [
            (0, 2), // 0 s-v3
            (0, 1), // 1 s-v2
            (0, 4), // 2 s-v5
            (2, 3), // 3 v3-v4
            (2, 1), // 4 v3-v2
            (1, 4), // 5 v2-v5
            (1, 3), // 6 v2-v4
            (4, 3), // 7 v5-v4
            (1, 5), // 8 v2-t
            (4, 5), // 9 v5-t
            (3, 5), // 10 v4-t
        ];
        let mut d = Dag::from_triples(6, arcs.iter().map(|&(u, v)| (u, v, 1i64)), 0, 5).unwrap();
        for a in 0..arcs.len() {
            d.map_arc(a, Var(a as u32)).unwrap();
        }
        d
    }

    fn trail(d: &Dag<i64>, lits: &[Lit]) -> Trail {
        Trail::from_lits(d.num_arcs(), lits.iter().copied()).unwrap()
    }

    #[test]
    fn enforcing_figure_arc() {
        let d = figure_dag();
        let mut g = InducedDag::new(&d);
        let t = trail(&d, &[Var(6).pos()]);
        let mut fresh = g.enforce(&t).unwrap();
        fresh.sort();
        // (s,v5), (v3,v4), (v2,v5), (v2,t)
        assert_eq!(fresh, vec![2, 3, 5, 8]);
        assert_eq!(g.enforced(), &[6]);
        assert_eq!(g.num_active(), 7);
    }

    #[test]
    fn empty_trail_and_single_negation() {
        let d = figure_dag();
        let mut g = InducedDag::new(&d);
        assert!(g.enforce(&Trail::new(d.num_arcs())).unwrap().is_empty());
        assert_eq!(g.num_active(), d.num_arcs());
        let t = trail(&d, &[Var(4).neg()]);
        // the arc's own variable is assigned already
        assert!(g.enforce(&t).unwrap().is_empty());
        assert_eq!(g.deleted(), &[4]);
    }

    #[test]
    fn mutual_enforcement_contradiction() {
        let d = figure_dag();
        let mut g = InducedDag::new(&d);
        // enforcing (v2,v4) deletes (v2,t)
        let t = trail(&d, &[Var(6).pos(), Var(8).pos()]);
        assert!(matches!(g.enforce(&t), Err(EnforceError::Contradiction(_))));
    }

    #[test]
    fn rollback_restores_mask() {
        let d = figure_dag();
        let mut g = InducedDag::new(&d);
        let m = g.mark();
        g.enforce(&trail(&d, &[Var(6).pos()])).unwrap();
        g.rollback(m);
        assert_eq!(g.active(), vec![true; d.num_arcs()].as_slice());
        assert!(g.enforced().is_empty());
    }

    #[test]
    fn out_of_span_is_infeasible() {
        // 0 -> 1 -> 2, s = 1, t = 2; enforcing (0,1) is outside the span
        let mut d = Dag::from_triples(3, [(0, 1, 1i64), (1, 2, 1)], 1, 2).unwrap();
        d.map_arc(0, Var(0)).unwrap();
        let mut g = InducedDag::new(&d);
        let t = Trail::from_lits(1, [Var(0).pos()]).unwrap();
        assert_eq!(g.enforce(&t), Err(EnforceError::OutOfSpan(0)));
    }
}

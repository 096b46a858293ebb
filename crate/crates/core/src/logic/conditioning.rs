use std::collections::VecDeque;

use thiserror::Error;

use super::formula::{ClauseId, CnfFormula, Lit, Var, VarKind};
use super::trail::{Reason, Trail, TrailMark};

/// Unit propagation derived the empty clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("the conditioned formula contains the empty clause")]
pub struct EmptyClause;

/// A formula conditioned on a trail, maintained incrementally.
///
/// Instead of materializing the conditioned formula, each clause carries the
/// number of its literals whose variable is unassigned and the number of its
/// literals that are true. A clause is removed (satisfied) iff its true count
/// is positive; it is the empty clause iff it is not satisfied and has no
/// unassigned literal left. Rolling the trail back replays the counter
/// updates in reverse, so undo is exact.
#[derive(Debug, Clone)]
pub struct Conditioned<'f> {
    formula: &'f CnfFormula,
    trail: Trail,
    unassigned: Vec<u32>,
    true_count: Vec<u32>,
    num_satisfied: usize,
    num_empty: usize,
    /// Clauses that became unit, FIFO. May hold stale entries.
    pending: VecDeque<ClauseId>,
}

/// Counter snapshot, used to compare states after rollback.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSnapshot {
    pub trail: Vec<Lit>,
    pub unassigned: Vec<u32>,
    pub true_count: Vec<u32>,
    pub num_satisfied: usize,
    pub num_empty: usize,
}

/// Conditions `formula` on every literal of `trail`.
///
/// Panics if the trail was built for a different number of variables.
pub fn condition<'f>(formula: &'f CnfFormula, trail: &Trail) -> Conditioned<'f> {
    assert_eq!(formula.num_vars(), trail.num_vars());
    let mut state = Conditioned::new(formula);
    for &(lit, reason) in trail.entries() {
        state.assign(lit, reason);
    }
    state
}

impl<'f> Conditioned<'f> {
    /// The formula conditioned on the empty trail.
    pub fn new(formula: &'f CnfFormula) -> Self {
        let n = formula.num_clauses();
        let mut unassigned = Vec::with_capacity(n);
        let mut pending = VecDeque::new();
        let mut num_empty = 0;
        for (id, c) in formula.clauses().iter().enumerate() {
            unassigned.push(c.len() as u32);
            match c.len() {
                0 => num_empty += 1,
                1 => pending.push_back(id),
                _ => {}
            }
        }
        Conditioned {
            formula,
            trail: Trail::new(formula.num_vars()),
            unassigned,
            true_count: vec![0; n],
            num_satisfied: 0,
            num_empty,
            pending,
        }
    }

    pub fn formula(&self) -> &'f CnfFormula {
        self.formula
    }

    pub fn trail(&self) -> &Trail {
        &self.trail
    }

    pub fn mark(&self) -> TrailMark {
        self.trail.mark()
    }

    #[inline]
    pub fn value(&self, var: Var) -> Option<bool> {
        self.trail.value(var)
    }

    #[inline]
    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.trail.lit_value(lit)
    }

    /// Assigns `lit`. Returns `false` if it was already in the trail.
    ///
    /// Panics if `¬lit` is in the trail.
    pub fn assign(&mut self, lit: Lit, reason: Reason) -> bool {
        match self.trail.lit_value(lit) {
            Some(true) => return false,
            Some(false) => panic!("assigning {lit} contradicts the trail"),
            None => {}
        }
        self.trail.push(lit, reason);
        let formula = self.formula;
        for &c in formula.occurrences(lit) {
            self.unassigned[c] -= 1;
            self.true_count[c] += 1;
            if self.true_count[c] == 1 {
                self.num_satisfied += 1;
            }
        }
        for &c in formula.occurrences(!lit) {
            self.unassigned[c] -= 1;
            if self.true_count[c] == 0 {
                match self.unassigned[c] {
                    0 => self.num_empty += 1,
                    1 => self.pending.push_back(c),
                    _ => {}
                }
            }
        }
        true
    }

    /// Undoes every assignment made after `mark`.
    pub fn rollback(&mut self, mark: TrailMark) {
        let formula = self.formula;
        let mut revived = Vec::new();
        while self.trail.len() > mark.0 {
            let (lit, _) = self.trail.pop().expect("length checked");
            for &c in formula.occurrences(lit) {
                self.unassigned[c] += 1;
                self.true_count[c] -= 1;
                if self.true_count[c] == 0 {
                    self.num_satisfied -= 1;
                    if self.unassigned[c] == 1 {
                        revived.push(c);
                    }
                }
            }
            for &c in formula.occurrences(!lit) {
                if self.true_count[c] == 0 && self.unassigned[c] == 0 {
                    self.num_empty -= 1;
                }
                self.unassigned[c] += 1;
                if self.true_count[c] == 0 && self.unassigned[c] == 1 {
                    revived.push(c);
                }
            }
        }
        revived.sort_unstable();
        revived.dedup();
        self.pending.extend(revived);
    }

    /// Unit propagation to fixpoint. Returns the number of literals added.
    ///
    /// On `EmptyClause` the literals derived so far stay on the trail; the
    /// caller rolls back.
    pub fn unit_propagate(&mut self) -> Result<usize, EmptyClause> {
        if self.num_empty > 0 {
            return Err(EmptyClause);
        }
        let mut added = 0;
        while let Some(c) = self.pending.pop_front() {
            if self.true_count[c] != 0 || self.unassigned[c] != 1 {
                continue;
            }
            let lit = self
                .remaining_literals(c)
                .next()
                .expect("unit clause has one unassigned literal");
            self.assign(lit, Reason::UnitPropagation);
            added += 1;
            if self.num_empty > 0 {
                return Err(EmptyClause);
            }
        }
        Ok(added)
    }

    /// Pure literal elimination over the free variables in `scope`.
    /// Graph variables in `scope` are skipped. Returns the number of literals
    /// added.
    pub fn pure_literal_eliminate(&mut self, scope: impl IntoIterator<Item = Var>) -> usize {
        let mut added = 0;
        for var in scope {
            if self.formula.kind(var) != VarKind::Free || self.trail.is_assigned(var) {
                continue;
            }
            let pos = self.occurs_unsatisfied(var.pos());
            let neg = self.occurs_unsatisfied(var.neg());
            let pure = match (pos, neg) {
                (true, false) => var.pos(),
                (false, true) => var.neg(),
                _ => continue,
            };
            self.assign(pure, Reason::PureLiteral);
            added += 1;
        }
        added
    }

    fn occurs_unsatisfied(&self, lit: Lit) -> bool {
        self.formula
            .occurrences(lit)
            .iter()
            .any(|&c| self.true_count[c] == 0)
    }

    pub fn has_empty_clause(&self) -> bool {
        self.num_empty > 0
    }

    /// True iff the conditioned formula is the empty set.
    pub fn is_satisfied(&self) -> bool {
        self.num_satisfied == self.formula.num_clauses()
    }

    #[inline]
    pub fn clause_satisfied(&self, c: ClauseId) -> bool {
        self.true_count[c] > 0
    }

    /// Number of literals of clause `c` left in the conditioned formula.
    #[inline]
    pub fn remaining_len(&self, c: ClauseId) -> usize {
        self.unassigned[c] as usize
    }

    /// Ids of the clauses of the conditioned formula.
    pub fn remaining_clauses(&self) -> impl Iterator<Item = ClauseId> + '_ {
        (0..self.formula.num_clauses()).filter(move |&c| self.true_count[c] == 0)
    }

    pub fn num_remaining(&self) -> usize {
        self.formula.num_clauses() - self.num_satisfied
    }

    /// Literals of clause `c` whose variable is unassigned, in clause order.
    pub fn remaining_literals(&self, c: ClauseId) -> impl Iterator<Item = Lit> + '_ {
        self.formula
            .clause(c)
            .lits()
            .iter()
            .copied()
            .filter(move |l| !self.trail.is_assigned(l.var()))
    }

    /// The conditioned formula as explicit clauses.
    pub fn remaining_clause_sets(&self) -> Vec<Vec<Lit>> {
        self.remaining_clauses()
            .map(|c| self.remaining_literals(c).collect())
            .collect()
    }

    pub fn snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            trail: self.trail.lits().collect(),
            unassigned: self.unassigned.clone(),
            true_count: self.true_count.clone(),
            num_satisfied: self.num_satisfied,
            num_empty: self.num_empty,
        }
    }
}

use std::collections::BTreeMap;

use super::config::CvdsParams;
use crate::logic::{ClauseVarMap, CnfFormula, Conditioned, Conflict, Lit, Reason, Var};

/// Product rule `max(ε, γ_up) · max(ε, γ_down)`.
pub fn product_score(epsilon: f64, up: f64, down: f64) -> f64 {
    up.max(epsilon) * down.max(epsilon)
}

/// The variable with the highest score; ties go to the smallest id.
pub fn best_scored(scores: &[(Var, f64)]) -> Option<Var> {
    let mut best: Option<(Var, f64)> = None;
    for &(v, s) in scores {
        match best {
            Some((bv, bs)) if s < bs || (s == bs && v > bv) => {}
            _ => best = Some((v, s)),
        }
    }
    best.map(|(v, _)| v)
}

/// First conflict variable reached from the literals of `lits` in order,
/// looking through definitions of free variables.
fn first_conflict_var(lits: impl IntoIterator<Item = Lit>, conflict: &Conflict, map: &ClauseVarMap) -> Option<Var> {
    let mut stack: Vec<Lit> = lits.into_iter().collect();
    stack.reverse();
    let mut seen = Vec::new();
    while let Some(l) = stack.pop() {
        let v = l.var();
        if conflict.contains(v) {
            return Some(v);
        }
        if seen.contains(&v) {
            continue;
        }
        seen.push(v);
        if let Some(def) = map.get(v) {
            stack.extend(def.lits().iter().rev().copied());
        }
    }
    None
}

/// The first literal of the smallest violated clause (by remaining size,
/// then id) that belongs to the conflict.
pub fn clause_rule(state: &Conditioned<'_>, conflict: &Conflict, map: &ClauseVarMap) -> Var {
    let mut clauses = conflict.violated.clone();
    clauses.sort_by_key(|&c| (state.remaining_len(c), c));
    clauses
        .iter()
        .find_map(|&c| first_conflict_var(state.remaining_literals(c), conflict, map))
        .unwrap_or(conflict.vars[0])
}

/// Maximum occurrences in the smallest remaining clauses that mention a
/// conflict variable.
pub fn moms_rule(state: &Conditioned<'_>, conflict: &Conflict) -> Var {
    let mut min_len = usize::MAX;
    let mut counts: BTreeMap<Var, usize> = BTreeMap::new();
    for c in state.remaining_clauses() {
        let members: Vec<Var> = state
            .remaining_literals(c)
            .map(|l| l.var())
            .filter(|&v| conflict.contains(v))
            .collect();
        if members.is_empty() {
            continue;
        }
        let len = state.remaining_len(c);
        if len < min_len {
            min_len = len;
            counts.clear();
        }
        if len == min_len {
            for v in members {
                *counts.entry(v).or_default() += 1;
            }
        }
    }
    let scores: Vec<(Var, f64)> = counts.into_iter().map(|(v, n)| (v, n as f64)).collect();
    best_scored(&scores).unwrap_or(conflict.vars[0])
}

/// Literals added by unit propagation after assigning `lit`, or `None` if
/// the empty clause is derived. The state is restored afterwards.
pub fn propagation_gain(state: &mut Conditioned<'_>, lit: Lit) -> Option<usize> {
    let mark = state.mark();
    state.assign(lit, Reason::Decision);
    let r = state.unit_propagate().ok();
    state.rollback(mark);
    r
}

/// Shallow unit propagation score of every conflict variable.
pub fn sup_scores(state: &mut Conditioned<'_>, conflict: &Conflict, epsilon: f64, infinity: f64) -> Vec<(Var, f64)> {
    conflict
        .vars
        .iter()
        .map(|&v| {
            let gain = |g: Option<usize>| g.map_or(infinity, |n| n as f64);
            let up = gain(propagation_gain(state, v.pos()));
            let down = gain(propagation_gain(state, v.neg()));
            (v, product_score(epsilon, up, down))
        })
        .collect()
}

/// Conflict variables decaying sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Cvds {
    scores: Vec<f64>,
    params: CvdsParams,
    events: u64,
}

impl Cvds {
    /// Scores start at the number of clauses each variable occurs in.
    pub fn new(formula: &CnfFormula, params: CvdsParams) -> Self {
        let mut scores = vec![0.0; formula.num_vars()];
        for c in formula.clauses() {
            for l in c.lits() {
                scores[l.var().index()] += 1.0;
            }
        }
        Cvds {
            scores,
            params,
            events: 0,
        }
    }

    pub fn score(&self, v: Var) -> f64 {
        self.scores[v.index()]
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    /// Bumps the given variables once each and counts one event.
    pub fn bump(&mut self, vars: impl IntoIterator<Item = Var>) {
        for v in vars {
            self.scores[v.index()] += self.params.bump;
        }
        self.events += 1;
        if self.events % self.params.interval == 0 {
            for s in &mut self.scores {
                *s *= self.params.decay;
            }
        }
    }

    pub fn choose(&self, conflict: &Conflict) -> Var {
        let scores: Vec<(Var, f64)> = conflict.vars.iter().map(|&v| (v, self.score(v))).collect();
        best_scored(&scores).expect("conflict is nonempty")
    }
}

/// Strong-branching working limit: evaluation stops once `since_best`
/// evaluations passed without improvement and `since_best ≥ L·(1−ξ)`, with
/// `ξ` the fraction of the conflict not evaluated yet.
pub fn working_limit_reached(lookahead: u32, evaluated: usize, total: usize, since_best: usize) -> bool {
    if since_best == 0 {
        return false;
    }
    let xi = (total - evaluated) as f64 / total as f64;
    since_best as f64 >= f64::from(lookahead) * (1.0 - xi)
}

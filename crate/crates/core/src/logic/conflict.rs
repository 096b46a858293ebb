use std::collections::BTreeSet;

use super::conditioning::Conditioned;
use super::formula::{ClauseId, Lit, Var, VarKind};
use super::residual::solve_residual;
use super::tseitin::ClauseVarMap;

/// A partial assignment indexed by variable.
pub type Assignment = Vec<Option<bool>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConflictFlavor {
    /// All variables of the violated clauses.
    Standard,
    /// Graph variables only; defined free variables are expanded.
    Graph,
}

/// Variables suspected to cause the unsatisfiability of a path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub vars: Vec<Var>,
    pub flavor: ConflictFlavor,
    /// Clauses of the conditioned formula not satisfied by the tentative
    /// assignment, in id order.
    pub violated: Vec<ClauseId>,
}

impl Conflict {
    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn contains(&self, var: Var) -> bool {
        self.vars.binary_search(&var).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Completion {
    /// A complete assignment satisfying the formula.
    Satisfied(Vec<bool>),
    /// The tentative assignment after evaluating all definitions; some
    /// clause is not satisfied by it.
    Unsatisfied(Assignment),
}

fn lit_value(values: &Assignment, lit: Lit) -> Option<bool> {
    values[lit.var().index()].map(|v| v == lit.is_positive())
}

fn clause_satisfied(state: &Conditioned<'_>, values: &Assignment, c: ClauseId) -> bool {
    state
        .formula()
        .clause(c)
        .lits()
        .iter()
        .any(|&l| lit_value(values, l) == Some(true))
}

/// Evaluates `var` through its definition, memoizing into `values`.
fn resolve(var: Var, map: &ClauseVarMap, values: &mut Assignment, depth: usize) -> Option<bool> {
    if let Some(v) = values[var.index()] {
        return Some(v);
    }
    let def = map.get(var)?;
    // definitions are acyclic by construction; the depth guard only stops runaway input
    if depth > 64 {
        return None;
    }
    let mut ops = Vec::with_capacity(def.lits().len());
    for &l in def.lits() {
        ops.push(resolve(l.var(), map, values, depth + 1).map(|v| v == l.is_positive()));
    }
    let mut it = ops.into_iter();
    let v = def.evaluate(|_| it.next().flatten());
    values[var.index()] = v;
    v
}

/// Completes a tentative assignment and checks the formula.
///
/// `tentative` is the trail of the node extended by the assignment induced
/// by a path, so it assigns every graph variable. Each defined free variable
/// that is still unassigned gets the value of its definition. If free
/// variables without a definition remain, the residual formula is decided by
/// a small DPLL search.
pub fn complete_and_check(state: &Conditioned<'_>, tentative: &Assignment, map: &ClauseVarMap) -> Completion {
    let formula = state.formula();
    let mut values = tentative.clone();
    for (var, _) in map.iter() {
        resolve(var, map, &mut values, 0);
    }
    let unsatisfied: Vec<ClauseId> = state
        .remaining_clauses()
        .filter(|&c| !clause_satisfied(state, &values, c))
        .collect();
    if unsatisfied.is_empty() {
        return Completion::Satisfied(values.iter().map(|v| v.unwrap_or(false)).collect());
    }
    let residual: Vec<Vec<Lit>> = unsatisfied
        .iter()
        .map(|&c| {
            formula
                .clause(c)
                .lits()
                .iter()
                .copied()
                .filter(|l| values[l.var().index()].is_none())
                .collect()
        })
        .collect();
    if residual.iter().any(|c| c.is_empty()) {
        return Completion::Unsatisfied(values);
    }
    match solve_residual(&residual) {
        Some(extra) => {
            let mut full: Vec<bool> = values.iter().map(|v| v.unwrap_or(false)).collect();
            for (v, b) in extra {
                full[v.index()] = b;
            }
            Completion::Satisfied(full)
        }
        None => Completion::Unsatisfied(values),
    }
}

/// Extracts a conflict from the clauses of the conditioned formula that the
/// tentative assignment does not satisfy.
///
/// Returns `None` if every clause is satisfied by `tentative`.
pub fn extract_conflict(
    state: &Conditioned<'_>,
    tentative: &Assignment,
    flavor: ConflictFlavor,
    map: &ClauseVarMap,
) -> Option<Conflict> {
    let violated: Vec<ClauseId> = state
        .remaining_clauses()
        .filter(|&c| !clause_satisfied(state, tentative, c))
        .collect();
    if violated.is_empty() {
        return None;
    }
    let mut standard = BTreeSet::new();
    for &c in &violated {
        standard.extend(state.remaining_literals(c).map(|l| l.var()));
    }
    let vars = match flavor {
        ConflictFlavor::Standard => standard.into_iter().collect(),
        ConflictFlavor::Graph => graph_projection(state, map, standard.iter().copied())
            .into_iter()
            .collect(),
    };
    Some(Conflict { vars, flavor, violated })
}

/// Graph variables unassigned in the trail that the given variables stand
/// for: graph variables map to themselves, defined free variables to the
/// graph variables of their definition (recursively).
pub fn graph_projection(
    state: &Conditioned<'_>,
    map: &ClauseVarMap,
    vars: impl IntoIterator<Item = Var>,
) -> BTreeSet<Var> {
    let formula = state.formula();
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack: Vec<Var> = vars.into_iter().collect();
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        match formula.kind(v) {
            VarKind::Graph => {
                if !state.trail().is_assigned(v) {
                    out.insert(v);
                }
            }
            VarKind::Free => {
                if let Some(def) = map.get(v) {
                    stack.extend(def.lits().iter().map(|l| l.var()));
                }
            }
        }
    }
    out
}

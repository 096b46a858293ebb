use std::collections::BTreeMap;

use super::formula::{Lit, Var};

/// Decides a small residual formula with a plain DPLL search.
///
/// `clauses` contain only unassigned literals. Returns a satisfying
/// assignment of the variables occurring in them, or `None` if unsatisfiable.
/// Used to finish the satisfiability check of a path when free variables
/// without a definition remain.
pub fn solve_residual(clauses: &[Vec<Lit>]) -> Option<BTreeMap<Var, bool>> {
    let mut assignment = BTreeMap::new();
    if dpll(clauses.to_vec(), &mut assignment) {
        Some(assignment)
    } else {
        None
    }
}

fn simplify(clauses: &[Vec<Lit>], lit: Lit) -> Option<Vec<Vec<Lit>>> {
    let mut out = Vec::with_capacity(clauses.len());
    for c in clauses {
        if c.contains(&lit) {
            continue;
        }
        let reduced: Vec<Lit> = c.iter().copied().filter(|&l| l != !lit).collect();
        if reduced.is_empty() {
            return None;
        }
        out.push(reduced);
    }
    Some(out)
}

fn dpll(mut clauses: Vec<Vec<Lit>>, assignment: &mut BTreeMap<Var, bool>) -> bool {
    let start: Vec<Var> = assignment.keys().copied().collect();
    loop {
        if clauses.iter().any(|c| c.is_empty()) {
            undo(assignment, &start);
            return false;
        }
        let Some(unit) = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]) else {
            break;
        };
        assignment.insert(unit.var(), unit.is_positive());
        match simplify(&clauses, unit) {
            Some(c) => clauses = c,
            None => {
                undo(assignment, &start);
                return false;
            }
        }
    }
    let Some(&branch) = clauses.first().and_then(|c| c.first()) else {
        return true;
    };
    for lit in [branch, !branch] {
        if let Some(next) = simplify(&clauses, lit) {
            assignment.insert(lit.var(), lit.is_positive());
            if dpll(next, assignment) {
                return true;
            }
            assignment.remove(&lit.var());
        }
    }
    undo(assignment, &start);
    false
}

fn undo(assignment: &mut BTreeMap<Var, bool>, keep: &[Var]) {
    assignment.retain(|v, _| keep.contains(v));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(d: i64) -> Lit {
        Lit::from_dimacs(d).unwrap()
    }

    fn check(clauses: &[Vec<Lit>], a: &BTreeMap<Var, bool>) -> bool {
        clauses
            .iter()
            .all(|c| c.iter().any(|x| a.get(&x.var()) == Some(&x.is_positive())))
    }

    #[test]
    fn satisfiable_and_not() {
        let sat = vec![vec![l(1), l(2)], vec![l(-1), l(2)], vec![l(-2), l(3)]];
        let a = solve_residual(&sat).unwrap();
        assert!(check(&sat, &a));

        let unsat = vec![vec![l(1), l(2)], vec![l(-1), l(2)], vec![l(1), l(-2)], vec![l(-1), l(-2)]];
        assert!(solve_residual(&unsat).is_none());
        assert!(solve_residual(&[vec![]]).is_none());
        assert_eq!(solve_residual(&[]), Some(BTreeMap::new()));
    }
}

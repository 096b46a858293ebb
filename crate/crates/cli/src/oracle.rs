//! Exhaustive reference solver used to validate the branch and bound.
//!
//! All s,t-paths are enumerated and checked in order of cost. A path fixes
//! the graph variables; defined variables follow from their definitions
//! (compilation encodes them as equivalences) and the remaining free
//! variables are enumerated.

use lcsp_core::logic::{Definition, Lit, Var, VarKind};
use lcsp_core::solver::{Instance, Status};
use thiserror::Error;

pub const MAX_PATHS: usize = 1_000_000;
pub const MAX_OPEN_VARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("more than {MAX_PATHS} s,t-paths")]
    TooManyPaths,
    #[error("{0} undefined free variables, at most {MAX_OPEN_VARS} can be enumerated")]
    TooManyOpenVars(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub status: Status,
    pub cost: Option<i64>,
    pub path: Option<Vec<usize>>,
    pub paths_checked: usize,
}

fn enumerate_paths(inst: &Instance<i64>) -> Result<Vec<(i64, Vec<usize>)>, OracleError> {
    let dag = inst.dag();
    let mut out = Vec::new();
    let mut stack = vec![(dag.source(), 0i64, Vec::new())];
    while let Some((v, cost, arcs)) = stack.pop() {
        if v == dag.target() {
            if out.len() == MAX_PATHS {
                return Err(OracleError::TooManyPaths);
            }
            out.push((cost, arcs));
            continue;
        }
        for &a in dag.out_arcs(v) {
            let mut next = arcs.clone();
            next.push(a);
            stack.push((dag.arc(a).head, cost + dag.weight(a), next));
        }
    }
    out.sort();
    Ok(out)
}

fn eval(var: Var, inst: &Instance<i64>, values: &mut [Option<bool>]) -> Option<bool> {
    if let Some(v) = values[var.index()] {
        return Some(v);
    }
    let def = inst.definitions().get(var)?.clone();
    let mut lit = |l: Lit| eval(l.var(), inst, values).map(|v| v == l.is_positive());
    let v = match &def {
        Definition::And(ls) => {
            let vals: Option<Vec<bool>> = ls.iter().map(|&l| lit(l)).collect();
            vals.map(|v| v.into_iter().all(|x| x))
        }
        Definition::Or(ls) => {
            let vals: Option<Vec<bool>> = ls.iter().map(|&l| lit(l)).collect();
            vals.map(|v| v.into_iter().any(|x| x))
        }
    };
    values[var.index()] = v;
    v
}

pub fn brute_force_solve(inst: &Instance<i64>) -> Result<OracleResult, OracleError> {
    let formula = inst.formula();
    let n = formula.num_vars();
    let open: Vec<Var> = formula
        .vars()
        .filter(|&v| formula.kind(v) == VarKind::Free && !inst.definitions().contains(v))
        .collect();
    if open.len() > MAX_OPEN_VARS {
        return Err(OracleError::TooManyOpenVars(open.len()));
    }
    let defined: Vec<Var> = formula.vars().filter(|&v| inst.definitions().contains(v)).collect();
    let paths = enumerate_paths(inst)?;
    let dag = inst.dag();
    for (checked, (cost, arcs)) in paths.iter().enumerate() {
        let mut fixed: Vec<Option<bool>> = vec![None; n];
        for v in formula.graph_vars() {
            fixed[v.index()] = Some(false);
        }
        for &a in arcs {
            if let Some(v) = dag.arc_var(a) {
                fixed[v.index()] = Some(true);
            }
        }
        // definitions may read open variables, so they are evaluated per assignment
        let found = (0u64..1 << open.len()).any(|bits| {
            let mut values = fixed.clone();
            for (i, v) in open.iter().enumerate() {
                values[v.index()] = Some(bits >> i & 1 == 1);
            }
            for &v in &defined {
                eval(v, inst, &mut values);
            }
            formula
                .clauses()
                .iter()
                .all(|c| c.lits().iter().any(|l| values[l.var().index()] == Some(l.is_positive())))
        });
        if found {
            return Ok(OracleResult {
                status: Status::Optimal,
                cost: Some(*cost),
                path: Some(arcs.clone()),
                paths_checked: checked + 1,
            });
        }
    }
    Ok(OracleResult {
        status: Status::Infeasible,
        cost: None,
        path: None,
        paths_checked: paths.len(),
    })
}

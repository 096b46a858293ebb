use thiserror::Error;

use crate::dag::Dag;
use crate::logic::{ClauseVarMap, CnfFormula, LogicError, VarKind};
use crate::scalar::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("variable {0} is mapped to an arc but not declared as a graph variable")]
    MappedFreeVariable(u32),
    #[error("graph variable {0} is not mapped to any arc")]
    UnmappedGraphVariable(u32),
    #[error("arc {arc} is mapped to undeclared variable {var}")]
    UndeclaredVariable { arc: usize, var: u32 },
    #[error("heuristic has {got} entries for {expected} vertices")]
    HeuristicLength { got: usize, expected: usize },
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// A DAG, a CNF formula over graph and free variables, and the definitions
/// of free variables introduced by compilation.
#[derive(Debug, Clone)]
pub struct Instance<W> {
    dag: Dag<W>,
    formula: CnfFormula,
    definitions: ClauseVarMap,
    heuristic: Option<Vec<W>>,
    /// Weight units per natural unit (e.g. fixed-point scale).
    unit_scale: f64,
}

impl<W: Weight> Instance<W> {
    /// Checks that the graph variables of `formula` are exactly the mapped
    /// ones and that definitions reference declared free variables.
    pub fn new(dag: Dag<W>, formula: CnfFormula, definitions: ClauseVarMap) -> Result<Self, InstanceError> {
        for (arc, var) in dag.mapping() {
            if var.index() >= formula.num_vars() {
                return Err(InstanceError::UndeclaredVariable { arc, var: var.0 });
            }
            if formula.kind(var) != VarKind::Graph {
                return Err(InstanceError::MappedFreeVariable(var.0));
            }
        }
        for var in formula.graph_vars() {
            if dag.var_arc(var).is_none() {
                return Err(InstanceError::UnmappedGraphVariable(var.0));
            }
        }
        definitions.validate(&formula)?;
        Ok(Instance {
            dag,
            formula,
            definitions,
            heuristic: None,
            unit_scale: 1.0,
        })
    }

    /// Attaches an admissible, consistent lower bound on the distance to t.
    pub fn with_heuristic(mut self, h: Vec<W>) -> Result<Self, InstanceError> {
        if h.len() != self.dag.num_vertices() {
            return Err(InstanceError::HeuristicLength {
                got: h.len(),
                expected: self.dag.num_vertices(),
            });
        }
        self.heuristic = Some(h);
        Ok(self)
    }

    pub fn with_unit_scale(mut self, scale: f64) -> Self {
        self.unit_scale = scale;
        self
    }

    pub fn dag(&self) -> &Dag<W> {
        &self.dag
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn definitions(&self) -> &ClauseVarMap {
        &self.definitions
    }

    pub fn heuristic(&self) -> Option<&[W]> {
        self.heuristic.as_deref()
    }

    pub fn unit_scale(&self) -> f64 {
        self.unit_scale
    }

    /// Whether a path (as arc ids) with the completed assignment `values`
    /// is a feasible solution: the graph variables agree with the path and
    /// the formula is satisfied.
    pub fn is_feasible(&self, arcs: &[usize], values: &[bool]) -> bool {
        if values.len() != self.formula.num_vars() {
            return false;
        }
        let mut on_path = vec![false; self.dag.num_arcs()];
        for &a in arcs {
            on_path[a] = true;
        }
        self.dag
            .mapping()
            .all(|(a, v)| values[v.index()] == on_path[a])
            && self.formula.is_satisfied_by(values)
    }
}

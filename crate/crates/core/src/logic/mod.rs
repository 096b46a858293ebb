//! Propositional core: CNF formulas, incremental conditioning with unit
//! propagation, Tseitin compilation of DNF restrictions and conflict
//! extraction.

mod conflict;
mod conditioning;
mod formula;
mod residual;
mod trail;
mod tseitin;

pub use conditioning::{condition, Conditioned, EmptyClause, StateSnapshot};
pub use conflict::{complete_and_check, extract_conflict, graph_projection, Assignment, Completion, Conflict, ConflictFlavor};
pub use formula::{Clause, ClauseId, CnfFormula, Lit, Var, VarKind};
pub use residual::solve_residual;
pub use trail::{Reason, Trail, TrailMark};
pub use tseitin::{compile_dnf_restrictions, ClauseVarMap, Definition, DnfRestriction, TseitinEncoder};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("restriction {restriction} contains an empty conjunction at position {clause}")]
    EmptyDnfClause { restriction: usize, clause: usize },
    #[error("variable {0} is not declared in the formula")]
    UnknownVariable(u32),
    #[error("variable {0} is a graph variable and cannot carry a definition")]
    DefinedGraphVariable(u32),
}

//! Branch and bound over partial assignments with a shortest-path
//! relaxation, pluggable node selection and branching rules.

mod branching;
mod config;
mod instance;
mod search;
mod select;
mod stats;

pub use branching::{
    best_scored, clause_rule, moms_rule, product_score, propagation_gain, sup_scores, working_limit_reached, Cvds,
};
pub use config::{
    conflict_name, parse_conflict, BranchRule, ConfigError, CvdsParams, NodeRule, SolverConfig, SpEngine, UnknownName,
};
pub use instance::{Instance, InstanceError};
pub use search::solve;
pub use select::{select_node, Candidate, NodeId, SelectionContext};
pub use stats::{Outcomes, Solution, SolveStats, Status};

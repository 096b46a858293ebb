use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::logic::ConflictFlavor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeRule {
    Dfs,
    MostFeasible,
    BestFirst,
    BestFirstPlunge,
    BestProjection,
    /// Depth-limited plunging that falls back to best-first.
    Hybrid,
}

impl NodeRule {
    pub const ALL: [NodeRule; 6] = [
        NodeRule::Dfs,
        NodeRule::MostFeasible,
        NodeRule::BestFirst,
        NodeRule::BestFirstPlunge,
        NodeRule::BestProjection,
        NodeRule::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeRule::Dfs => "dfs",
            NodeRule::MostFeasible => "most-feasible",
            NodeRule::BestFirst => "best-first",
            NodeRule::BestFirstPlunge => "best-first-plunge",
            NodeRule::BestProjection => "best-projection",
            NodeRule::Hybrid => "hybrid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchRule {
    Clause,
    Moms,
    Sup,
    Dup,
    Cvds,
    Strong,
}

impl BranchRule {
    pub const ALL: [BranchRule; 6] = [
        BranchRule::Clause,
        BranchRule::Moms,
        BranchRule::Sup,
        BranchRule::Dup,
        BranchRule::Cvds,
        BranchRule::Strong,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BranchRule::Clause => "clause",
            BranchRule::Moms => "moms",
            BranchRule::Sup => "sup",
            BranchRule::Dup => "dup",
            BranchRule::Cvds => "cvds",
            BranchRule::Strong => "strong",
        }
    }
}

pub fn conflict_name(flavor: ConflictFlavor) -> &'static str {
    match flavor {
        ConflictFlavor::Standard => "standard",
        ConflictFlavor::Graph => "graph",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} '{value}'")]
pub struct UnknownName {
    pub kind: &'static str,
    pub value: String,
}

impl FromStr for NodeRule {
    type Err = UnknownName;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| UnknownName {
                kind: "node rule",
                value: s.to_string(),
            })
    }
}

impl FromStr for BranchRule {
    type Err = UnknownName;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BranchRule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| UnknownName {
                kind: "branching rule",
                value: s.to_string(),
            })
    }
}

pub fn parse_conflict(s: &str) -> Result<ConflictFlavor, UnknownName> {
    match s {
        "standard" => Ok(ConflictFlavor::Standard),
        "graph" => Ok(ConflictFlavor::Graph),
        _ => Err(UnknownName {
            kind: "conflict flavor",
            value: s.to_string(),
        }),
    }
}

impl fmt::Display for NodeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for BranchRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpEngine {
    /// From-scratch DAG dynamic programming at every node.
    Static,
    /// LPA* labels carried across nodes.
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvdsParams {
    pub bump: f64,
    pub decay: f64,
    /// Number of events between two decays.
    pub interval: u64,
}

impl Default for CvdsParams {
    fn default() -> Self {
        CvdsParams {
            bump: 1.0,
            decay: 0.95,
            interval: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub node_rule: NodeRule,
    pub branch_rule: BranchRule,
    pub conflict: ConflictFlavor,
    /// Floor of the product rule.
    pub epsilon: f64,
    /// Strong-branching look-ahead `L`.
    pub lookahead: u32,
    pub cvds: CvdsParams,
    pub pure_literals: bool,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub engine: SpEngine,
    pub parent_path_check: bool,
    /// Gain substituted for an infeasible strong-branching child, in
    /// natural weight units.
    pub strong_infinity: f64,
    /// Gain substituted for an infeasible unit-propagation child.
    pub propagation_infinity: f64,
    /// Plunge depth of the hybrid node rule.
    pub hybrid_depth: u32,
    /// Dynamic engine rebuild threshold, as a fraction of active arcs.
    pub rebuild_fraction: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_rule: NodeRule::Dfs,
            branch_rule: BranchRule::Clause,
            conflict: ConflictFlavor::Standard,
            epsilon: 1e-6,
            lookahead: 8,
            cvds: CvdsParams::default(),
            pure_literals: false,
            node_limit: None,
            time_limit: None,
            engine: SpEngine::Dynamic,
            parent_path_check: true,
            strong_infinity: 1e9,
            propagation_infinity: 1e6,
            hybrid_depth: 4,
            rebuild_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("epsilon must be positive, got {0}")]
    Epsilon(f64),
    #[error("look-ahead must be at least 1")]
    Lookahead,
    #[error("decay must lie in (0,1), got {0}")]
    Decay(f64),
    #[error("decay interval must be positive")]
    Interval,
    #[error("strong branching requires graph conflicts")]
    StrongNeedsGraphConflicts,
    #[error("rebuild fraction must be non-negative, got {0}")]
    RebuildFraction(f64),
}

impl SolverConfig {
    pub fn new(node_rule: NodeRule, branch_rule: BranchRule, conflict: ConflictFlavor) -> Self {
        SolverConfig {
            node_rule,
            branch_rule,
            conflict,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.epsilon > 0.0) {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        if self.lookahead < 1 {
            return Err(ConfigError::Lookahead);
        }
        if !(self.cvds.decay > 0.0 && self.cvds.decay < 1.0) {
            return Err(ConfigError::Decay(self.cvds.decay));
        }
        if self.cvds.interval == 0 {
            return Err(ConfigError::Interval);
        }
        if self.branch_rule == BranchRule::Strong && self.conflict != ConflictFlavor::Graph {
            return Err(ConfigError::StrongNeedsGraphConflicts);
        }
        if !(self.rebuild_fraction >= 0.0) {
            return Err(ConfigError::RebuildFraction(self.rebuild_fraction));
        }
        Ok(())
    }

    /// `node/branch/conflict`, e.g. `best-first/sup/graph`.
    pub fn label(&self) -> String {
        format!(
            "{}/{}/{}",
            self.node_rule,
            self.branch_rule,
            conflict_name(self.conflict)
        )
    }

    /// Every valid rule combination: strong branching only with graph
    /// conflicts.
    pub fn all_combinations() -> Vec<SolverConfig> {
        let mut out = Vec::new();
        for node in NodeRule::ALL {
            for branch in BranchRule::ALL {
                for flavor in [ConflictFlavor::Standard, ConflictFlavor::Graph] {
                    if branch == BranchRule::Strong && flavor == ConflictFlavor::Standard {
                        continue;
                    }
                    out.push(SolverConfig::new(node, branch, flavor));
                }
            }
        }
        out
    }
}

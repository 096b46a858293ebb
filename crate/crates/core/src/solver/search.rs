use std::collections::HashSet;
use std::rc::Rc;
use std::time::Instant;

use super::branching::{best_scored, clause_rule, moms_rule, product_score, sup_scores, working_limit_reached, Cvds};
use super::config::{BranchRule, ConfigError, SolverConfig, SpEngine};
use super::instance::Instance;
use super::select::{select_node, Candidate, NodeId, SelectionContext};
use super::stats::{Solution, SolveStats, Status};
use crate::dag::{path_in_graph, shortest_path, ArcId, DagMark, InducedDag, Path, SearchStats, SpResult};
use crate::dynsp::LpaLabels;
use crate::logic::{
    complete_and_check, extract_conflict, Assignment, Completion, Conditioned, Conflict, ConflictFlavor, Lit, Reason,
    TrailMark, Var,
};
use crate::scalar::Weight;

#[derive(Debug, Clone)]
struct NodeData<W> {
    parent: Option<NodeId>,
    decision: Option<Lit>,
    relaxation: W,
    violations: usize,
    depth: u32,
    parent_path: Option<Rc<Path<W>>>,
}

#[derive(Debug, Clone, Copy)]
struct Level {
    node: NodeId,
    trail: TrailMark,
    dag: DagMark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Infeasible {
    Logic,
    Graph,
}

struct Search<'a, W: Weight> {
    inst: &'a Instance<W>,
    cfg: &'a SolverConfig,
    cond: Conditioned<'a>,
    graph: InducedDag<'a, W>,
    levels: Vec<Level>,
    lpa: Option<LpaLabels<'a, W>>,
    sp: SearchStats,
    cvds: Option<Cvds>,
    free_vars: Vec<Var>,
    nodes: Vec<NodeData<W>>,
    open: Vec<NodeId>,
    incumbent: Option<(Path<W>, Vec<bool>)>,
    stats: SolveStats<W>,
    seen_paths: HashSet<Vec<ArcId>>,
    ctx: SelectionContext<W>,
}

/// Solves an instance by branch and bound over partial assignments.
pub fn solve<W: Weight>(instance: &Instance<W>, config: &SolverConfig) -> Result<(Solution<W>, SolveStats<W>), ConfigError> {
    config.validate()?;
    let start = Instant::now();
    let mut search = Search::new(instance, config);
    let status = search.run(start);
    let mut stats = search.stats;
    stats.time_total = start.elapsed();
    let (path, witness) = match search.incumbent {
        Some((p, w)) => (Some(p), Some(w)),
        None => (None, None),
    };
    let status = match (status, &path) {
        (Status::LimitReached, _) => Status::LimitReached,
        (_, Some(_)) => Status::Optimal,
        (_, None) => Status::Infeasible,
    };
    Ok((Solution { status, path, witness }, stats))
}

impl<'a, W: Weight> Search<'a, W> {
    fn new(inst: &'a Instance<W>, cfg: &'a SolverConfig) -> Self {
        let lpa = match cfg.engine {
            SpEngine::Dynamic => Some(
                LpaLabels::new(inst.dag(), inst.heuristic().map(<[W]>::to_vec))
                    .with_rebuild_fraction(cfg.rebuild_fraction),
            ),
            SpEngine::Static => None,
        };
        let cvds = (cfg.branch_rule == BranchRule::Cvds).then(|| Cvds::new(inst.formula(), cfg.cvds));
        Search {
            inst,
            cfg,
            cond: Conditioned::new(inst.formula()),
            graph: InducedDag::new(inst.dag()),
            levels: Vec::new(),
            lpa,
            sp: SearchStats::default(),
            cvds,
            free_vars: inst.formula().free_vars().collect(),
            nodes: Vec::new(),
            open: Vec::new(),
            incumbent: None,
            stats: SolveStats::default(),
            seen_paths: HashSet::new(),
            ctx: SelectionContext {
                hybrid_depth: cfg.hybrid_depth,
                ..SelectionContext::default()
            },
        }
    }

    fn bound(&self) -> W {
        self.incumbent.as_ref().map_or(W::infinity(), |(p, _)| p.weight)
    }

    fn run(&mut self, start: Instant) -> Status {
        self.nodes.push(NodeData {
            parent: None,
            decision: None,
            relaxation: W::zero(),
            violations: 0,
            depth: 0,
            parent_path: None,
        });
        self.open.push(0);
        while !self.open.is_empty() {
            if self.cfg.node_limit.is_some_and(|n| self.stats.nodes >= n)
                || self.cfg.time_limit.is_some_and(|t| start.elapsed() >= t)
            {
                return Status::LimitReached;
            }
            let candidates: Vec<Candidate<W>> = self
                .open
                .iter()
                .map(|&id| {
                    let n = &self.nodes[id];
                    Candidate {
                        id,
                        parent: n.parent,
                        relaxation: n.relaxation,
                        violations: n.violations,
                    }
                })
                .collect();
            let dual = candidates
                .iter()
                .map(|c| c.relaxation)
                .min_by(|a, b| a.total_cmp(b))
                .expect("queue is nonempty");
            if self.stats.peak_dual_bound.map_or(true, |p| dual > p) {
                self.stats.peak_dual_bound = Some(dual);
            }
            self.ctx.incumbent = self.incumbent.as_ref().map(|(p, _)| p.weight);
            let pos = select_node(&candidates, self.cfg.node_rule, &self.ctx);
            let id = self.open.swap_remove(pos);
            let parent = self.nodes[id].parent;
            self.ctx.plunge_depth = match (parent, self.ctx.current) {
                (Some(p), Some(c)) if p == c => self.ctx.plunge_depth + 1,
                _ => 0,
            };
            self.ctx.current = Some(id);
            self.ctx.current_parent = parent;
            self.stats.nodes += 1;
            self.stats.max_depth = self.stats.max_depth.max(self.nodes[id].depth);
            self.process(id);
        }
        Status::Optimal
    }

    fn process(&mut self, id: NodeId) {
        let bound = self.bound();
        if id != 0 && self.nodes[id].relaxation >= bound {
            self.stats.outcomes.pruned_by_bound += 1;
            return;
        }
        match self.load(id) {
            Ok(()) => {}
            Err(Infeasible::Logic) => {
                self.stats.outcomes.logic_infeasible += 1;
                return;
            }
            Err(Infeasible::Graph) => {
                self.stats.outcomes.graph_infeasible += 1;
                return;
            }
        }

        let reused = match &self.nodes[id].parent_path {
            Some(pp) if self.cfg.parent_path_check && path_in_graph(&pp.arcs, self.graph.active()) => {
                Some(Rc::clone(pp))
            }
            _ => None,
        };
        let path = match reused {
            Some(p) => {
                self.stats.parent_path_reuses += 1;
                p
            }
            None => match self.search(bound) {
                SpResult::Found(p) => {
                    if !self.seen_paths.insert(p.arcs.clone()) {
                        self.stats.duplicate_paths += 1;
                    }
                    Rc::new(p)
                }
                SpResult::Disconnected => {
                    self.stats.outcomes.graph_infeasible += 1;
                    return;
                }
                SpResult::Bounded => {
                    self.stats.outcomes.pruned_by_bound += 1;
                    return;
                }
            },
        };
        if path.weight >= bound {
            self.stats.outcomes.pruned_by_bound += 1;
            return;
        }

        let tentative = self.tentative(&path);
        let values = match complete_and_check(&self.cond, &tentative, self.inst.definitions()) {
            Completion::Satisfied(full) => {
                debug_assert!(self.inst.is_feasible(&path.arcs, &full));
                log::debug!("node {id}: incumbent {}", path.weight);
                self.stats.incumbent_history.push((self.stats.nodes, path.weight));
                self.stats.outcomes.incumbent_updates += 1;
                self.incumbent = Some(((*path).clone(), full));
                return;
            }
            Completion::Unsatisfied(values) => values,
        };
        let conflict = self.conflict(&values);
        if id == 0 {
            self.ctx.root = Some((path.weight, conflict.violated.len()));
        }
        if let Some(cvds) = &mut self.cvds {
            let vars: Vec<Var> = self
                .cond
                .trail()
                .lits()
                .map(|l| l.var())
                .chain(conflict.vars.iter().copied())
                .collect();
            cvds.bump(vars);
        }
        let var = self.choose(&conflict, &path);
        debug_assert!(self.cond.value(var).is_none());
        self.stats.outcomes.branched += 1;
        let depth = self.nodes[id].depth + 1;
        for lit in [var.neg(), var.pos()] {
            let child = self.nodes.len();
            self.nodes.push(NodeData {
                parent: Some(id),
                decision: Some(lit),
                relaxation: path.weight,
                violations: conflict.violated.len(),
                depth,
                parent_path: Some(Rc::clone(&path)),
            });
            self.open.push(child);
        }
    }

    /// The node's trail `T` extended by the assignment induced by `path`.
    fn tentative(&self, path: &Path<W>) -> Assignment {
        let dag = self.inst.dag();
        let mut on_path = vec![false; dag.num_arcs()];
        for &a in &path.arcs {
            on_path[a] = true;
        }
        let mut values = self.cond.trail().values().to_vec();
        for (a, v) in dag.mapping() {
            debug_assert!(values[v.index()].map_or(true, |x| x == on_path[a]));
            values[v.index()] = Some(on_path[a]);
        }
        values
    }

    fn conflict(&mut self, values: &Assignment) -> Conflict {
        let defs = self.inst.definitions();
        let standard = || {
            extract_conflict(&self.cond, values, ConflictFlavor::Standard, defs).expect("some clause is violated")
        };
        let mut conflict = match self.cfg.conflict {
            ConflictFlavor::Standard => standard(),
            ConflictFlavor::Graph => {
                let c = extract_conflict(&self.cond, values, ConflictFlavor::Graph, defs).expect("some clause is violated");
                if c.is_empty() {
                    self.stats.conflict_fallbacks += 1;
                    standard()
                } else {
                    c
                }
            }
        };
        if conflict.is_empty() {
            let v = self
                .inst
                .formula()
                .vars()
                .find(|&v| self.cond.value(v).is_none())
                .expect("an unsatisfied formula has an unassigned variable");
            conflict.vars.push(v);
        }
        conflict
    }

    /// Rebuilds the trail and induced graph of `id` from the deepest level
    /// shared with the currently loaded node.
    fn load(&mut self, id: NodeId) -> Result<(), Infeasible> {
        let mut chain = Vec::new();
        let mut cur = Some(id);
        while let Some(n) = cur {
            chain.push(n);
            cur = self.nodes[n].parent;
        }
        chain.reverse();
        let common = self
            .levels
            .iter()
            .zip(&chain)
            .take_while(|(l, &n)| l.node == n)
            .count();
        if common < self.levels.len() {
            let lv = self.levels[common];
            self.cond.rollback(lv.trail);
            self.graph.rollback(lv.dag);
            self.levels.truncate(common);
        }
        for &n in &chain[common..] {
            self.levels.push(Level {
                node: n,
                trail: self.cond.mark(),
                dag: self.graph.mark(),
            });
            if let Some(lit) = self.nodes[n].decision {
                match self.cond.lit_value(lit) {
                    Some(true) => {}
                    Some(false) => return Err(Infeasible::Logic),
                    None => {
                        self.cond.assign(lit, Reason::Decision);
                    }
                }
            }
            self.fixpoint(true)?;
        }
        Ok(())
    }

    /// Alternates unit propagation and enforcement until neither adds a
    /// literal. Returns the number of literals added.
    fn fixpoint(&mut self, record: bool) -> Result<usize, Infeasible> {
        let start = self.cond.trail().len();
        loop {
            if self.cond.unit_propagate().is_err() {
                if record {
                    if let Some(cvds) = &mut self.cvds {
                        cvds.bump(self.cond.trail().lits().map(|l| l.var()));
                    }
                }
                return Err(Infeasible::Logic);
            }
            if self.cfg.pure_literals {
                self.cond.pure_literal_eliminate(self.free_vars.iter().copied());
            }
            let fresh = self.graph.enforce(self.cond.trail()).map_err(|_| Infeasible::Graph)?;
            if fresh.is_empty() {
                break;
            }
            let dag = self.inst.dag();
            for a in fresh {
                let v = dag.arc_var(a).expect("only mapped arcs are reported");
                if self.cond.value(v).is_none() {
                    self.cond.assign(v.neg(), Reason::Enforcement);
                }
            }
        }
        Ok(self.cond.trail().len() - start)
    }

    fn search(&mut self, bound: W) -> SpResult<W> {
        let t0 = Instant::now();
        let result = match &mut self.lpa {
            Some(lpa) => {
                let before = lpa.stats().arc_relaxations;
                lpa.set_graph(self.graph.active());
                let r = lpa.compute(bound);
                self.stats.arc_relaxations += lpa.stats().arc_relaxations - before;
                r
            }
            None => {
                let before = self.sp.arc_relaxations;
                let r = shortest_path(&self.graph, self.inst.heuristic(), bound, &mut self.sp);
                self.stats.arc_relaxations += self.sp.arc_relaxations - before;
                r
            }
        };
        self.stats.sp_searches += 1;
        self.stats.time_sp += t0.elapsed();
        result
    }

    fn choose(&mut self, conflict: &Conflict, path: &Path<W>) -> Var {
        let eps = self.cfg.epsilon;
        match self.cfg.branch_rule {
            BranchRule::Clause => clause_rule(&self.cond, conflict, self.inst.definitions()),
            BranchRule::Moms => moms_rule(&self.cond, conflict),
            BranchRule::Sup => {
                let scores = sup_scores(&mut self.cond, conflict, eps, self.cfg.propagation_infinity);
                best_scored(&scores).expect("conflict is nonempty")
            }
            BranchRule::Dup => {
                let cap = self.cfg.propagation_infinity;
                let scores: Vec<(Var, f64)> = conflict
                    .vars
                    .iter()
                    .map(|&v| {
                        let up = self.deep_gain(v.pos()).map_or(cap, |n| n as f64);
                        let down = self.deep_gain(v.neg()).map_or(cap, |n| n as f64);
                        (v, product_score(eps, up, down))
                    })
                    .collect();
                best_scored(&scores).expect("conflict is nonempty")
            }
            BranchRule::Cvds => self.cvds.as_ref().expect("scores exist for this rule").choose(conflict),
            BranchRule::Strong => self.strong(conflict, path),
        }
    }

    fn with_lookahead<T>(&mut self, lit: Lit, f: impl FnOnce(&mut Self, Result<usize, Infeasible>) -> T) -> T {
        let tm = self.cond.mark();
        let dm = self.graph.mark();
        self.cond.assign(lit, Reason::Decision);
        let r = self.fixpoint(false);
        let out = f(self, r);
        self.cond.rollback(tm);
        self.graph.rollback(dm);
        out
    }

    /// Literals added by the propagation and enforcement loop after `lit`.
    fn deep_gain(&mut self, lit: Lit) -> Option<usize> {
        self.with_lookahead(lit, |_, r| r.ok())
    }

    /// Increase of the relaxation value in the child `T ∪ {lit}`, in natural
    /// units, or `None` if the child is infeasible or pruned.
    fn strong_gain(&mut self, lit: Lit, base: W) -> Option<f64> {
        let bound = self.bound();
        let scale = self.inst.unit_scale();
        self.with_lookahead(lit, |s, r| {
            r.ok()?;
            let t0 = Instant::now();
            let before = s.sp.arc_relaxations;
            let result = shortest_path(&s.graph, s.inst.heuristic(), bound, &mut s.sp);
            s.stats.arc_relaxations += s.sp.arc_relaxations - before;
            s.stats.sp_searches += 1;
            s.stats.lookahead_searches += 1;
            s.stats.time_sp += t0.elapsed();
            let p = result.path()?;
            Some(p.weight.sub_or_inf(base).as_f64() / scale)
        })
    }

    fn strong(&mut self, conflict: &Conflict, path: &Path<W>) -> Var {
        let cap = self.cfg.strong_infinity;
        let total = conflict.vars.len();
        let mut best: Option<(Var, f64)> = None;
        let mut since_best = 0;
        for (i, &v) in conflict.vars.iter().enumerate() {
            let up = self.strong_gain(v.pos(), path.weight).unwrap_or(cap);
            let down = self.strong_gain(v.neg(), path.weight).unwrap_or(cap);
            let score = product_score(self.cfg.epsilon, up, down);
            if best.map_or(true, |(_, b)| score > b) {
                best = Some((v, score));
                since_best = 0;
            } else {
                since_best += 1;
            }
            if working_limit_reached(self.cfg.lookahead, i + 1, total, since_best) {
                break;
            }
        }
        best.expect("conflict is nonempty").0
    }
}

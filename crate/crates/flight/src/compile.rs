use std::collections::{BTreeMap, BTreeSet, HashMap};

use lcsp_core::dag::{Dag, DagError, Path};
use lcsp_core::logic::{ClauseVarMap, CnfFormula, Definition, Lit, LogicError, TseitinEncoder, Var, VarKind};
use lcsp_core::scalar::{to_fixed_ceil, FIXED_POINT_SCALE};
use lcsp_core::solver::{Instance, InstanceError};
use thiserror::Error;

use crate::aircraft::{Aircraft, ArcCost, Level, LevelTable};
use crate::network::ProjectedNetwork;
use crate::space::{SearchSpace, Vertex3d};
use crate::tfr::{Subject, Tfr, TfrLiteral};

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("unknown airport {0:?}")]
    UnknownAirport(String),
    #[error("origin and destination are both {0:?}")]
    SameAirport(String),
    #[error("no route from {0:?} to {1:?} inside the search space")]
    EmptySearchSpace(String, String),
    #[error("restriction {tfr:?} references unknown waypoint {id:?}")]
    UnknownWaypoint { tfr: String, id: String },
    #[error("restriction {tfr:?} uses levels {lo}-{hi} outside 1..={max}")]
    LevelOutOfRange { tfr: String, lo: Level, hi: Level, max: Level },
    #[error("invalid aircraft parameters")]
    InvalidAircraft,
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// One materialized 3-D arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcInfo {
    pub segment: usize,
    pub from_level: Level,
    pub to_level: Level,
    pub cost: ArcCost,
}

/// Free variable standing for "the route uses one of these arcs".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aggregate {
    pub var: Var,
    pub arcs: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompileReport {
    /// Restrictions whose graph literals all lie outside the search space.
    pub dropped: Vec<String>,
    /// Restrictions satisfied by constant folding.
    pub satisfied: Vec<String>,
    /// Restrictions falsified by constant folding.
    pub violated: Vec<String>,
    pub encoded: usize,
}

/// A flight planning problem as a core instance with fixed-point fuel
/// weights (kg) and the great-circle heuristic attached.
#[derive(Debug, Clone)]
pub struct CompiledInstance {
    pub instance: Instance<i64>,
    pub vertices: Vec<Vertex3d>,
    pub arcs: Vec<ArcInfo>,
    pub aggregates: Vec<Aggregate>,
    pub report: CompileReport,
    waypoint_ids: Vec<String>,
}

/// A path translated back to waypoints and levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub fixes: Vec<(String, Level)>,
    pub consumption_kg: f64,
    pub duration_s: f64,
}

impl CompiledInstance {
    pub fn route(&self, path: &Path<i64>) -> Route {
        let dag = self.instance.dag();
        let mut fixes = Vec::with_capacity(path.arcs.len() + 1);
        let mut push = |v: usize| {
            let x = self.vertices[v];
            fixes.push((self.waypoint_ids[x.waypoint].clone(), x.level));
        };
        push(dag.source());
        for &a in &path.arcs {
            push(dag.arc(a).head);
        }
        Route {
            fixes,
            consumption_kg: path.arcs.iter().map(|&a| self.arcs[a].cost.consumption_kg).sum(),
            duration_s: path.arcs.iter().map(|&a| self.arcs[a].cost.duration_s).sum(),
        }
    }
}

/// Literal after resolution against the search space.
#[derive(Debug, Clone)]
enum Resolved {
    Const(bool),
    Arcs(Vec<usize>, bool),
}

pub fn compile(
    network: &ProjectedNetwork,
    levels: &LevelTable,
    aircraft: &Aircraft,
    tfrs: &[Tfr],
    origin: &str,
    destination: &str,
) -> Result<CompiledInstance, CompileError> {
    let s = network
        .waypoint_index(origin)
        .ok_or_else(|| CompileError::UnknownAirport(origin.into()))?;
    let t = network
        .waypoint_index(destination)
        .ok_or_else(|| CompileError::UnknownAirport(destination.into()))?;
    if s == t {
        return Err(CompileError::SameAirport(origin.into()));
    }
    if !aircraft.is_valid() {
        return Err(CompileError::InvalidAircraft);
    }
    for tfr in tfrs {
        check_references(network, levels, tfr)?;
    }
    let space = SearchSpace::new(network, levels, aircraft, s, t);
    let (vertices, raw_arcs) = materialize(&space)
        .ok_or_else(|| CompileError::EmptySearchSpace(origin.into(), destination.into()))?;

    let index: HashMap<Vertex3d, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut incoming = vec![Vec::new(); vertices.len()];
    let mut outgoing = vec![Vec::new(); vertices.len()];
    for (a, (u, v, _)) in raw_arcs.iter().enumerate() {
        outgoing[*u].push(a);
        incoming[*v].push(a);
    }
    let arcs: Vec<ArcInfo> = raw_arcs.iter().map(|(_, _, info)| *info).collect();

    let mut report = CompileReport::default();
    let mut restrictions: Vec<Vec<Vec<(Vec<usize>, bool)>>> = Vec::new();
    let mut infeasible = false;
    for tfr in tfrs {
        if outside(&space, tfr) {
            report.dropped.push(tfr.name.clone());
            continue;
        }
        let resolve = |l: &TfrLiteral| resolve(&space, &index, &incoming, &outgoing, &arcs, s, t, l);
        let mut dnf = Vec::new();
        let mut satisfied = false;
        for conj in &tfr.dnf {
            let mut lits = Vec::new();
            let mut falsified = false;
            for l in conj {
                match resolve(l) {
                    Resolved::Const(true) => {}
                    Resolved::Const(false) => falsified = true,
                    Resolved::Arcs(set, neg) => lits.push((set, neg)),
                }
            }
            if falsified {
                continue;
            }
            if lits.is_empty() {
                satisfied = true;
                break;
            }
            lits.sort();
            lits.dedup();
            dnf.push(lits);
        }
        if satisfied {
            report.satisfied.push(tfr.name.clone());
        } else if dnf.is_empty() {
            report.violated.push(tfr.name.clone());
            infeasible = true;
        } else {
            restrictions.push(dnf);
        }
    }
    report.encoded = restrictions.len();

    // graph variables for referenced arcs only, in arc order
    let referenced: BTreeSet<usize> = restrictions
        .iter()
        .flatten()
        .flatten()
        .flat_map(|(set, _)| set.iter().copied())
        .collect();
    let mut formula = CnfFormula::with_vars(vec![VarKind::Graph; referenced.len()]);
    let arc_var: BTreeMap<usize, Var> = referenced.iter().enumerate().map(|(i, &a)| (a, Var(i as u32))).collect();
    let mut definitions = ClauseVarMap::new();
    let mut aggregates: Vec<Aggregate> = Vec::new();
    let mut by_set: HashMap<Vec<usize>, Var> = HashMap::new();
    let mut aggregate_of = |formula: &mut CnfFormula, definitions: &mut ClauseVarMap, set: &Vec<usize>| -> Var {
        if let Some(&v) = by_set.get(set) {
            return v;
        }
        let agg = formula.add_var(VarKind::Free);
        let members: Vec<Lit> = set.iter().map(|a| arc_var[a].pos()).collect();
        formula.add_clause(std::iter::once(agg.neg()).chain(members.iter().copied()));
        for &m in &members {
            formula.add_clause([agg.pos(), !m]);
        }
        definitions.insert(agg, Definition::Or(members));
        by_set.insert(set.clone(), agg);
        aggregates.push(Aggregate {
            var: agg,
            arcs: set.clone(),
        });
        agg
    };
    let mut dnfs: Vec<Vec<Vec<Lit>>> = Vec::with_capacity(restrictions.len());
    for r in &restrictions {
        let dnf = r
            .iter()
            .map(|conj| {
                conj.iter()
                    .map(|(set, neg)| aggregate_of(&mut formula, &mut definitions, set).lit(!neg))
                    .collect()
            })
            .collect();
        dnfs.push(dnf);
    }
    let mut enc = TseitinEncoder::new(&mut formula, &mut definitions);
    for (i, dnf) in dnfs.iter().enumerate() {
        enc.encode(i, dnf)?;
    }
    if infeasible {
        formula.add_clause(std::iter::empty());
    }

    let triples = raw_arcs
        .iter()
        .map(|(u, v, info)| (*u, *v, to_fixed_ceil(info.cost.consumption_kg)));
    let mut dag = Dag::from_triples(vertices.len(), triples, index[&space.source3d()], index[&space.target3d()])?;
    for (&a, &v) in &arc_var {
        dag.map_arc(a, v)?;
    }
    let h: Vec<i64> = vertices
        .iter()
        .map(|&v| ((space.heuristic_kg(v) - 1e-6) * FIXED_POINT_SCALE as f64).floor().max(0.0) as i64)
        .collect();
    let instance = Instance::new(dag, formula, definitions)?
        .with_heuristic(h)?
        .with_unit_scale(FIXED_POINT_SCALE as f64);
    log::debug!(
        "compiled {origin}-{destination}: {} vertices, {} arcs, {} restrictions ({} dropped)",
        vertices.len(),
        arcs.len(),
        report.encoded,
        report.dropped.len()
    );
    Ok(CompiledInstance {
        instance,
        vertices,
        arcs,
        aggregates,
        report,
        waypoint_ids: network.waypoints().iter().map(|w| w.id.clone()).collect(),
    })
}

fn check_references(network: &ProjectedNetwork, levels: &LevelTable, tfr: &Tfr) -> Result<(), CompileError> {
    for l in tfr.dnf.iter().flatten() {
        let ids: Vec<&String> = match &l.subject {
            Subject::Vertex(ids) | Subject::Departure(ids) | Subject::Arrival(ids) => ids.iter().collect(),
            Subject::Segment(s) => s.iter().flat_map(|(u, v)| [u, v]).collect(),
        };
        if let Some(id) = ids.into_iter().find(|id| network.waypoint_index(id).is_none()) {
            return Err(CompileError::UnknownWaypoint {
                tfr: tfr.name.clone(),
                id: id.clone(),
            });
        }
        if let Some((lo, hi)) = l.levels {
            if !levels.contains(lo) || !levels.contains(hi) {
                return Err(CompileError::LevelOutOfRange {
                    tfr: tfr.name.clone(),
                    lo,
                    hi,
                    max: levels.len(),
                });
            }
        }
    }
    Ok(())
}

/// True if the restriction mentions route elements and all of them lie
/// outside the search space.
fn outside(space: &SearchSpace<'_>, tfr: &Tfr) -> bool {
    let net = space.network();
    let mut graph_literals = tfr.dnf.iter().flatten().filter(|l| l.subject.is_graph()).peekable();
    if graph_literals.peek().is_none() {
        return false;
    }
    graph_literals.all(|l| match &l.subject {
        Subject::Vertex(ids) => ids.iter().all(|id| !space.contains(net.waypoint_index(id).unwrap())),
        Subject::Segment(s) => s.iter().all(|(u, v)| {
            !space.contains(net.waypoint_index(u).unwrap()) || !space.contains(net.waypoint_index(v).unwrap())
        }),
        _ => unreachable!(),
    })
}

#[allow(clippy::too_many_arguments)]
fn resolve(
    space: &SearchSpace<'_>,
    index: &HashMap<Vertex3d, usize>,
    incoming: &[Vec<usize>],
    outgoing: &[Vec<usize>],
    arcs: &[ArcInfo],
    s: usize,
    t: usize,
    l: &TfrLiteral,
) -> Resolved {
    let net = space.network();
    let (lo, hi) = l.levels.unwrap_or((1, space.levels().len()));
    let value = |b: bool| Resolved::Const(b != l.negated);
    let mut set = Vec::new();
    match &l.subject {
        Subject::Departure(ids) => return value(ids.iter().any(|id| net.waypoint_index(id) == Some(s))),
        Subject::Arrival(ids) => return value(ids.iter().any(|id| net.waypoint_index(id) == Some(t))),
        Subject::Vertex(ids) => {
            for id in ids {
                let w = net.waypoint_index(id).unwrap();
                for level in lo..=hi {
                    if let Some(&v) = index.get(&Vertex3d { waypoint: w, level }) {
                        set.extend(if w == s { &outgoing[v] } else { &incoming[v] });
                    }
                }
            }
        }
        Subject::Segment(pairs) => {
            let wanted: Vec<(usize, usize)> = pairs
                .iter()
                .map(|(u, v)| (net.waypoint_index(u).unwrap(), net.waypoint_index(v).unwrap()))
                .collect();
            for (a, info) in arcs.iter().enumerate() {
                let seg = net.segments()[info.segment];
                let (a_lo, a_hi) = (info.from_level.min(info.to_level), info.from_level.max(info.to_level));
                if wanted.contains(&(seg.tail, seg.head)) && a_lo <= hi && lo <= a_hi {
                    set.push(a);
                }
            }
        }
    }
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        value(false)
    } else {
        Resolved::Arcs(set, l.negated)
    }
}

type RawArc = (usize, usize, ArcInfo);

/// Expands the 3-D graph from the origin and keeps the vertices that can
/// reach the destination. Vertices are numbered in orientation order.
fn materialize(space: &SearchSpace<'_>) -> Option<(Vec<Vertex3d>, Vec<RawArc>)> {
    let start = space.source3d();
    let goal = space.target3d();
    let mut ids: HashMap<Vertex3d, usize> = HashMap::from([(start, 0)]);
    let mut found = vec![start];
    let mut edges: Vec<RawArc> = Vec::new();
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        let ui = ids[&u];
        for e in space.expand_neighbors(u) {
            let vi = *ids.entry(e.head).or_insert_with(|| {
                found.push(e.head);
                stack.push(e.head);
                found.len() - 1
            });
            edges.push((
                ui,
                vi,
                ArcInfo {
                    segment: e.segment,
                    from_level: u.level,
                    to_level: e.head.level,
                    cost: e.cost,
                },
            ));
        }
    }
    let goal_id = *ids.get(&goal)?;
    // backward reachability
    let mut preds = vec![Vec::new(); found.len()];
    for (u, v, _) in &edges {
        preds[*v].push(*u);
    }
    let mut useful = vec![false; found.len()];
    useful[goal_id] = true;
    let mut stack = vec![goal_id];
    while let Some(v) = stack.pop() {
        for &u in &preds[v] {
            if !useful[u] {
                useful[u] = true;
                stack.push(u);
            }
        }
    }
    let mut order: Vec<usize> = (0..found.len()).filter(|&i| useful[i]).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (found[a], found[b]);
        if x.waypoint == y.waypoint {
            x.level.cmp(&y.level)
        } else if space.precedes(x.waypoint, y.waypoint) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    let mut renumber = vec![usize::MAX; found.len()];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new;
    }
    let vertices: Vec<Vertex3d> = order.iter().map(|&i| found[i]).collect();
    let mut arcs: Vec<RawArc> = edges
        .into_iter()
        .filter(|(u, v, _)| useful[*u] && useful[*v])
        .map(|(u, v, info)| (renumber[u], renumber[v], info))
        .collect();
    arcs.sort_by_key(|(u, v, info)| (*u, *v, info.segment));
    Some((vertices, arcs))
}

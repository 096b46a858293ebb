use super::enforce::InducedDag;
use super::graph::{ArcId, Dag, VertexId};
use crate::scalar::Weight;

/// An s,t-path as a sequence of arc ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<W> {
    pub arcs: Vec<ArcId>,
    pub weight: W,
}

impl<W: Weight> Path<W> {
    /// The empty path at `s` (only an s,t-path when `s = t`).
    pub fn empty() -> Self {
        Path {
            arcs: Vec::new(),
            weight: W::zero(),
        }
    }

    pub fn vertices(&self, dag: &Dag<W>) -> Vec<VertexId> {
        let mut out = vec![dag.source()];
        out.extend(self.arcs.iter().map(|&a| dag.arc(a).head));
        out
    }

    /// Recomputes the weight from the arc list.
    pub fn weight_in(arcs: &[ArcId], dag: &Dag<W>) -> W {
        arcs.iter()
            .fold(W::zero(), |acc, &a| acc.add_or_inf(dag.weight(a)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpResult<W> {
    Found(Path<W>),
    /// No s,t-path exists in the searched graph.
    Disconnected,
    /// Every s,t-path costs at least the bound.
    Bounded,
}

impl<W> SpResult<W> {
    pub fn path(&self) -> Option<&Path<W>> {
        match self {
            SpResult::Found(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub searches: u64,
    pub arc_relaxations: u64,
}

/// Shortest path in the induced graph. See [`shortest_path_masked`].
pub fn shortest_path<W: Weight>(
    graph: &InducedDag<'_, W>,
    heuristic: Option<&[W]>,
    bound: W,
    stats: &mut SearchStats,
) -> SpResult<W> {
    shortest_path_masked(graph.dag(), graph.active(), heuristic, bound, stats)
}

/// Shortest s,t-path over the active arcs, by dynamic programming in
/// topological order.
///
/// Vertices with `d(v) + h(v) ≥ bound` are not expanded. Among optimal paths
/// the one with the lexicographically smallest arc-id sequence is returned,
/// so the result does not depend on the engine that computed the distance.
pub fn shortest_path_masked<W: Weight>(
    dag: &Dag<W>,
    active: &[bool],
    heuristic: Option<&[W]>,
    bound: W,
    stats: &mut SearchStats,
) -> SpResult<W> {
    stats.searches += 1;
    let (s, t) = (dag.source(), dag.target());
    if s == t {
        return if W::zero() < bound {
            SpResult::Found(Path::empty())
        } else {
            SpResult::Bounded
        };
    }
    let (rs, rt) = (dag.rank(s), dag.rank(t));
    if rs > rt {
        return SpResult::Disconnected;
    }
    let n = dag.num_vertices();
    let mut dist = vec![W::infinity(); n];
    dist[s] = W::zero();
    let mut pruned = false;
    for &u in &dag.order()[rs..rt] {
        let du = dist[u];
        if du.is_infinite() {
            continue;
        }
        let hu = heuristic.map_or(W::zero(), |h| h[u]);
        if du.add_or_inf(hu) >= bound {
            pruned = true;
            continue;
        }
        for &a in dag.out_arcs(u) {
            if !active[a] {
                continue;
            }
            stats.arc_relaxations += 1;
            let arc = dag.arc(a);
            let nd = du.add_or_inf(arc.weight);
            if nd < dist[arc.head] {
                dist[arc.head] = nd;
            }
        }
    }
    let best = dist[t];
    if best.is_infinite() {
        return if pruned {
            SpResult::Bounded
        } else {
            SpResult::Disconnected
        };
    }
    if best >= bound {
        return SpResult::Bounded;
    }

    // Distances to t over the same span, then a greedy walk along the
    // smallest tight arc id.
    let mut to_t = vec![W::infinity(); n];
    to_t[t] = W::zero();
    for &u in dag.order()[rs..rt].iter().rev() {
        let mut m = W::infinity();
        for &a in dag.out_arcs(u) {
            if !active[a] {
                continue;
            }
            stats.arc_relaxations += 1;
            let arc = dag.arc(a);
            let c = arc.weight.add_or_inf(to_t[arc.head]);
            if c < m {
                m = c;
            }
        }
        to_t[u] = m;
    }
    let mut arcs = Vec::new();
    let mut u = s;
    let mut weight = W::zero();
    while u != t {
        let next = dag
            .out_arcs(u)
            .iter()
            .copied()
            .filter(|&a| active[a])
            .filter(|&a| {
                let arc = dag.arc(a);
                !to_t[arc.head].is_infinite() && arc.weight.add_or_inf(to_t[arc.head]) == to_t[u]
            })
            .min()
            .expect("a tight arc leaves every vertex on a shortest path");
        arcs.push(next);
        weight = weight.add_or_inf(dag.weight(next));
        u = dag.arc(next).head;
    }
    SpResult::Found(Path { arcs, weight })
}

/// Whether every arc of `arcs` is active.
pub fn path_in_graph(arcs: &[ArcId], active: &[bool]) -> bool {
    arcs.iter().all(|&a| active[a])
}

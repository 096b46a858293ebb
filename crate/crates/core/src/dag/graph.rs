use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::logic::Var;
use crate::scalar::Weight;

pub type VertexId = usize;
pub type ArcId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc<W> {
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: W,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DagError {
    #[error("the graph contains a directed cycle")]
    CycleDetected,
    #[error("arc {arc} references vertex {vertex} outside 0..{num_vertices}")]
    VertexOutOfRange {
        arc: ArcId,
        vertex: VertexId,
        num_vertices: usize,
    },
    #[error("arc {0} has a negative or undefined weight")]
    NegativeWeight(ArcId),
    #[error("endpoint {0} is not a vertex")]
    BadEndpoint(VertexId),
    #[error("arc {0} does not exist")]
    UnknownArc(ArcId),
    #[error("variable {var} is already mapped to arc {arc}")]
    VariableMappedTwice { var: u32, arc: ArcId },
    #[error("arc {0} already carries a variable")]
    ArcMappedTwice(ArcId),
}

/// Kahn's algorithm with smallest-vertex-id tie-breaking. Returns the rank
/// of every vertex.
pub fn topological_sort(num_vertices: usize, arcs: &[(VertexId, VertexId)]) -> Result<Vec<usize>, DagError> {
    let mut indeg = vec![0usize; num_vertices];
    let mut out: Vec<Vec<VertexId>> = vec![Vec::new(); num_vertices];
    for (i, &(u, v)) in arcs.iter().enumerate() {
        for x in [u, v] {
            if x >= num_vertices {
                return Err(DagError::VertexOutOfRange {
                    arc: i,
                    vertex: x,
                    num_vertices,
                });
            }
        }
        out[u].push(v);
        indeg[v] += 1;
    }
    let mut ready: BinaryHeap<Reverse<VertexId>> = (0..num_vertices)
        .filter(|&v| indeg[v] == 0)
        .map(Reverse)
        .collect();
    let mut rank = vec![usize::MAX; num_vertices];
    let mut next = 0;
    while let Some(Reverse(u)) = ready.pop() {
        rank[u] = next;
        next += 1;
        for &v in &out[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(Reverse(v));
            }
        }
    }
    if next != num_vertices {
        return Err(DagError::CycleDetected);
    }
    Ok(rank)
}

/// An immutable weighted DAG with source, target, topological order and the
/// partial arc ↔ variable mapping.
#[derive(Debug, Clone)]
pub struct Dag<W> {
    arcs: Vec<Arc<W>>,
    out: Vec<Vec<ArcId>>,
    inc: Vec<Vec<ArcId>>,
    rank: Vec<usize>,
    order: Vec<VertexId>,
    source: VertexId,
    target: VertexId,
    arc_var: Vec<Option<Var>>,
    var_arc: Vec<Option<ArcId>>,
    from_source: Vec<bool>,
    to_target: Vec<bool>,
}

impl<W: Weight> Dag<W> {
    pub fn new(
        num_vertices: usize,
        arcs: Vec<Arc<W>>,
        source: VertexId,
        target: VertexId,
    ) -> Result<Self, DagError> {
        for v in [source, target] {
            if v >= num_vertices {
                return Err(DagError::BadEndpoint(v));
            }
        }
        for (i, a) in arcs.iter().enumerate() {
            if !(a.weight >= W::zero()) || a.weight.is_infinite() {
                return Err(DagError::NegativeWeight(i));
            }
        }
        let pairs: Vec<(VertexId, VertexId)> = arcs.iter().map(|a| (a.tail, a.head)).collect();
        let rank = topological_sort(num_vertices, &pairs)?;
        let mut order = vec![0; num_vertices];
        for (v, &r) in rank.iter().enumerate() {
            order[r] = v;
        }
        let mut out = vec![Vec::new(); num_vertices];
        let mut inc = vec![Vec::new(); num_vertices];
        for (i, a) in arcs.iter().enumerate() {
            out[a.tail].push(i);
            inc[a.head].push(i);
        }
        let mut from_source = vec![false; num_vertices];
        from_source[source] = true;
        for &u in &order {
            if from_source[u] {
                for &a in &out[u] {
                    from_source[arcs[a].head] = true;
                }
            }
        }
        let mut to_target = vec![false; num_vertices];
        to_target[target] = true;
        for &v in order.iter().rev() {
            if to_target[v] {
                for &a in &inc[v] {
                    to_target[arcs[a].tail] = true;
                }
            }
        }
        let num_arcs = arcs.len();
        Ok(Dag {
            arcs,
            out,
            inc,
            rank,
            order,
            source,
            target,
            arc_var: vec![None; num_arcs],
            var_arc: Vec::new(),
            from_source,
            to_target,
        })
    }

    /// Builds a DAG from `(tail, head, weight)` triples.
    pub fn from_triples(
        num_vertices: usize,
        arcs: impl IntoIterator<Item = (VertexId, VertexId, W)>,
        source: VertexId,
        target: VertexId,
    ) -> Result<Self, DagError> {
        let arcs = arcs
            .into_iter()
            .map(|(tail, head, weight)| Arc { tail, head, weight })
            .collect();
        Self::new(num_vertices, arcs, source, target)
    }

    /// Records `σ(arc) = var`. The mapping must stay injective.
    pub fn map_arc(&mut self, arc: ArcId, var: Var) -> Result<(), DagError> {
        if arc >= self.arcs.len() {
            return Err(DagError::UnknownArc(arc));
        }
        if self.arc_var[arc].is_some() {
            return Err(DagError::ArcMappedTwice(arc));
        }
        if self.var_arc.len() <= var.index() {
            self.var_arc.resize(var.index() + 1, None);
        }
        if let Some(other) = self.var_arc[var.index()] {
            return Err(DagError::VariableMappedTwice { var: var.0, arc: other });
        }
        self.var_arc[var.index()] = Some(arc);
        self.arc_var[arc] = Some(var);
        Ok(())
    }
}

impl<W: Copy> Dag<W> {
    pub fn num_vertices(&self) -> usize {
        self.out.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc(&self, a: ArcId) -> &Arc<W> {
        &self.arcs[a]
    }

    pub fn arcs(&self) -> &[Arc<W>] {
        &self.arcs
    }

    pub fn weight(&self, a: ArcId) -> W {
        self.arcs[a].weight
    }

    pub fn out_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.out[v]
    }

    pub fn in_arcs(&self, v: VertexId) -> &[ArcId] {
        &self.inc[v]
    }

    pub fn rank(&self, v: VertexId) -> usize {
        self.rank[v]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    /// Vertices in topological order.
    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    pub fn arc_var(&self, a: ArcId) -> Option<Var> {
        self.arc_var[a]
    }

    pub fn var_arc(&self, v: Var) -> Option<ArcId> {
        self.var_arc.get(v.index()).copied().flatten()
    }

    /// Mapped `(arc, var)` pairs in arc order.
    pub fn mapping(&self) -> impl Iterator<Item = (ArcId, Var)> + '_ {
        self.arc_var
            .iter()
            .enumerate()
            .filter_map(|(a, v)| v.map(|v| (a, v)))
    }

    pub fn reachable_from_source(&self, v: VertexId) -> bool {
        self.from_source[v]
    }

    pub fn reaches_target(&self, v: VertexId) -> bool {
        self.to_target[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enforce_figure_order() {
        // s=0, v2=1, v3=2, v4=3, v5=4, t=5
        let arcs = [
            (0, 2),
            (0, 1),
            (0, 4),
            (2, 3),
            (2, 1),
            (1, 4),
            (1, 3),
            (4, 3),
            (1, 5),
            (4, 5),
            (3, 5),
        ];
        let rank = topological_sort(6, &arcs).unwrap();
        let mut order = vec![0; 6];
        for (v, r) in rank.iter().enumerate() {
            order[*r] = v;
        }
        // s, v3, v2, v5, v4, t
        assert_eq!(order, vec![0, 2, 1, 4, 3, 5]);
    }

    #[test]
    fn single_vertex_and_cycles() {
        assert_eq!(topological_sort(1, &[]).unwrap(), vec![0]);
        assert_eq!(topological_sort(2, &[(0, 1), (1, 0)]), Err(DagError::CycleDetected));
        assert_eq!(topological_sort(1, &[(0, 0)]), Err(DagError::CycleDetected));
    }

    #[test]
    fn smallest_id_tie_break() {
        assert_eq!(topological_sort(3, &[]).unwrap(), vec![0, 1, 2]);
        assert_eq!(topological_sort(3, &[(2, 0)]).unwrap(), vec![2, 0, 1]);
    }

    #[test]
    fn rejects_negative_weights_and_double_mapping() {
        assert_eq!(
            Dag::from_triples(2, [(0, 1, -1i64)], 0, 1).unwrap_err(),
            DagError::NegativeWeight(0)
        );
        let mut d = Dag::from_triples(2, [(0, 1, 1i64), (0, 1, 2)], 0, 1).unwrap();
        d.map_arc(0, Var(0)).unwrap();
        assert!(matches!(d.map_arc(1, Var(0)), Err(DagError::VariableMappedTwice { .. })));
        assert!(matches!(d.map_arc(0, Var(1)), Err(DagError::ArcMappedTwice(0))));
        assert_eq!(d.var_arc(Var(0)), Some(0));
        assert_eq!(d.var_arc(Var(5)), None);
    }
}

//! Dynamic one-to-one shortest paths: LPA*-style labels that survive
//! arc deletions and insertions between queries.
//!
//! Deleting a shortest-path-tree arc `(u,v)` does not go through the usual
//! underconsistent repair. The whole tree subtree below `v` is reset to
//! `d = ∞` and its `rhs` recomputed once, so the search afterwards only
//! meets overconsistent vertices and scans every in-neighborhood at most
//! once per query.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::dag::{ArcId, Dag, Path, SpResult, VertexId};
use crate::scalar::Weight;

/// Arcs that changed state between two induced graphs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphDiff {
    pub deleted: Vec<ArcId>,
    pub inserted: Vec<ArcId>,
}

impl GraphDiff {
    pub fn between(old: &[bool], new: &[bool]) -> Self {
        assert_eq!(old.len(), new.len(), "masks over different graphs");
        let mut diff = GraphDiff::default();
        for (a, (&o, &n)) in old.iter().zip(new).enumerate() {
            match (o, n) {
                (true, false) => diff.deleted.push(a),
                (false, true) => diff.inserted.push(a),
                _ => {}
            }
        }
        diff
    }

    pub fn len(&self) -> usize {
        self.deleted.len() + self.inserted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deleted.is_empty() && self.inserted.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LpaStats {
    pub computes: u64,
    pub queue_pops: u64,
    /// Pops of a vertex already expanded in the same query.
    pub reopened: u64,
    pub arc_relaxations: u64,
    pub in_scans: u64,
    pub rebuilds: u64,
    /// Pops whose key was smaller than the previous pop of the same query.
    pub key_order_violations: u64,
    pub underconsistent_pops: u64,
}

type Key<W> = (W, W);

fn key_cmp<W: Weight>(a: &Key<W>, b: &Key<W>) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| a.1.total_cmp(&b.1))
}

#[derive(Debug, Clone, Copy)]
struct Entry<W> {
    key: Key<W>,
    vertex: VertexId,
}

impl<W: Weight> PartialEq for Entry<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<W: Weight> Eq for Entry<W> {}

impl<W: Weight> PartialOrd for Entry<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<W: Weight> Ord for Entry<W> {
    // reversed: the max-heap pops the smallest key, then the smallest id
    fn cmp(&self, other: &Self) -> Ordering {
        key_cmp(&other.key, &self.key).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Labels `d`, `rhs` and tree parents for one source/target pair, together
/// with the graph (active-arc mask) they currently describe.
#[derive(Debug, Clone)]
pub struct LpaLabels<'d, W> {
    dag: &'d Dag<W>,
    h: Vec<W>,
    active: Vec<bool>,
    num_active: usize,
    d: Vec<W>,
    rhs: Vec<W>,
    parent: Vec<Option<ArcId>>,
    queue: BinaryHeap<Entry<W>>,
    queued: Vec<Option<Key<W>>>,
    rebuild_fraction: f64,
    in_scans: Vec<u32>,
    scanned: Vec<VertexId>,
    expanded: Vec<u64>,
    epoch: u64,
    stats: LpaStats,
}

impl<'d, W: Weight> LpaLabels<'d, W> {
    /// Labels for the full graph of `dag`. `h` defaults to zero.
    pub fn new(dag: &'d Dag<W>, h: Option<Vec<W>>) -> Self {
        let n = dag.num_vertices();
        let h = h.unwrap_or_else(|| vec![W::zero(); n]);
        assert_eq!(h.len(), n, "heuristic has the wrong length");
        let mut labels = LpaLabels {
            dag,
            h,
            active: vec![true; dag.num_arcs()],
            num_active: dag.num_arcs(),
            d: Vec::new(),
            rhs: Vec::new(),
            parent: Vec::new(),
            queue: BinaryHeap::new(),
            queued: Vec::new(),
            rebuild_fraction: 0.25,
            in_scans: vec![0; n],
            scanned: Vec::new(),
            expanded: vec![0; n],
            epoch: 0,
            stats: LpaStats::default(),
        };
        labels.reset();
        labels
    }

    /// Diffs larger than `fraction` of the active arcs trigger a rebuild.
    pub fn with_rebuild_fraction(mut self, fraction: f64) -> Self {
        self.rebuild_fraction = fraction;
        self
    }

    pub fn stats(&self) -> &LpaStats {
        &self.stats
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn d(&self, v: VertexId) -> W {
        self.d[v]
    }

    pub fn rhs(&self, v: VertexId) -> W {
        self.rhs[v]
    }

    pub fn parent(&self, v: VertexId) -> Option<ArcId> {
        self.parent[v]
    }

    /// Live queue entries as `(vertex, key)`, sorted by vertex.
    pub fn queue_contents(&self) -> Vec<(VertexId, Key<W>)> {
        self.queued
            .iter()
            .enumerate()
            .filter_map(|(v, k)| k.map(|k| (v, k)))
            .collect()
    }

    /// Largest in-neighborhood scan count of a single vertex since the last
    /// `apply_diff`.
    pub fn max_in_scans(&self) -> u32 {
        self.scanned.iter().map(|&v| self.in_scans[v]).max().unwrap_or(0)
    }

    fn reset(&mut self) {
        let n = self.dag.num_vertices();
        self.d = vec![W::infinity(); n];
        self.rhs = vec![W::infinity(); n];
        self.parent = vec![None; n];
        self.queue.clear();
        self.queued = vec![None; n];
        let s = self.dag.source();
        self.rhs[s] = W::zero();
        self.update(s);
    }

    fn key(&self, v: VertexId) -> Key<W> {
        let m = if self.d[v] < self.rhs[v] { self.d[v] } else { self.rhs[v] };
        (m.add_or_inf(self.h[v]), m)
    }

    fn update(&mut self, v: VertexId) {
        if self.d[v] == self.rhs[v] {
            self.queued[v] = None;
        } else {
            let key = self.key(v);
            if self.queued[v].is_some_and(|k| key_cmp(&k, &key) == Ordering::Equal) {
                return;
            }
            self.queued[v] = Some(key);
            self.queue.push(Entry { key, vertex: v });
        }
    }

    fn count_scan(&mut self, v: VertexId) {
        if self.in_scans[v] == 0 {
            self.scanned.push(v);
        }
        self.in_scans[v] += 1;
        self.stats.in_scans += 1;
    }

    /// `rhs(v) = min over active in-arcs (u,v) of d(u) + w(u,v)`.
    fn recompute_rhs(&mut self, v: VertexId) {
        if v == self.dag.source() {
            return;
        }
        self.count_scan(v);
        let mut best = W::infinity();
        let mut arg = None;
        for &a in self.dag.in_arcs(v) {
            if !self.active[a] {
                continue;
            }
            self.stats.arc_relaxations += 1;
            let arc = self.dag.arc(a);
            let c = self.d[arc.tail].add_or_inf(arc.weight);
            if c < best {
                best = c;
                arg = Some(a);
            }
        }
        self.rhs[v] = best;
        self.parent[v] = arg;
    }

    /// Switches the labels to the graph given by `mask`.
    pub fn set_graph(&mut self, mask: &[bool]) {
        let diff = GraphDiff::between(&self.active, mask);
        self.apply_diff(&diff);
    }

    pub fn apply_diff(&mut self, diff: &GraphDiff) {
        for &v in &self.scanned {
            self.in_scans[v] = 0;
        }
        self.scanned.clear();
        if diff.is_empty() {
            return;
        }
        for &a in &diff.deleted {
            debug_assert!(self.active[a], "deleting inactive arc {a}");
            self.active[a] = false;
        }
        for &a in &diff.inserted {
            debug_assert!(!self.active[a], "inserting active arc {a}");
            self.active[a] = true;
        }
        self.num_active = self.num_active + diff.inserted.len() - diff.deleted.len();
        if diff.len() as f64 > self.rebuild_fraction * self.num_active as f64 {
            self.stats.rebuilds += 1;
            self.reset();
            return;
        }

        let dag = self.dag;
        let roots: Vec<VertexId> = diff
            .deleted
            .iter()
            .filter(|&&a| self.parent[dag.arc(a).head] == Some(a))
            .map(|&a| dag.arc(a).head)
            .collect();
        let mut invalid = Vec::new();
        if !roots.is_empty() {
            let n = dag.num_vertices();
            let mut children: Vec<Vec<VertexId>> = vec![Vec::new(); n];
            for v in 0..n {
                if let Some(a) = self.parent[v] {
                    children[dag.arc(a).tail].push(v);
                }
            }
            let mut seen = vec![false; n];
            let mut stack = roots;
            while let Some(v) = stack.pop() {
                if std::mem::replace(&mut seen[v], true) {
                    continue;
                }
                invalid.push(v);
                stack.extend(children[v].iter().copied());
            }
            for &v in &invalid {
                self.d[v] = W::infinity();
            }
            for &v in &invalid {
                self.recompute_rhs(v);
                self.update(v);
            }
        }
        for &a in &diff.inserted {
            let arc = dag.arc(a);
            let v = arc.head;
            if v == dag.source() {
                continue;
            }
            let c = self.d[arc.tail].add_or_inf(arc.weight);
            if c < self.rhs[v] {
                self.rhs[v] = c;
                self.parent[v] = Some(a);
                self.update(v);
            }
        }
    }

    fn peek(&mut self) -> Option<Entry<W>> {
        while let Some(&e) = self.queue.peek() {
            if self.queued[e.vertex].is_some_and(|k| key_cmp(&k, &e.key) == Ordering::Equal) {
                return Some(e);
            }
            self.queue.pop();
        }
        None
    }

    /// Brings the target up to date. Keys at or above `bound` are not
    /// expanded; labels are never truncated by the bound.
    pub fn compute(&mut self, bound: W) -> SpResult<W> {
        self.stats.computes += 1;
        self.epoch += 1;
        let dag = self.dag;
        let t = dag.target();
        let mut bounded = false;
        let mut last: Option<Key<W>> = None;
        while let Some(top) = self.peek() {
            let kt = self.key(t);
            if key_cmp(&top.key, &kt) != Ordering::Less && self.d[t] == self.rhs[t] {
                break;
            }
            if top.key.0.is_infinite() {
                break;
            }
            if top.key.0 >= bound {
                bounded = true;
                break;
            }
            self.queue.pop();
            let v = top.vertex;
            self.queued[v] = None;
            self.stats.queue_pops += 1;
            if self.expanded[v] == self.epoch {
                self.stats.reopened += 1;
            }
            self.expanded[v] = self.epoch;
            if last.is_some_and(|k| key_cmp(&top.key, &k) == Ordering::Less) {
                self.stats.key_order_violations += 1;
            }
            last = Some(top.key);

            if self.d[v] > self.rhs[v] {
                self.d[v] = self.rhs[v];
                let dv = self.d[v];
                for &a in dag.out_arcs(v) {
                    if !self.active[a] {
                        continue;
                    }
                    self.stats.arc_relaxations += 1;
                    let arc = dag.arc(a);
                    let x = arc.head;
                    let c = dv.add_or_inf(arc.weight);
                    if c < self.rhs[x] && x != dag.source() {
                        self.rhs[x] = c;
                        self.parent[x] = Some(a);
                        self.update(x);
                    }
                }
            } else {
                self.stats.underconsistent_pops += 1;
                self.d[v] = W::infinity();
                self.update(v);
                for &a in dag.out_arcs(v) {
                    if !self.active[a] {
                        continue;
                    }
                    self.stats.arc_relaxations += 1;
                    let x = dag.arc(a).head;
                    if self.parent[x] == Some(a) {
                        self.recompute_rhs(x);
                        self.update(x);
                    }
                }
            }
        }

        let dt = self.d[t];
        if !dt.is_infinite() && dt == self.rhs[t] && dt < bound {
            return SpResult::Found(self.extract_path());
        }
        if bounded || !dt.is_infinite() || !self.rhs[t].is_infinite() {
            SpResult::Bounded
        } else {
            SpResult::Disconnected
        }
    }

    fn extract_path(&self) -> Path<W> {
        let dag = self.dag;
        let s = dag.source();
        let mut arcs = Vec::new();
        let mut v = dag.target();
        while v != s {
            let a = self.parent[v].expect("tree parent on a consistent path");
            arcs.push(a);
            v = dag.arc(a).tail;
        }
        arcs.reverse();
        let weight = Path::weight_in(&arcs, dag);
        Path { arcs, weight }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{shortest_path_masked, SearchStats};

    fn free_bad() -> Dag<i64> {
        Dag::from_triples(3, [(0, 1, 1i64), (1, 2, 1), (0, 2, 5)], 0, 2).unwrap()
    }

    #[test]
    fn init_queues_source_only() {
        let d = free_bad();
        let l = LpaLabels::new(&d, Some(vec![3, 1, 0]));
        assert_eq!(l.queue_contents(), vec![(0, (3, 0))]);
    }

    #[test]
    fn free_bad_first_and_after_enforcement() {
        let d = free_bad();
        let mut l = LpaLabels::new(&d, None);
        let p = l.compute(i64::MAX);
        assert_eq!(p.path().unwrap().arcs, vec![0, 1]);
        assert_eq!(p.path().unwrap().weight, 2);
        // enforcing (s,t) deletes (s,v)
        l.set_graph(&[false, true, true]);
        let p = l.compute(i64::MAX);
        assert_eq!(p.path().unwrap().arcs, vec![2]);
        assert_eq!(p.path().unwrap().weight, 5);
        assert!(l.max_in_scans() <= 1);
    }

    #[test]
    fn repeated_compute_is_free() {
        let d = free_bad();
        let mut l = LpaLabels::new(&d, None);
        let first = l.compute(i64::MAX);
        let pops = l.stats().queue_pops;
        l.apply_diff(&GraphDiff::default());
        assert_eq!(l.compute(i64::MAX), first);
        assert_eq!(l.stats().queue_pops, pops);
    }

    #[test]
    fn source_is_target() {
        let d = Dag::from_triples(1, std::iter::empty::<(usize, usize, i64)>(), 0, 0).unwrap();
        let mut l = LpaLabels::new(&d, None);
        assert_eq!(l.compute(i64::MAX).path().unwrap().weight, 0);
    }

    #[test]
    fn deleting_bridge_disconnects() {
        let d = Dag::from_triples(3, [(0, 1, 1i64), (1, 2, 1)], 0, 2).unwrap();
        let mut l = LpaLabels::new(&d, None).with_rebuild_fraction(1.0);
        assert!(l.compute(i64::MAX).path().is_some());
        l.set_graph(&[true, false]);
        assert_eq!(l.compute(i64::MAX), SpResult::Disconnected);
        l.set_graph(&[true, true]);
        assert_eq!(l.compute(i64::MAX).path().unwrap().weight, 2);
    }

    #[test]
    fn bound_gates_expansion_only() {
        let d = free_bad();
        let mut l = LpaLabels::new(&d, None);
        assert_eq!(l.compute(2), SpResult::Bounded);
        assert_eq!(l.compute(3).path().unwrap().weight, 2);
    }

    fn layered(seed: u64) -> Dag<i64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let layers = 8;
        let width = 5;
        let n = layers * width + 2;
        let mut arcs = Vec::new();
        for j in 0..width {
            arcs.push((0, 1 + j, rng.gen_range(1..10)));
        }
        for l in 0..layers - 1 {
            for a in 0..width {
                for b in 0..width {
                    if rng.gen_bool(0.5) {
                        arcs.push((1 + l * width + a, 1 + (l + 1) * width + b, rng.gen_range(1..10)));
                    }
                }
            }
        }
        for j in 0..width {
            arcs.push((1 + (layers - 1) * width + j, n - 1, rng.gen_range(1..10)));
        }
        Dag::from_triples(n, arcs, 0, n - 1).unwrap()
    }

    #[test]
    fn random_diffs_match_static_search() {
        use rand::{Rng, SeedableRng};
        let d = layered(7);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut l = LpaLabels::new(&d, None);
        let mut mask = vec![true; d.num_arcs()];
        for _ in 0..300 {
            for m in mask.iter_mut() {
                if rng.gen_bool(0.05) {
                    *m = !*m;
                }
            }
            l.set_graph(&mask);
            let got = l.compute(i64::MAX);
            let mut st = SearchStats::default();
            let want = shortest_path_masked(&d, &mask, None, i64::MAX, &mut st);
            assert_eq!(got.path().map(|p| p.weight), want.path().map(|p| p.weight));
            if let Some(p) = got.path() {
                assert!(p.arcs.iter().all(|&a| mask[a]));
            }
            assert!(l.max_in_scans() <= 1);
            assert_eq!(l.stats().underconsistent_pops, 0);
            assert_eq!(l.stats().key_order_violations, 0);
        }
    }
}

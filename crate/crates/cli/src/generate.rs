//! Seeded random instances: a layered DAG in which every vertex lies on an
//! s,t-path, and random DNF restrictions over the arc variables.

use std::collections::HashSet;

use lcsp_core::dag::Dag;
use lcsp_core::logic::{ClauseVarMap, CnfFormula, Lit, Var, VarKind, TseitinEncoder};
use lcsp_core::solver::Instance;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::format::LcspFile;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub vertices: usize,
    /// Target arc count; raised if connectivity needs more arcs.
    pub arcs: usize,
    pub restrictions: usize,
    /// Maximum literals per conjunction.
    pub clause_size: usize,
    /// Maximum conjunctions per restriction.
    pub conjunctions: usize,
    pub min_conjunctions: usize,
    /// Vertices per layer; `None` uses the square root of the vertex count.
    pub layer_width: Option<usize>,
    /// Probability that a literal uses an extra free variable instead of
    /// an arc variable.
    pub free_var_rate: f64,
    /// Probability that a literal is negative.
    pub negative_rate: f64,
    /// Probability that a restriction draws its arc literals from one
    /// random s,t-walk biased towards cheap arcs instead of from all arcs.
    pub path_focus: f64,
    pub weight_range: (i64, i64),
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            vertices: 25,
            arcs: 60,
            restrictions: 10,
            clause_size: 3,
            conjunctions: 3,
            min_conjunctions: 1,
            layer_width: None,
            free_var_rate: 0.0,
            negative_rate: 0.5,
            path_focus: 0.0,
            weight_range: (1, 20),
        }
    }
}

impl GenParams {
    /// Narrow layered DAGs with many single-arc prohibitions focused on cheap
    /// routes. Most instances need dozens of nodes under the baseline rules.
    pub fn hard() -> Self {
        GenParams {
            vertices: 62,
            arcs: 170,
            restrictions: 400,
            clause_size: 1,
            conjunctions: 6,
            min_conjunctions: 6,
            layer_width: Some(2),
            free_var_rate: 0.0,
            negative_rate: 1.0,
            path_focus: 1.0,
            weight_range: (5, 15),
        }
    }
}

/// Arcs `(tail, head, layer span)` of a layered DAG on `n ≥ 2` vertices
/// with source 0 and target `n - 1`.
fn layered_dag(rng: &mut ChaCha8Rng, n: usize, width: Option<usize>, target_arcs: usize) -> Vec<(usize, usize, i64)> {
    let interior = n.saturating_sub(2);
    let width = width.unwrap_or_else(|| (interior as f64).sqrt().ceil() as usize).max(1);
    let mut layers: Vec<Vec<usize>> = vec![vec![0]];
    let mut ids: Vec<usize> = (1..=interior).collect();
    ids.shuffle(rng);
    for chunk in ids.chunks(width) {
        let mut layer = chunk.to_vec();
        layer.sort_unstable();
        layers.push(layer);
    }
    layers.push(vec![n - 1]);
    let layer_of: Vec<usize> = {
        let mut l = vec![0; n];
        for (i, layer) in layers.iter().enumerate() {
            for &v in layer {
                l[v] = i;
            }
        }
        l
    };
    let mut arcs = Vec::new();
    let mut seen = HashSet::new();
    let mut add = |arcs: &mut Vec<(usize, usize)>, u: usize, v: usize| {
        if seen.insert((u, v)) {
            arcs.push((u, v));
        }
    };
    // every vertex gets a predecessor in the previous layer and a successor
    // in the next one
    for i in 1..layers.len() {
        for &v in &layers[i] {
            let u = *layers[i - 1].choose(rng).unwrap();
            add(&mut arcs, u, v);
        }
        for &u in &layers[i - 1] {
            let v = *layers[i].choose(rng).unwrap();
            add(&mut arcs, u, v);
        }
    }
    let max_pairs = (0..n)
        .map(|u| (0..n).filter(|&v| layer_of[u] < layer_of[v]).count())
        .sum::<usize>();
    let target = target_arcs.min(max_pairs);
    while arcs.len() < target {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if layer_of[u] < layer_of[v] {
            add(&mut arcs, u, v);
        }
    }
    arcs.into_iter()
        .map(|(u, v)| (u, v, (layer_of[v] - layer_of[u]) as i64))
        .collect()
}

pub fn generate_instance(seed: u64, p: &GenParams) -> Instance<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.vertices.max(2);
    let arcs = layered_dag(&mut rng, n, p.layer_width, p.arcs);
    let m = arcs.len();
    let (lo, hi) = p.weight_range;
    // weights scale with the number of layers spanned, so all routes are
    // comparable
    let triples: Vec<(usize, usize, i64)> = arcs
        .iter()
        .map(|&(u, v, span)| (u, v, span * rng.gen_range(lo..=hi)))
        .collect();
    let mut dag = Dag::from_triples(n, triples, 0, n - 1).expect("layered arcs are acyclic");
    for a in 0..m {
        dag.map_arc(a, Var(a as u32)).expect("fresh mapping");
    }
    let extra = if p.free_var_rate > 0.0 { (p.restrictions / 2).max(1) } else { 0 };
    let mut formula = CnfFormula::with_vars(vec![VarKind::Graph; m]);
    let free: Vec<Var> = (0..extra).map(|_| formula.add_var(VarKind::Free)).collect();
    let mut defs = ClauseVarMap::new();
    let to_target = distances_to_target(&dag);
    let temperature = ((hi - lo) as f64 / 4.0).max(1.0);
    let restrictions: Vec<Vec<Vec<Lit>>> = (0..p.restrictions)
        .map(|_| {
            let pool: Vec<u32> = if rng.gen_bool(p.path_focus) {
                cheap_walk(&mut rng, &dag, &to_target, temperature)
            } else {
                (0..m as u32).collect()
            };
            (0..rng.gen_range(p.min_conjunctions.max(1)..=p.conjunctions.max(p.min_conjunctions).max(1)))
                .map(|_| {
                    (0..rng.gen_range(1..=p.clause_size.max(1)))
                        .map(|_| {
                            let var = if !free.is_empty() && rng.gen_bool(p.free_var_rate) {
                                *free.choose(&mut rng).unwrap()
                            } else {
                                Var(*pool.choose(&mut rng).unwrap())
                            };
                            var.lit(!rng.gen_bool(p.negative_rate))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut enc = TseitinEncoder::new(&mut formula, &mut defs);
    for (i, r) in restrictions.iter().enumerate() {
        enc.encode(i, r).expect("non-empty conjunctions over declared variables");
    }
    Instance::new(dag, formula, defs).expect("consistent instance")
}

fn distances_to_target(dag: &Dag<i64>) -> Vec<i64> {
    let mut order: Vec<usize> = (0..dag.num_vertices()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(dag.rank(v)));
    let mut d = vec![i64::MAX; dag.num_vertices()];
    d[dag.target()] = 0;
    for v in order {
        for &a in dag.out_arcs(v) {
            let h = dag.arc(a).head;
            if d[h] != i64::MAX {
                d[v] = d[v].min(d[h] + dag.weight(a));
            }
        }
    }
    d
}

/// Arcs of a random s,t-walk that prefers out-arcs with a cheap
/// completion: weights `exp(-(c - c_min) / temperature)` where `c` is the
/// cheapest s,t-cost through the arc from the current vertex.
fn cheap_walk(rng: &mut ChaCha8Rng, dag: &Dag<i64>, to_target: &[i64], temperature: f64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut v = dag.source();
    while v != dag.target() {
        let arcs = dag.out_arcs(v);
        let costs: Vec<i64> = arcs.iter().map(|&a| dag.weight(a) + to_target[dag.arc(a).head]).collect();
        let best = *costs.iter().min().unwrap();
        let scores: Vec<f64> = costs.iter().map(|&c| (-((c - best) as f64) / temperature).exp()).collect();
        let mut x = rng.gen::<f64>() * scores.iter().sum::<f64>();
        let mut pick = arcs[arcs.len() - 1];
        for (&a, s) in arcs.iter().zip(&scores) {
            if x < *s {
                pick = a;
                break;
            }
            x -= s;
        }
        out.push(pick as u32);
        v = dag.arc(pick).head;
    }
    out
}

/// Deterministic for a given seed and parameter set.
pub fn generate(seed: u64, p: &GenParams) -> LcspFile {
    LcspFile::from_instance(&generate_instance(seed, p))
}

use std::collections::BTreeSet;

use lcsp_core::dag::{shortest_path_masked, Dag, InducedDag, SearchStats, SpResult};
use lcsp_core::dynsp::LpaLabels;
use lcsp_core::logic::{compile_dnf_restrictions, condition, Conditioned, CnfFormula, Lit, Reason, Trail, Var, VarKind};
use proptest::prelude::*;

fn lit_strategy(num_vars: u32) -> impl Strategy<Value = Lit> {
    (0..num_vars, any::<bool>()).prop_map(|(v, p)| Var(v).lit(p))
}

fn formula_strategy(num_vars: u32) -> impl Strategy<Value = CnfFormula> {
    prop::collection::vec(prop::collection::vec(lit_strategy(num_vars), 1..4), 0..10).prop_map(move |clauses| {
        let mut f = CnfFormula::with_vars(vec![VarKind::Free; num_vars as usize]);
        for c in clauses {
            f.add_clause(c);
        }
        f
    })
}

/// Distinct-variable literals.
fn trail_lits(lits: Vec<Lit>) -> Vec<Lit> {
    let mut seen = BTreeSet::new();
    lits.into_iter().filter(|l| seen.insert(l.var())).collect()
}

fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

fn extends(values: &[bool], trail: &Trail) -> bool {
    trail.lits().all(|l| values[l.var().index()] == l.is_positive())
}

proptest! {
    #[test]
    fn conditioning_is_order_invariant(f in formula_strategy(6), l1 in lit_strategy(6), l2 in lit_strategy(6)) {
        prop_assume!(l1.var() != l2.var());
        let mut a = Conditioned::new(&f);
        a.assign(l1, Reason::Decision);
        a.assign(l2, Reason::Decision);
        let mut b = Conditioned::new(&f);
        b.assign(l2, Reason::Decision);
        b.assign(l1, Reason::Decision);
        prop_assert_eq!(a.remaining_clause_sets(), b.remaining_clause_sets());
        prop_assert_eq!(a.has_empty_clause(), b.has_empty_clause());
        let (sa, sb) = (a.snapshot(), b.snapshot());
        prop_assert_eq!(sa.unassigned, sb.unassigned);
        prop_assert_eq!(sa.true_count, sb.true_count);
    }

    #[test]
    fn rollback_is_exact(f in formula_strategy(6), prefix in prop::collection::vec(lit_strategy(6), 0..3),
                         more in prop::collection::vec(lit_strategy(6), 0..4), propagate in any::<bool>()) {
        let prefix = trail_lits(prefix);
        let t = Trail::from_lits(6, prefix).unwrap();
        let mut st = condition(&f, &t);
        let before = st.snapshot();
        let mark = st.mark();
        for l in more {
            if st.value(l.var()).is_none() {
                st.assign(l, Reason::Decision);
            }
        }
        if propagate {
            let _ = st.unit_propagate();
        }
        st.rollback(mark);
        prop_assert_eq!(st.snapshot(), before);
    }

    #[test]
    fn unit_propagation_is_sound(f in formula_strategy(7), lits in prop::collection::vec(lit_strategy(7), 0..3)) {
        let t = Trail::from_lits(7, trail_lits(lits)).unwrap();
        let mut st = condition(&f, &t);
        let models: Vec<Vec<bool>> = assignments(7)
            .filter(|v| extends(v, &t) && f.is_satisfied_by(v))
            .collect();
        match st.unit_propagate() {
            Ok(_) => {
                for m in &models {
                    prop_assert!(extends(m, st.trail()));
                }
            }
            Err(_) => prop_assert!(models.is_empty()),
        }
    }

    #[test]
    fn tseitin_is_equisatisfiable(
        restrictions in prop::collection::vec(
            prop::collection::vec(prop::collection::vec(lit_strategy(5), 1..3), 1..3), 0..4)
    ) {
        let (f, _) = compile_dnf_restrictions(5, &restrictions).unwrap();
        let dnf_sat = assignments(5).any(|v| {
            restrictions.iter().all(|r| r.iter().any(|conj| conj.iter().all(|l| v[l.var().index()] == l.is_positive())))
        });
        let cnf_sat = assignments(f.num_vars()).any(|v| f.is_satisfied_by(&v));
        prop_assert_eq!(dnf_sat, cnf_sat);
    }
}

/// Random DAG on `n` vertices with arcs `u → v` for `u < v` only.
fn dag_strategy(max_vertices: usize) -> impl Strategy<Value = Dag<i64>> {
    (2..=max_vertices)
        .prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let m = pairs.len();
            (Just(n), Just(pairs), prop::collection::vec((any::<bool>(), 1i64..10), m))
        })
        .prop_map(|(n, pairs, picks)| {
            let arcs: Vec<(usize, usize, i64)> = pairs
                .iter()
                .zip(picks)
                .filter(|(_, (keep, _))| *keep)
                .map(|(&(u, v), (_, w))| (u, v, w))
                .collect();
            let mut d = Dag::from_triples(n, arcs, 0, n - 1).unwrap();
            for a in 0..d.num_arcs() {
                d.map_arc(a, Var(a as u32)).unwrap();
            }
            d
        })
}

fn all_paths(dag: &Dag<i64>, active: &[bool]) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(dag.source(), Vec::new())];
    while let Some((v, arcs)) = stack.pop() {
        if v == dag.target() {
            out.insert(arcs);
            continue;
        }
        for &a in dag.out_arcs(v) {
            if active[a] {
                let mut next = arcs.clone();
                next.push(a);
                stack.push((dag.arc(a).head, next));
            }
        }
    }
    out
}

fn agrees(dag: &Dag<i64>, path: &[usize], trail: &Trail) -> bool {
    trail.lits().all(|l| {
        let a = dag.var_arc(l.var()).unwrap();
        path.contains(&a) == l.is_positive()
    })
}

proptest! {
    #[test]
    fn enforcement_keeps_exactly_agreeing_paths(dag in dag_strategy(8), picks in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 0..4)) {
        prop_assume!(dag.num_arcs() > 0);
        let lits: Vec<Lit> = picks.iter().map(|(i, p)| Var(i.index(dag.num_arcs()) as u32).lit(*p)).collect();
        let trail = Trail::from_lits(dag.num_arcs(), trail_lits(lits)).unwrap();
        let mut g = InducedDag::new(&dag);
        let want: BTreeSet<Vec<usize>> = all_paths(&dag, &vec![true; dag.num_arcs()])
            .into_iter()
            .filter(|p| agrees(&dag, p, &trail))
            .collect();
        match g.enforce(&trail) {
            Ok(_) => prop_assert_eq!(all_paths(&dag, g.active()), want),
            Err(_) => prop_assert!(want.is_empty()),
        }
    }

    #[test]
    fn enforcement_is_monotone(dag in dag_strategy(8), picks in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 1..4)) {
        prop_assume!(dag.num_arcs() > 0);
        let lits = trail_lits(picks.iter().map(|(i, p)| Var(i.index(dag.num_arcs()) as u32).lit(*p)).collect());
        let small = Trail::from_lits(dag.num_arcs(), lits[..lits.len() - 1].iter().copied()).unwrap();
        let big = Trail::from_lits(dag.num_arcs(), lits.iter().copied()).unwrap();
        let mut gs = InducedDag::new(&dag);
        let mut gb = InducedDag::new(&dag);
        if gs.enforce(&small).is_ok() && gb.enforce(&big).is_ok() {
            for a in 0..dag.num_arcs() {
                prop_assert!(!gb.is_active(a) || gs.is_active(a));
            }
        }
    }

    #[test]
    fn static_search_matches_label_correcting(dag in dag_strategy(9), mask in prop::collection::vec(any::<bool>(), 36)) {
        let active: Vec<bool> = (0..dag.num_arcs()).map(|a| mask[a % mask.len()] || a % 3 == 0).collect();
        // Bellman-Ford style relaxation until nothing changes
        let mut dist = vec![i64::MAX; dag.num_vertices()];
        dist[dag.source()] = 0;
        loop {
            let mut changed = false;
            for (a, arc) in dag.arcs().iter().enumerate() {
                if active[a] && dist[arc.tail] != i64::MAX && dist[arc.tail] + arc.weight < dist[arc.head] {
                    dist[arc.head] = dist[arc.tail] + arc.weight;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut st = SearchStats::default();
        match shortest_path_masked(&dag, &active, None, i64::MAX, &mut st) {
            SpResult::Found(p) => {
                prop_assert_eq!(p.weight, dist[dag.target()]);
                prop_assert!(p.arcs.iter().all(|&a| active[a]));
                // lexicographically smallest among optimal paths
                let best = all_paths(&dag, &active)
                    .into_iter()
                    .filter(|q| q.iter().map(|&a| dag.weight(a)).sum::<i64>() == p.weight)
                    .min()
                    .unwrap();
                prop_assert_eq!(p.arcs, best);
            }
            _ => prop_assert_eq!(dist[dag.target()], i64::MAX),
        }
    }

    #[test]
    fn dynamic_search_matches_static(dag in dag_strategy(10), masks in prop::collection::vec(prop::collection::vec(any::<bool>(), 45), 1..12)) {
        let mut lpa = LpaLabels::new(&dag, None).with_rebuild_fraction(f64::INFINITY);
        for m in masks {
            let active: Vec<bool> = (0..dag.num_arcs()).map(|a| m[a]).collect();
            lpa.set_graph(&active);
            let got = lpa.compute(i64::MAX);
            let mut st = SearchStats::default();
            let want = shortest_path_masked(&dag, &active, None, i64::MAX, &mut st);
            prop_assert_eq!(got.path().map(|p| p.weight), want.path().map(|p| p.weight));
            prop_assert!(lpa.max_in_scans() <= 1);
        }
    }
}

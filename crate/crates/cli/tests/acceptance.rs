//! Acceptance checks. Prints one PASS/FAIL line per check and exits non-zero
//! if any fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use lcsp_cli::bench::{baseline, geomean};
use lcsp_cli::dataset::FlightDataset;
use lcsp_cli::generate::{generate_instance, GenParams};
use lcsp_cli::oracle::brute_force_solve;
use lcsp_core::dag::{shortest_path_masked, Dag, InducedDag, SearchStats};
use lcsp_core::dynsp::{GraphDiff, LpaLabels};
use lcsp_core::logic::{compile_dnf_restrictions, ConflictFlavor, CnfFormula, Lit, Trail, Var};
use lcsp_core::solver::{solve, BranchRule, Instance, NodeRule, SolverConfig, Status};
use lcsp_flight::{compile, Aircraft, LevelChange, LevelTable};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Small instances with varied shape, all within the oracle guards.
fn oracle_suite() -> Vec<(u64, Instance<i64>)> {
    (0..200u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
            let vertices = rng.gen_range(5..=25);
            let p = GenParams {
                vertices,
                arcs: rng.gen_range(vertices + 4..=60),
                restrictions: rng.gen_range(0..=15),
                clause_size: rng.gen_range(1..=3),
                conjunctions: rng.gen_range(1..=3),
                min_conjunctions: 1,
                layer_width: None,
                free_var_rate: if rng.gen_bool(0.3) { 0.3 } else { 0.0 },
                negative_rate: rng.gen_range(0.4..0.9),
                path_focus: if rng.gen_bool(0.5) { 0.8 } else { 0.0 },
                weight_range: (1, 20),
            };
            (seed, generate_instance(seed, &p))
        })
        .collect()
}

fn oracle_equivalence() -> (Outcome, Outcome) {
    let suite = oracle_suite();
    let configs = SolverConfig::all_combinations();
    let within = suite.iter().all(|(_, i)| i.dag().num_vertices() <= 25 && i.dag().num_arcs() <= 60);
    let results: Vec<(Vec<String>, u64, u64)> = suite
        .par_iter()
        .map(|(seed, inst)| {
            let mut errors = Vec::new();
            let (mut duplicates, mut graph_solves) = (0, 0);
            let want = match brute_force_solve(inst) {
                Ok(r) => r,
                Err(e) => return (vec![format!("seed {seed}: oracle {e}")], 0, 0),
            };
            for cfg in &configs {
                match solve(inst, cfg) {
                    Ok((sol, stats)) => {
                        if sol.status != want.status || sol.cost() != want.cost {
                            errors.push(format!(
                                "seed {seed} {}: {:?}/{:?} vs oracle {:?}/{:?}",
                                cfg.label(),
                                sol.status,
                                sol.cost(),
                                want.status,
                                want.cost
                            ));
                        }
                        if cfg.conflict == ConflictFlavor::Graph {
                            graph_solves += 1;
                            duplicates += stats.duplicate_paths;
                        }
                    }
                    Err(e) => errors.push(format!("seed {seed} {}: {e}", cfg.label())),
                }
            }
            (errors, duplicates, graph_solves)
        })
        .collect();
    let errors: Vec<&String> = results.iter().flat_map(|r| &r.0).collect();
    let duplicates: u64 = results.iter().map(|r| r.1).sum();
    let graph_solves: u64 = results.iter().map(|r| r.2).sum();
    let feasible = suite
        .iter()
        .filter(|(_, i)| brute_force_solve(i).map(|r| r.status == Status::Optimal).unwrap_or(false))
        .count();
    let first = errors.first().map(|e| format!("; first mismatch: {e}")).unwrap_or_default();
    (
        outcome(
            errors.is_empty() && within,
            format!(
                "{} instances ({} feasible) x {} configurations, {} mismatches{first}",
                suite.len(),
                feasible,
                configs.len(),
                errors.len()
            ),
        ),
        outcome(
            duplicates == 0 && graph_solves > 0,
            format!("{duplicates} duplicate relaxation paths over {graph_solves} graph-conflict solves"),
        ),
    )
}

fn random_dag(rng: &mut ChaCha8Rng, max_vertices: usize) -> Dag<i64> {
    let n = rng.gen_range(2..=max_vertices);
    let density = rng.gen_range(0.2..0.7);
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                arcs.push((u, v, rng.gen_range(1..10)));
            }
        }
    }
    let mut dag = Dag::from_triples(n, arcs, 0, n - 1).unwrap();
    for a in 0..dag.num_arcs() {
        dag.map_arc(a, Var(a as u32)).unwrap();
    }
    dag
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

fn enforcement_path_sets() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut trails, mut failures, mut emptied) = (0, 0, 0);
    for _ in 0..100 {
        let dag = random_dag(&mut rng, 12);
        let m = dag.num_arcs();
        if m == 0 {
            continue;
        }
        let everything = all_paths(&dag, &vec![true; m]);
        for _ in 0..5 {
            let mut vars: Vec<usize> = (0..m).collect();
            vars.shuffle(&mut rng);
            let k = rng.gen_range(0..=m.min(4));
            let lits: Vec<Lit> = vars[..k].iter().map(|&a| Var(a as u32).lit(rng.gen_bool(0.5))).collect();
            let trail = Trail::from_lits(m, lits).unwrap();
            let want: BTreeSet<Vec<usize>> = everything
                .iter()
                .filter(|p| trail.lits().all(|l| p.contains(&dag.var_arc(l.var()).unwrap()) == l.is_positive()))
                .cloned()
                .collect();
            let mut g = InducedDag::new(&dag);
            let ok = match g.enforce(&trail) {
                Ok(_) => all_paths(&dag, g.active()) == want,
                Err(_) => {
                    emptied += 1;
                    want.is_empty()
                }
            };
            trails += 1;
            if !ok {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{trails} trails on 100 DAGs, {emptied} without agreeing paths, {failures} set mismatches"),
    )
}

fn dynamic_search(steps: usize) -> Outcome {
    let p = GenParams {
        vertices: 200,
        arcs: 700,
        restrictions: 0,
        layer_width: Some(10),
        ..GenParams::default()
    };
    let inst = generate_instance(42, &p);
    let dag = inst.dag();
    let m = dag.num_arcs();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    let mut worst_scans = 0;
    let mut lpa = LpaLabels::new(dag, None).with_rebuild_fraction(f64::INFINITY);
    let mut active = vec![true; m];
    let mut last = lpa.compute(i64::MAX);
    for _ in 0..steps {
        let mut next = active.clone();
        // delete arcs of the current path half of the time, so the tree repair
        // is exercised, and flip a few random arcs
        if let Some(path) = last.path() {
            if !path.arcs.is_empty() && rng.gen_bool(0.5) {
                next[*path.arcs.choose(&mut rng).unwrap()] = false;
            }
        }
        for _ in 0..rng.gen_range(1..=5) {
            let a = rng.gen_range(0..m);
            next[a] = if next[a] { rng.gen_bool(0.3) } else { rng.gen_bool(0.7) };
        }
        lpa.apply_diff(&GraphDiff::between(&active, &next));
        active = next;
        last = lpa.compute(i64::MAX);
        worst_scans = worst_scans.max(lpa.max_in_scans());
        let mut st = SearchStats::default();
        let want = shortest_path_masked(dag, &active, None, i64::MAX, &mut st);
        if last.path().map(|p| p.weight) != want.path().map(|p| p.weight) {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0 && worst_scans <= 1,
        format!(
            "{steps} steps on {} vertices / {m} arcs, {mismatches} cost mismatches, max in-scans per vertex {worst_scans}",
            dag.num_vertices()
        ),
    )
}

/// Complete backtracking over the variables `from..`, pruning as soon as a
/// clause has all its literals false.
fn satisfiable(f: &CnfFormula, values: &mut [Option<bool>], from: usize) -> bool {
    let falsified = f.clauses().iter().any(|c| {
        c.lits()
            .iter()
            .all(|l| values[l.var().index()].is_some_and(|v| v != l.is_positive()))
    });
    if falsified {
        return false;
    }
    if from == values.len() {
        return true;
    }
    for b in [false, true] {
        values[from] = Some(b);
        if satisfiable(f, values, from + 1) {
            values[from] = None;
            return true;
        }
    }
    values[from] = None;
    false
}

fn tseitin_equisatisfiability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut sat, mut unsat, mut failures) = (0, 0, 0);
    for _ in 0..500 {
        let n = rng.gen_range(1..=12);
        let restrictions: Vec<Vec<Vec<Lit>>> = (0..rng.gen_range(0..=8))
            .map(|_| {
                (0..rng.gen_range(1..=3))
                    .map(|_| {
                        (0..rng.gen_range(1..=3))
                            .map(|_| Var(rng.gen_range(0..n as u32)).lit(rng.gen_bool(0.5)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let (f, _) = compile_dnf_restrictions(n, &restrictions).unwrap();
        // exhaustive over the original variables; for each assignment the
        // CNF restricted to it must be satisfiable exactly when the DNF holds
        let mut dnf_sat = false;
        let mut projection_ok = true;
        for bits in 0u32..1 << n {
            let x: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            let dnf = restrictions
                .iter()
                .all(|r| r.iter().any(|c| c.iter().all(|l| x[l.var().index()] == l.is_positive())));
            let mut values: Vec<Option<bool>> = vec![None; f.num_vars()];
            for (i, &b) in x.iter().enumerate() {
                values[i] = Some(b);
            }
            let cnf = satisfiable(&f, &mut values, n);
            dnf_sat |= dnf;
            projection_ok &= dnf == cnf;
        }
        let mut values = vec![None; f.num_vars()];
        let cnf_sat = satisfiable(&f, &mut values, 0);
        if dnf_sat != cnf_sat || !projection_ok {
            failures += 1;
        }
        if dnf_sat {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    outcome(
        failures == 0 && sat > 0 && unsat > 0,
        format!("500 restriction sets ({sat} satisfiable, {unsat} unsatisfiable), {failures} disagreements"),
    )
}

fn aircraft_goldens() -> Outcome {
    let ac = Aircraft::default();
    let levels = LevelTable::standard();
    let top = levels.optimal();
    let climb = LevelTable::new(vec![1000.0, 1305.0], 2).unwrap();
    let toc = match ac.climb_feasible(&climb, 1e6, 1, 2) {
        LevelChange::Allowed { toc_m } => toc_m,
        LevelChange::Forbidden => f64::NAN,
    };
    let checks = [
        ("cruise duration 240.1 km", ac.cruise_duration_s(240.1), 1000.0),
        ("consumption 100 km at optimum", ac.cruise_consumption_kg(&levels, 100.0, top), 600.0),
        (
            "consumption 100 km ten levels below",
            ac.cruise_consumption_kg(&levels, 100.0, top - 10),
            600.0 * 1.01f64.powi(10),
        ),
        (
            "climb distance for 305 m",
            toc,
            (240.1f64 * 240.1 - 12.7 * 12.7).sqrt() * (305.0 / 12.7),
        ),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| !((got - want).abs() <= 1e-9 * want.abs()))
        .map(|(name, got, want)| format!("{name}: {got} vs {want}"))
        .collect();
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} goldens within 1e-9 relative (climb distance {toc:.4} m)", checks.len())
        } else {
            bad.join("; ")
        },
    )
}

fn heuristic_admissibility() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/flight/central");
    let data = match FlightDataset::load(&dir) {
        Ok(d) => d,
        Err(e) => return outcome(false, format!("fixture: {e}")),
    };
    let ac = Aircraft::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut arcs_checked, mut violations, mut reopened, mut searches, mut mismatches) = (0, 0, 0, 0, 0);
    for (o, d) in &data.od_pairs {
        let ci = match compile(&data.network, &data.levels, &ac, &data.tfrs, o, d) {
            Ok(ci) => ci,
            Err(e) => return outcome(false, format!("{o}-{d}: {e}")),
        };
        let dag = ci.instance.dag();
        let h = ci.instance.heuristic().unwrap();
        for (a, info) in ci.arcs.iter().enumerate() {
            let seg = data.network.segments()[info.segment];
            let arc = dag.arc(a);
            arcs_checked += 1;
            if info.cost.consumption_kg < ac.heuristic_kg(data.network.gcd_km(seg.tail, seg.head))
                || h[arc.tail] > arc.weight + h[arc.head]
            {
                violations += 1;
            }
        }
        // a run of deletions and reinsertions, as a branch and bound would make
        let m = dag.num_arcs();
        let mut lpa = LpaLabels::new(dag, Some(h.to_vec()));
        let mut active = vec![true; m];
        for step in 0..60 {
            if step > 0 {
                let mut next = active.clone();
                for _ in 0..rng.gen_range(1..=20) {
                    let a = rng.gen_range(0..m);
                    next[a] = !next[a] && rng.gen_bool(0.5);
                }
                lpa.apply_diff(&GraphDiff::between(&active, &next));
                active = next;
            }
            let got = lpa.compute(i64::MAX);
            searches += 1;
            let mut st = SearchStats::default();
            let want = shortest_path_masked(dag, &active, None, i64::MAX, &mut st);
            if got.path().map(|p| p.weight) != want.path().map(|p| p.weight) {
                mismatches += 1;
            }
        }
        reopened += lpa.stats().reopened;
        let cfg = SolverConfig::new(NodeRule::BestFirst, BranchRule::Sup, ConflictFlavor::Graph);
        if solve(&ci.instance, &cfg).is_err() {
            mismatches += 1;
        }
    }
    outcome(
        violations == 0 && reopened == 0 && mismatches == 0,
        format!(
            "{} OD pairs, {arcs_checked} arcs, {violations} bound violations; {searches} guided searches, {reopened} reopened vertices, {mismatches} cost mismatches",
            data.od_pairs.len()
        ),
    )
}

const HARD_MIN_NODES: u64 = 50;
const HARD_INSTANCES: usize = 60;

fn trend() -> Outcome {
    // keep the first instances on which the baseline needs at least 50 nodes
    let p = GenParams::hard();
    let base_cfg = baseline();
    let mut suite = Vec::new();
    let mut tried = 0u64;
    for chunk in (0u64..).step_by(32).take(40) {
        let batch: Vec<_> = (chunk..chunk + 32)
            .into_par_iter()
            .map(|seed| {
                let inst = generate_instance(seed, &p);
                let (_, st) = solve(&inst, &base_cfg).unwrap();
                (inst, st)
            })
            .collect();
        tried += 32;
        suite.extend(batch.into_iter().filter(|(_, st)| st.nodes >= HARD_MIN_NODES));
        if suite.len() >= HARD_INSTANCES {
            break;
        }
    }
    suite.truncate(HARD_INSTANCES);
    if suite.len() < 50 {
        return outcome(false, format!("only {} hard instances out of {tried}", suite.len()));
    }
    let base_nodes = geomean(suite.iter().map(|(_, s)| s.nodes as f64));
    let base_sp = geomean(suite.iter().map(|(_, s)| s.sp_searches as f64));
    let mut rows = Vec::new();
    for flavor in [ConflictFlavor::Standard, ConflictFlavor::Graph] {
        for branch in BranchRule::ALL {
            if branch == BranchRule::Strong && flavor == ConflictFlavor::Standard {
                continue;
            }
            let cfg = SolverConfig::new(NodeRule::BestFirst, branch, flavor);
            let stats: Vec<_> = suite.par_iter().map(|(i, _)| solve(i, &cfg).unwrap().1).collect();
            let nodes = geomean(stats.iter().map(|s| s.nodes as f64));
            let sp = geomean(stats.iter().map(|s| s.sp_searches as f64));
            rows.push((cfg.label(), branch, flavor, nodes, sp));
        }
    }
    for (label, _, _, nodes, sp) in &rows {
        println!("    {label:24} nodes {nodes:8.2}  sp searches {sp:8.2}  sp ratio {:.3}", sp / base_sp);
    }
    let sup = rows
        .iter()
        .find(|r| r.1 == BranchRule::Sup && r.2 == ConflictFlavor::Graph)
        .unwrap();
    let ratio = sup.4 / base_sp;
    let strong = rows.iter().find(|r| r.1 == BranchRule::Strong).unwrap().3;
    let min_other = rows
        .iter()
        .filter(|r| r.1 != BranchRule::Strong)
        .map(|r| r.3)
        .fold(f64::INFINITY, f64::min);
    outcome(
        ratio <= 0.6 && strong <= min_other,
        format!(
            "{} hard instances of {tried} (baseline geomean {base_nodes:.1} nodes, {base_sp:.1} sp searches); \
             best-first/sup/graph sp ratio {ratio:.3} (limit 0.6); strong {strong:.1} nodes vs best other {min_other:.1}",
            suite.len()
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let run = |name: &'static str, results: &mut Vec<(&str, Outcome)>, o: Outcome| {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((name, o));
    };
    let (oracle, duplicates) = oracle_equivalence();
    run("1 oracle equivalence", &mut results, oracle);
    run("2 no duplicate relaxation paths", &mut results, duplicates);
    run("3 enforcement path sets", &mut results, enforcement_path_sets());
    run("4 dynamic search equivalence", &mut results, dynamic_search(1000));
    run("5 tseitin equisatisfiability", &mut results, tseitin_equisatisfiability());
    run("6 aircraft goldens", &mut results, aircraft_goldens());
    run("7 heuristic admissibility", &mut results, heuristic_admissibility());
    run("8 directional trend", &mut results, trend());
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!(
        "{} of {} acceptance checks passed in {:.1} s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

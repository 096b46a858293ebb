//! Benchmark harness: solves every (instance, configuration) pair, then
//! summarizes the non-trivial instances.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::time::Duration;

use lcsp_core::logic::ConflictFlavor;
use lcsp_core::solver::{solve, BranchRule, Instance, NodeRule, SolverConfig, Status};
use rayon::prelude::*;

pub const ROW_COLUMNS: [&str; 9] = [
    "instance",
    "config",
    "status",
    "cost",
    "nodes",
    "sp_searches",
    "arc_relaxations",
    "time_total_s",
    "time_sp_s",
];

pub const SUMMARY_COLUMNS: [&str; 9] = [
    "config",
    "instances",
    "solved",
    "geomean_nodes",
    "max_nodes",
    "geomean_sp_searches",
    "max_sp_searches",
    "geomean_time_s",
    "max_time_s",
];

/// DFS with first-literal-of-smallest-clause branching on standard
/// conflicts.
pub fn baseline() -> SolverConfig {
    SolverConfig::new(NodeRule::Dfs, BranchRule::Clause, ConflictFlavor::Standard)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub instance: String,
    pub config: String,
    /// `optimal`, `infeasible`, `limit` or `error`.
    pub status: String,
    pub cost: Option<i64>,
    pub nodes: u64,
    pub sp_searches: u64,
    pub arc_relaxations: u64,
    pub time_total_s: f64,
    pub time_sp_s: f64,
}

impl ResultRow {
    pub fn solved(&self) -> bool {
        self.status == Status::Optimal.name() || self.status == Status::Infeasible.name()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub nodes: Option<u64>,
    pub time: Option<Duration>,
}

/// Solves all pairs on `threads` workers (0 = rayon default). Rows come
/// back ordered by instance, then configuration.
pub fn run_benchmark(
    instances: &[(String, Instance<i64>)],
    configs: &[SolverConfig],
    limits: Limits,
    threads: usize,
) -> Vec<ResultRow> {
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..configs.len()).map(move |c| (i, c)))
        .collect();
    let run = || {
        jobs.par_iter()
            .map(|&(i, c)| {
                let (name, inst) = &instances[i];
                let mut cfg = configs[c].clone();
                cfg.node_limit = limits.nodes.or(cfg.node_limit);
                cfg.time_limit = limits.time.or(cfg.time_limit);
                run_one(name, inst, &cfg)
            })
            .collect::<Vec<_>>()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(run),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}), using the global pool");
            run()
        }
    }
}

fn run_one(name: &str, inst: &Instance<i64>, cfg: &SolverConfig) -> ResultRow {
    match solve(inst, cfg) {
        Ok((sol, stats)) => ResultRow {
            instance: name.to_string(),
            config: cfg.label(),
            status: sol.status.name().to_string(),
            cost: sol.cost(),
            nodes: stats.nodes,
            sp_searches: stats.sp_searches,
            arc_relaxations: stats.arc_relaxations,
            time_total_s: stats.time_total.as_secs_f64(),
            time_sp_s: stats.time_sp.as_secs_f64(),
        },
        Err(e) => {
            log::warn!("{name} {}: {e}", cfg.label());
            ResultRow {
                instance: name.to_string(),
                config: cfg.label(),
                status: "error".into(),
                cost: None,
                nodes: 0,
                sp_searches: 0,
                arc_relaxations: 0,
                time_total_s: 0.0,
                time_sp_s: 0.0,
            }
        }
    }
}

/// Geometric mean of `max(x, 1)`; 0 for an empty sample.
pub fn geomean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, n), x| (s + x.max(1.0).ln(), n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub config: String,
    pub instances: usize,
    pub solved: usize,
    pub geomean_nodes: f64,
    pub max_nodes: u64,
    pub geomean_sp_searches: f64,
    pub max_sp_searches: u64,
    pub geomean_time_s: f64,
    pub max_time_s: f64,
}

/// Instances the baseline solves in fewer than `threshold` nodes. Without
/// baseline rows nothing is filtered.
pub fn trivial_instances(rows: &[ResultRow], baseline_label: &str, threshold: u64) -> BTreeSet<String> {
    rows.iter()
        .filter(|r| r.config == baseline_label && r.solved() && r.nodes < threshold)
        .map(|r| r.instance.clone())
        .collect()
}

/// Per-configuration statistics over the rows of non-trivial instances, in
/// order of first appearance.
pub fn summarize(rows: &[ResultRow], trivial: &BTreeSet<String>) -> Vec<SummaryRow> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| !trivial.contains(&r.instance)) {
        if !groups.contains_key(r.config.as_str()) {
            order.push(&r.config);
        }
        groups.entry(&r.config).or_default().push(r);
    }
    order
        .into_iter()
        .map(|c| {
            let g = &groups[c];
            SummaryRow {
                config: c.to_string(),
                instances: g.len(),
                solved: g.iter().filter(|r| r.solved()).count(),
                geomean_nodes: geomean(g.iter().map(|r| r.nodes as f64)),
                max_nodes: g.iter().map(|r| r.nodes).max().unwrap_or(0),
                geomean_sp_searches: geomean(g.iter().map(|r| r.sp_searches as f64)),
                max_sp_searches: g.iter().map(|r| r.sp_searches).max().unwrap_or(0),
                geomean_time_s: geomean_time(g.iter().map(|r| r.time_total_s)),
                max_time_s: g.iter().map(|r| r.time_total_s).fold(0.0, f64::max),
            }
        })
        .collect()
}

/// Times are shifted by one millisecond so that instant solves do not
/// dominate the mean.
fn geomean_time(values: impl Iterator<Item = f64>) -> f64 {
    const SHIFT: f64 = 1e-3;
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return 0.0;
    }
    (v.iter().map(|x| (x + SHIFT).ln()).sum::<f64>() / v.len() as f64).exp() - SHIFT
}

/// Step points `(config, metric, value, solved fraction)` of the
/// cumulative distribution of nodes and SP searches over solved runs.
pub fn cdf(rows: &[ResultRow], trivial: &BTreeSet<String>) -> Vec<(String, &'static str, u64, f64)> {
    let mut out = Vec::new();
    let mut configs: Vec<&str> = Vec::new();
    for r in rows {
        if !configs.contains(&r.config.as_str()) {
            configs.push(&r.config);
        }
    }
    for c in configs {
        let group: Vec<&ResultRow> = rows
            .iter()
            .filter(|r| r.config == c && !trivial.contains(&r.instance))
            .collect();
        let total = group.len() as f64;
        for (metric, get) in [("nodes", (|r: &ResultRow| r.nodes) as fn(&ResultRow) -> u64), ("sp_searches", |r| r.sp_searches)] {
            let mut values: Vec<u64> = group.iter().filter(|r| r.solved()).map(|r| get(r)).collect();
            values.sort_unstable();
            for (i, &v) in values.iter().enumerate() {
                if values.get(i + 1) != Some(&v) {
                    out.push((c.to_string(), metric, v, (i + 1) as f64 / total));
                }
            }
        }
    }
    out
}

pub fn write_rows<W: Write>(w: W, rows: &[ResultRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(ROW_COLUMNS)?;
    for r in rows {
        out.write_record([
            r.instance.clone(),
            r.config.clone(),
            r.status.clone(),
            r.cost.map(|c| c.to_string()).unwrap_or_default(),
            r.nodes.to_string(),
            r.sp_searches.to_string(),
            r.arc_relaxations.to_string(),
            format!("{:.6}", r.time_total_s),
            format!("{:.6}", r.time_sp_s),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows<R: std::io::Read>(r: R) -> csv::Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let num = |i: usize| rec[i].parse::<u64>().unwrap_or(0);
        let float = |i: usize| rec[i].parse::<f64>().unwrap_or(0.0);
        rows.push(ResultRow {
            instance: rec[0].to_string(),
            config: rec[1].to_string(),
            status: rec[2].to_string(),
            cost: rec[3].parse().ok(),
            nodes: num(4),
            sp_searches: num(5),
            arc_relaxations: num(6),
            time_total_s: float(7),
            time_sp_s: float(8),
        });
    }
    Ok(rows)
}

pub fn write_summary<W: Write>(w: W, summary: &[SummaryRow]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SUMMARY_COLUMNS)?;
    for s in summary {
        out.write_record([
            s.config.clone(),
            s.instances.to_string(),
            s.solved.to_string(),
            format!("{:.4}", s.geomean_nodes),
            s.max_nodes.to_string(),
            format!("{:.4}", s.geomean_sp_searches),
            s.max_sp_searches.to_string(),
            format!("{:.6}", s.geomean_time_s),
            format!("{:.6}", s.max_time_s),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_cdf<W: Write>(w: W, points: &[(String, &'static str, u64, f64)]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["config", "metric", "value", "solved_fraction"])?;
    for (c, m, v, f) in points {
        out.write_record([c.clone(), m.to_string(), v.to_string(), format!("{f:.6}")])?;
    }
    out.flush()?;
    Ok(())
}


/// Parses a `node/branch/conflict` label.
pub fn parse_label(label: &str) -> Result<SolverConfig, String> {
    let parts: Vec<&str> = label.split('/').collect();
    let [node, branch, conflict] = parts[..] else {
        return Err(format!("expected node/branch/conflict, got {label:?}"));
    };
    let cfg = SolverConfig::new(
        node.parse().map_err(|e| format!("{e}"))?,
        branch.parse().map_err(|e| format!("{e}"))?,
        lcsp_core::solver::parse_conflict(conflict).map_err(|e| format!("{e}"))?,
    );
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

#[cfg(test)]
mod label_tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for cfg in SolverConfig::all_combinations() {
            assert_eq!(parse_label(&cfg.label()).unwrap().label(), cfg.label());
        }
        assert!(parse_label("dfs/strong/standard").is_err());
        assert!(parse_label("dfs/clause").is_err());
    }
}

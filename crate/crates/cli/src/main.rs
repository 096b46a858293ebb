use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lcsp_cli::bench::{self, Limits};
use lcsp_cli::dataset::FlightDataset;
use lcsp_cli::format::LcspFile;
use lcsp_cli::generate::{generate, generate_instance, GenParams};
use lcsp_cli::oracle::brute_force_solve;
use lcsp_core::logic::ConflictFlavor;
use lcsp_core::solver::{parse_conflict, solve, BranchRule, Instance, NodeRule, SolverConfig, SpEngine, Status};
use lcsp_flight::{compile, Aircraft};

const EXIT_INFEASIBLE: u8 = 2;
const EXIT_LIMIT: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Logic-constrained shortest path solver.
#[derive(Parser)]
#[command(name = "lcsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Write a random instance.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: GenArgs,
        /// Output file (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance by exhaustive enumeration.
    Oracle { file: PathBuf },
    /// Run a configuration matrix over a suite and write result tables.
    Bench(BenchArgs),
    /// Compile flight planning problems into instance files.
    CompileFlight {
        /// Dataset directory.
        #[arg(long)]
        dataset: PathBuf,
        /// Origin airport (default: every pair in od.csv).
        #[arg(long, requires = "destination")]
        origin: Option<String>,
        #[arg(long, requires = "origin")]
        destination: Option<String>,
        /// Directory for `<origin>-<destination>.lcsp` files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Also solve and print the route.
        #[arg(long)]
        solve: bool,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, default_value = "dfs")]
    node_rule: NodeRule,
    #[arg(long, default_value = "clause")]
    branch: BranchRule,
    /// standard or graph.
    #[arg(long, default_value = "standard", value_parser = parse_flavor)]
    conflict: ConflictFlavor,
    /// static or dynamic.
    #[arg(long, default_value = "dynamic", value_parser = parse_engine)]
    engine: SpEngine,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 8)]
    lookahead: u32,
    #[arg(long)]
    pure_literals: bool,
    #[arg(long)]
    no_parent_path_check: bool,
    #[arg(long, default_value_t = 0.95)]
    cvds_decay: f64,
    #[arg(long, default_value_t = 256)]
    cvds_interval: u64,
    #[arg(long, default_value_t = 4)]
    hybrid_depth: u32,
    #[arg(long, default_value_t = 0.25)]
    rebuild_fraction: f64,
}

fn parse_flavor(s: &str) -> Result<ConflictFlavor, String> {
    parse_conflict(s).map_err(|e| e.to_string())
}

fn parse_engine(s: &str) -> Result<SpEngine, String> {
    match s {
        "static" => Ok(SpEngine::Static),
        "dynamic" => Ok(SpEngine::Dynamic),
        _ => Err(format!("unknown engine {s:?}, expected static or dynamic")),
    }
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::new(self.node_rule, self.branch, self.conflict);
        cfg.engine = self.engine;
        cfg.node_limit = self.node_limit;
        cfg.time_limit = self.time_limit.map(Duration::from_secs_f64);
        cfg.epsilon = self.epsilon;
        cfg.lookahead = self.lookahead;
        cfg.pure_literals = self.pure_literals;
        cfg.parent_path_check = !self.no_parent_path_check;
        cfg.cvds.decay = self.cvds_decay;
        cfg.cvds.interval = self.cvds_interval;
        cfg.hybrid_depth = self.hybrid_depth;
        cfg.rebuild_fraction = self.rebuild_fraction;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Clone)]
struct GenArgs {
    /// Use the hard preset; the shape flags below are ignored.
    #[arg(long)]
    hard: bool,
    #[arg(long, default_value_t = 25)]
    vertices: usize,
    #[arg(long, default_value_t = 60)]
    arcs: usize,
    #[arg(long, default_value_t = 10)]
    restrictions: usize,
    #[arg(long, default_value_t = 3)]
    clause_size: usize,
    #[arg(long, default_value_t = 3)]
    conjunctions: usize,
    #[arg(long, default_value_t = 1)]
    min_conjunctions: usize,
    /// Vertices per layer (default: square root of the vertex count).
    #[arg(long)]
    layer_width: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    free_var_rate: f64,
    #[arg(long, default_value_t = 0.5)]
    negative_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    path_focus: f64,
    #[arg(long, default_value_t = 1)]
    min_weight: i64,
    #[arg(long, default_value_t = 20)]
    max_weight: i64,
}

impl GenArgs {
    fn params(&self) -> Result<GenParams> {
        if self.hard {
            return Ok(GenParams::hard());
        }
        if self.vertices < 2 || self.min_weight < 0 || self.min_weight > self.max_weight {
            bail!(Usage("need at least 2 vertices and 0 <= min-weight <= max-weight".into()));
        }
        if !(0.0..=1.0).contains(&self.free_var_rate) || !(0.0..=1.0).contains(&self.negative_rate)
            || !(0.0..=1.0).contains(&self.path_focus) {
            bail!(Usage("rates must lie in [0,1]".into()));
        }
        Ok(GenParams {
            vertices: self.vertices,
            arcs: self.arcs,
            restrictions: self.restrictions,
            clause_size: self.clause_size,
            conjunctions: self.conjunctions,
            min_conjunctions: self.min_conjunctions,
            layer_width: self.layer_width,
            free_var_rate: self.free_var_rate,
            negative_rate: self.negative_rate,
            path_focus: self.path_focus,
            weight_range: (self.min_weight, self.max_weight),
        })
    }
}

#[derive(Args, Clone)]
struct BenchArgs {
    /// Instance files; if empty, a generated suite is used.
    files: Vec<PathBuf>,
    /// Size of the generated suite.
    #[arg(long, default_value_t = 200)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    params: GenArgs,
    /// `all`, `baseline`, or comma-separated node/branch/conflict labels.
    #[arg(long, default_value = "all")]
    configs: String,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Seconds per solve.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Worker threads (default: LCSP_THREADS or all cores).
    #[arg(long, env = "LCSP_THREADS", default_value_t = 0)]
    threads: usize,
    /// Instances the baseline solves in fewer nodes are left out of the
    /// summary.
    #[arg(long, default_value_t = 10)]
    trivial_threshold: u64,
    /// Row CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    cdf: Option<PathBuf>,
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn load(path: &Path) -> Result<Instance<i64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = LcspFile::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(file.to_instance().with_context(|| format!("building {}", path.display()))?)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Optimal => 0,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::LimitReached => EXIT_LIMIT,
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve { file, solver } => {
            let inst = load(&file)?;
            let cfg = solver.config()?;
            let (sol, stats) = solve(&inst, &cfg)?;
            println!("status {}", sol.status.name());
            if let Some(p) = &sol.path {
                println!("cost {}", p.weight);
                let arcs: Vec<String> = p.arcs.iter().map(usize::to_string).collect();
                println!("path {}", arcs.join(" "));
            }
            println!(
                "nodes {} sp_searches {} arc_relaxations {} time_s {:.6}",
                stats.nodes,
                stats.sp_searches,
                stats.arc_relaxations,
                stats.time_total.as_secs_f64()
            );
            Ok(status_code(sol.status))
        }
        Command::Generate { seed, params, out } => {
            let text = generate(seed, &params.params()?).write();
            output(out.as_deref())?.write_all(text.as_bytes())?;
            Ok(0)
        }
        Command::Oracle { file } => {
            let r = brute_force_solve(&load(&file)?)?;
            println!("status {}", r.status.name());
            if let (Some(c), Some(p)) = (r.cost, &r.path) {
                println!("cost {c}");
                let arcs: Vec<String> = p.iter().map(usize::to_string).collect();
                println!("path {}", arcs.join(" "));
            }
            println!("paths_checked {}", r.paths_checked);
            Ok(status_code(r.status))
        }
        Command::Bench(args) => bench_cmd(args),
        Command::CompileFlight {
            dataset,
            origin,
            destination,
            out_dir,
            solve: do_solve,
            solver,
        } => {
            let data = FlightDataset::load(&dataset)?;
            let pairs = match (origin, destination) {
                (Some(o), Some(d)) => vec![(o, d)],
                _ => data.od_pairs.clone(),
            };
            let cfg = solver.config()?;
            if let Some(dir) = &out_dir {
                fs::create_dir_all(dir)?;
            }
            let mut code = 0;
            for (o, d) in pairs {
                let ci = compile(&data.network, &data.levels, &Aircraft::default(), &data.tfrs, &o, &d)?;
                println!(
                    "{o}-{d}: {} vertices, {} arcs, {} restrictions encoded, {} dropped",
                    ci.vertices.len(),
                    ci.arcs.len(),
                    ci.report.encoded,
                    ci.report.dropped.len()
                );
                if let Some(dir) = &out_dir {
                    let path = dir.join(format!("{o}-{d}.lcsp"));
                    fs::write(&path, LcspFile::from_instance(&ci.instance).write())?;
                }
                if do_solve {
                    let (sol, stats) = solve(&ci.instance, &cfg)?;
                    print!("  {} after {} nodes", sol.status.name(), stats.nodes);
                    if let Some(p) = &sol.path {
                        let route = ci.route(p);
                        let fixes: Vec<String> = route.fixes.iter().map(|(w, l)| format!("{w}@{l}")).collect();
                        print!(
                            ": {:.3} kg, {:.1} s via {}",
                            route.consumption_kg,
                            route.duration_s,
                            fixes.join(" ")
                        );
                    }
                    println!();
                    code = code.max(status_code(sol.status));
                }
            }
            Ok(code)
        }
    }
}

fn bench_cmd(args: BenchArgs) -> Result<u8> {
    let mut configs = match args.configs.as_str() {
        "all" => SolverConfig::all_combinations(),
        "baseline" => vec![bench::baseline()],
        list => list
            .split(',')
            .map(|l| bench::parse_label(l.trim()).map_err(Usage))
            .collect::<Result<_, _>>()?,
    };
    let baseline = bench::baseline();
    if !configs.iter().any(|c| c.label() == baseline.label()) {
        // the triviality filter needs baseline rows
        configs.insert(0, baseline.clone());
    }
    let instances: Vec<(String, Instance<i64>)> = if args.files.is_empty() {
        let params = args.params.params()?;
        (0..args.count)
            .map(|i| (format!("gen-{}", args.seed + i), generate_instance(args.seed + i, &params)))
            .collect()
    } else {
        args.files
            .iter()
            .map(|p| Ok((p.display().to_string(), load(p)?)))
            .collect::<Result<_>>()?
    };
    let limits = Limits {
        nodes: args.node_limit,
        time: args.time_limit.map(Duration::from_secs_f64),
    };
    let rows = bench::run_benchmark(&instances, &configs, limits, args.threads);
    bench::write_rows(output(args.out.as_deref())?, &rows)?;
    let trivial = bench::trivial_instances(&rows, &baseline.label(), args.trivial_threshold);
    log::info!("{} of {} instances are trivial", trivial.len(), instances.len());
    if let Some(p) = &args.summary {
        bench::write_summary(output(Some(p))?, &bench::summarize(&rows, &trivial))?;
    }
    if let Some(p) = &args.cdf {
        bench::write_cdf(output(Some(p))?, &bench::cdf(&rows, &trivial))?;
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.chain().any(|c| c.is::<Usage>() || c.is::<lcsp_core::solver::ConfigError>());
            ExitCode::from(if usage { EXIT_USAGE } else { 1 })
        }
    }
}

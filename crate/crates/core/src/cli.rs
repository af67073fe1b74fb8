//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the requested work fails (an invalid
//! solution, generation giving up, unreadable files), 2 on usage errors.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::conflict::{build_conflict_graph, greedy_clique, kernelize, lift_coloring, ConflictGraph};
use crate::error::{Error, Result};
use crate::generators::{
    generate, load_polygon, Family, GeneratorConfig, Ratio, ReParams, SqrpParams, VispParams,
};
use crate::harness::{
    leaderboard, load_instance_dir, load_reference, load_submissions, run_baselines,
    select_diverse, write_baseline_report, write_baseline_summary, write_scores,
    write_scores_wide, BaselineConfig, FeatureVector,
};
use crate::instance::{
    load_instance, load_solution, save_instance, save_solution, verify_solution, verify_with_graph,
    Coloring, Instance,
};
use crate::solvers::{
    best_construction, dsatur, exact_bnb_dsatur, greedy_welsh_powell, iterated_greedy, rlf,
    solve_descending_with, write_trace, Algorithm, DescentAlgorithm, DescentOptions, IgStrategy,
    SearchBudget, TraceRow,
};
use crate::stats::{instance_stats, read_stats, write_stats};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;

/// Per-step iteration limit of the local searches when no budget is given.
const DEFAULT_SEARCH_ITERATIONS: u64 = 100_000;
/// Generation limit per color step of the hybrid EA when no budget is given.
const DEFAULT_EA_GENERATIONS: u64 = 200;
/// Node limit of the exact search when no budget is given.
const DEFAULT_EXACT_NODES: u64 = 10_000_000;

#[derive(Debug, Parser)]
#[command(name = "planepart", version, about = "Partition plane segments into non-crossing subsets")]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Worker threads for batch work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Color an instance.
    Solve(SolveArgs),
    /// Check a solution against an instance.
    Verify(VerifyArgs),
    /// Per-instance statistics as CSV.
    Stats(StatsArgs),
    /// Score a submissions directory.
    Score(ScoreArgs),
    /// Run the baseline methods over an instance directory.
    Baselines(BaselineArgs),
    /// Pick a diverse subset of instances from a statistics CSV.
    Select(SelectArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GeneratorKind {
    Sqrp,
    Visp,
    Re,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    generator: Option<GeneratorKind>,
    /// JSON generator configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
    /// Write the generation report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Inflate segments by 1 + eps (e.g. `1/64` or `0.015625`).
    #[arg(long)]
    ecn: Option<Ratio>,
    /// Number of random extra segments.
    #[arg(long)]
    noise: Option<usize>,
    /// sqrp: rectangle width.
    #[arg(long)]
    width: Option<i64>,
    /// sqrp: rectangle height.
    #[arg(long)]
    height: Option<i64>,
    /// sqrp, visp: number of points.
    #[arg(long)]
    npoints: Option<usize>,
    #[arg(long)]
    q_low: Option<f64>,
    #[arg(long)]
    q_high: Option<f64>,
    /// sqrp: edge inclusion probability.
    #[arg(long)]
    p: Option<f64>,
    /// visp: polygon file.
    #[arg(long)]
    polygon: Option<PathBuf>,
    #[arg(long)]
    min_segments: Option<usize>,
    #[arg(long)]
    max_segments: Option<usize>,
    #[arg(long)]
    max_retries: Option<usize>,
    /// re: vertex count.
    #[arg(long)]
    ell: Option<usize>,
    /// re: regular degree.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    p_extra: Option<f64>,
    #[arg(long)]
    layout_iterations: Option<usize>,
    #[arg(long)]
    grid_scale: Option<f64>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// wp, dsatur, rlf, ig, tabucol, partialcol, hybrid_ea or exact.
    #[arg(long, default_value = "dsatur")]
    algo: Algorithm,
    /// Stop once this many colors are reached.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seconds: Option<f64>,
    /// Iterations per color step (generations for hybrid_ea, nodes for
    /// exact, passes for ig).
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write a CSV trace of the color descent.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Kernelize the conflict graph before solving.
    #[arg(long)]
    reduce: bool,
    /// Also write the conflict graph in DIMACS format.
    #[arg(long)]
    dimacs: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(short, long)]
    instance: PathBuf,
    #[arg(short, long)]
    solution: PathBuf,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Instance files or directories.
    #[arg(short, long, required = true, num_args = 1..)]
    instance: Vec<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    /// Directory of instance files.
    #[arg(long)]
    instances: PathBuf,
    /// Directory holding `manifest.csv` and the solution files.
    #[arg(long)]
    submissions: PathBuf,
    /// `id,best_k` CSV of known best values.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Per-instance score table.
    #[arg(long)]
    wide: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[arg(long)]
    instances: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// `method,total` virtual-score summary.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Time limit of each hybrid EA run.
    #[arg(long)]
    seconds: Option<f64>,
    /// Generation limit per color step of each hybrid EA run.
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long, default_value_t = 500)]
    ig_iterations: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SelectArgs {
    /// Statistics CSV as written by `stats`.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    count: usize,
    /// Six comma-separated feature weights.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Score(a) => cmd_score(a),
        Command::Baselines(a) => cmd_baselines(a),
        Command::Select(a) => cmd_select(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidConfig(_) => 2,
                _ => 1,
            }
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn read_instance(path: &Path) -> Result<Instance> {
    load_instance(BufReader::new(File::open(path)?))
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// File when given, standard output otherwise.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn gen_config(a: &GenArgs) -> Result<GeneratorConfig> {
    let mut config = match &a.config {
        Some(p) => serde_json::from_reader(BufReader::new(File::open(p)?))?,
        None => {
            let kind = a
                .generator
                .ok_or_else(|| usage("gen needs --generator or --config"))?;
            let family = match kind {
                GeneratorKind::Sqrp => Family::Sqrp(SqrpParams {
                    a: 10_000,
                    b: 10_000,
                    npoints: 100,
                    q_low: 0.0,
                    q_high: 100.0,
                    p: 0.5,
                }),
                GeneratorKind::Visp => Family::Visp(VispParams {
                    polygon: Vec::new(),
                    m: 60,
                    min_segments: 1,
                    max_segments: 1_000_000,
                    max_retries: 20,
                }),
                GeneratorKind::Re => Family::Re(ReParams {
                    ell: 100,
                    m: 4,
                    p_extra: 0.0,
                    layout_iterations: 300,
                    grid_scale: 1000.0,
                }),
            };
            GeneratorConfig::new(family, DEFAULT_SEED)
        }
    };
    match (&a.generator, &config.family) {
        (None, _)
        | (Some(GeneratorKind::Sqrp), Family::Sqrp(_))
        | (Some(GeneratorKind::Visp), Family::Visp(_))
        | (Some(GeneratorKind::Re), Family::Re(_)) => {}
        _ => return Err(usage("--generator disagrees with the configuration file")),
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if a.ecn.is_some() {
        config.ecn = a.ecn;
    }
    if a.noise.is_some() {
        config.noise = a.noise;
    }
    fn set<T: Copy>(slot: &mut T, v: Option<T>) {
        if let Some(v) = v {
            *slot = v;
        }
    }
    match &mut config.family {
        Family::Sqrp(c) => {
            set(&mut c.a, a.width);
            set(&mut c.b, a.height);
            set(&mut c.npoints, a.npoints);
            set(&mut c.q_low, a.q_low);
            set(&mut c.q_high, a.q_high);
            set(&mut c.p, a.p);
        }
        Family::Visp(c) => {
            if let Some(p) = &a.polygon {
                c.polygon = load_polygon(BufReader::new(File::open(p)?))?;
            }
            if c.polygon.is_empty() {
                return Err(usage("visp needs --polygon"));
            }
            set(&mut c.m, a.npoints);
            set(&mut c.min_segments, a.min_segments);
            set(&mut c.max_segments, a.max_segments);
            set(&mut c.max_retries, a.max_retries);
        }
        Family::Re(c) => {
            set(&mut c.ell, a.ell);
            set(&mut c.m, a.degree);
            set(&mut c.p_extra, a.p_extra);
            set(&mut c.layout_iterations, a.layout_iterations);
            set(&mut c.grid_scale, a.grid_scale);
        }
    }
    config.validate()?;
    Ok(config)
}

fn cmd_gen(a: GenArgs) -> Result<i32> {
    let config = gen_config(&a)?;
    let (instance, report) = generate(&config)?;
    let mut out = create(&a.output)?;
    save_instance(&instance, &mut out)?;
    out.flush()?;
    if let Some(p) = &a.report {
        let mut w = create(p)?;
        serde_json::to_writer_pretty(&mut w, &report)?;
        writeln!(w)?;
        w.flush()?;
    }
    eprintln!(
        "{}: {} points, {} segments, {} retries, largest conflict component {}/{}",
        instance.id(),
        instance.points().len(),
        instance.len(),
        report.retries,
        report.largest_component,
        report.non_isolated
    );
    Ok(0)
}

fn search_budget(a: &SolveArgs, default_iterations: u64) -> SearchBudget {
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let max_iterations = match (a.iterations, a.seconds) {
        (Some(i), _) => Some(i),
        (None, Some(_)) => None,
        (None, None) => Some(default_iterations),
    };
    SearchBudget {
        max_iterations,
        max_seconds: a.seconds,
        target_k: a.k,
        seed,
    }
}

/// Runs the selected algorithm on `graph`. Returns the coloring and trace.
fn run_algorithm(a: &SolveArgs, graph: &ConflictGraph) -> Result<(Coloring, Vec<TraceRow>)> {
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    let mut trace = Vec::new();
    let single = |c: Coloring| {
        let row = TraceRow {
            iteration: 0,
            objective: 0,
            best_k: c.num_colors,
            elapsed_seconds: 0.0,
        };
        (c, vec![row])
    };
    let descent = |algo: DescentAlgorithm, default: u64, trace: &mut Vec<TraceRow>| {
        let budget = search_budget(a, default);
        budget.validate()?;
        solve_descending_with(graph, &budget, algo, &DescentOptions::default(), Some(trace))
    };
    Ok(match a.algo {
        Algorithm::WelshPowell => single(greedy_welsh_powell(graph)),
        Algorithm::Dsatur => single(dsatur(graph)),
        Algorithm::Rlf => single(rlf(graph)),
        Algorithm::IteratedGreedy => {
            let iters = a.iterations.unwrap_or(500) as usize;
            let start = best_construction(graph);
            single(iterated_greedy(graph, &start, IgStrategy::Random, iters, seed)?)
        }
        Algorithm::Tabucol => {
            let c = descent(DescentAlgorithm::Tabucol, DEFAULT_SEARCH_ITERATIONS, &mut trace)?;
            (c, trace)
        }
        Algorithm::Partialcol => {
            let c = descent(DescentAlgorithm::Partialcol, DEFAULT_SEARCH_ITERATIONS, &mut trace)?;
            (c, trace)
        }
        Algorithm::HybridEa => {
            let c = descent(DescentAlgorithm::HybridEa, DEFAULT_EA_GENERATIONS, &mut trace)?;
            (c, trace)
        }
        Algorithm::Exact => {
            let budget = search_budget(a, DEFAULT_EXACT_NODES);
            let r = exact_bnb_dsatur(graph, &best_construction(graph), &budget)?;
            eprintln!(
                "exact: {} colors, {} (lower bound {}, {} nodes)",
                r.best.num_colors,
                if r.proven_optimal { "optimal" } else { "not proven optimal" },
                r.lower_bound,
                r.nodes
            );
            single(r.best)
        }
    })
}

fn cmd_solve(a: SolveArgs) -> Result<i32> {
    let instance = read_instance(&a.instance)?;
    let graph = build_conflict_graph(&instance)?;
    if let Some(p) = &a.dimacs {
        let mut w = create(p)?;
        graph.write_dimacs(&mut w)?;
        w.flush()?;
    }
    let (coloring, trace) = if a.reduce {
        let lb = greedy_clique(&graph, 10, a.seed.unwrap_or(DEFAULT_SEED)).len();
        let (kernel, stack) = kernelize(&graph, lb);
        eprintln!("kernel: {} of {} segments remain", kernel.n(), graph.n());
        let (c, trace) = run_algorithm(&a, &kernel)?;
        (lift_coloring(&c, &stack)?, trace)
    } else {
        run_algorithm(&a, &graph)?
    };
    let coloring = coloring.with_instance_id(instance.id());
    let report = verify_with_graph(&graph, &coloring, 1);
    if !report.valid {
        eprintln!("error: solver produced an invalid coloring; nothing written");
        return Ok(1);
    }
    let mut out = create(&a.output)?;
    save_solution(&coloring, &mut out)?;
    out.flush()?;
    if let Some(p) = &a.trace {
        write_trace(&trace, create(p)?)?;
    }
    eprintln!("{}: {} colors", instance.id(), coloring.num_colors);
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let instance = read_instance(&a.instance)?;
    let coloring = load_solution(BufReader::new(File::open(&a.solution)?))?;
    let report = verify_solution(&instance, &coloring);
    if report.valid {
        println!("VALID k={}", report.num_colors);
        return Ok(0);
    }
    match (&report.error, report.conflicts.first()) {
        (Some(e), _) => println!("INVALID {e}"),
        (None, Some(&(u, v))) => println!(
            "INVALID segments {u} and {v} intersect and share color {}",
            coloring.colors[u]
        ),
        (None, None) => println!("INVALID"),
    }
    Ok(1)
}

fn collect_instances(paths: &[PathBuf]) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            out.extend(load_instance_dir(p)?);
        } else {
            out.push(read_instance(p)?);
        }
    }
    Ok(out)
}

fn cmd_stats(a: StatsArgs) -> Result<i32> {
    let instances = collect_instances(&a.instance)?;
    let records = instances
        .par_iter()
        .map(|i| Ok(instance_stats(i, &build_conflict_graph(i)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut w = sink(a.output.as_deref())?;
    write_stats(&records, &mut w)?;
    w.flush()?;
    Ok(0)
}

fn reference(path: Option<&Path>) -> Result<Option<HashMap<String, usize>>> {
    path.map(|p| load_reference(BufReader::new(File::open(p)?)))
        .transpose()
}

fn cmd_score(a: ScoreArgs) -> Result<i32> {
    let instances = load_instance_dir(&a.instances)?;
    let submissions = load_submissions(&a.submissions, &instances)?;
    let invalid = submissions.iter().filter(|s| !s.valid).count();
    if invalid > 0 {
        eprintln!("{invalid} invalid submissions ignored");
    }
    let ids: Vec<String> = instances.iter().map(|i| i.id().to_string()).collect();
    let reference = reference(a.reference.as_deref())?;
    let table = leaderboard(&submissions, &ids, reference.as_ref())?;
    let mut w = sink(a.output.as_deref())?;
    write_scores(&table, &mut w)?;
    w.flush()?;
    if let Some(p) = &a.wide {
        write_scores_wide(&table, create(p)?)?;
    }
    Ok(0)
}

fn cmd_baselines(a: BaselineArgs) -> Result<i32> {
    let instances = load_instance_dir(&a.instances)?;
    let config = BaselineConfig {
        ig_iterations: a.ig_iterations,
        ea_seconds: match (a.seconds, a.iterations) {
            (None, None) => Some(120.0),
            (s, _) => s,
        },
        ea_iterations: a.iterations,
        seed: a.seed.unwrap_or(DEFAULT_SEED),
        ..BaselineConfig::default()
    };
    let reference = reference(a.reference.as_deref())?;
    let report = run_baselines(&instances, &config, reference.as_ref())?;
    let mut w = sink(a.output.as_deref())?;
    write_baseline_report(&report, &mut w)?;
    w.flush()?;
    if let Some(p) = &a.summary {
        write_baseline_summary(&report, create(p)?)?;
    }
    Ok(0)
}

fn cmd_select(a: SelectArgs) -> Result<i32> {
    let records = read_stats(BufReader::new(File::open(&a.input)?))?;
    let features: Vec<FeatureVector> = records.iter().map(FeatureVector::from).collect();
    let weights = match &a.weights {
        Some(w) => Some(
            <[f64; 6]>::try_from(w.as_slice())
                .map_err(|_| usage(format!("expected 6 weights, got {}", w.len())))?,
        ),
        None => None,
    };
    let chosen = select_diverse(&features, a.count, weights.as_ref())?;
    let mut w = sink(a.output.as_deref())?;
    for id in chosen {
        writeln!(w, "{id}")?;
    }
    w.flush()?;
    Ok(0)
}

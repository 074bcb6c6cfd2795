//! Command-line front end over the library: property checks, value
//! ranges, worst-finite computation, instance generation and benchmarks.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use itp::bench::{run_benchmark, threads_from_env, BenchConfig, Method};
use itp::generate::{generate_instance, GenParams};
use itp::io::{instance_to_string, parse_instance, parse_solution, write_instance, ParseError};
use itp::properties::{
    strong_feasible_problem, strong_feasible_solution, strong_optimal_problem,
    strong_optimal_solution_fixed_cost, strong_optimal_solution_general, weak_feasible_problem,
    weak_feasible_solution, weak_optimal_problem, weak_optimal_solution, PropertyError,
};
use itp::value_range::{value_range_report, ValueRangeError};
use itp::worst_finite::{
    dump_bigm_lp, extract_worst_scenario, pattern_bits, worst_finite_bnb, worst_finite_enumerate,
    NodeOrder, WorstFiniteConfig, WorstFiniteError,
};
use itp::{Instance, TransportPlan};

const EXIT_USAGE: u8 = 1;
const EXIT_INSTANCE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "itp", version, about = "Interval transportation problem toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check feasibility/optimality properties of an instance or a solution.
    Check(CheckArgs),
    /// Best and worst optimal values with witnesses.
    Range(RangeArgs),
    /// Worst finite optimal value by search or enumeration.
    WorstFinite(WorstFiniteArgs),
    /// Generate a random instance.
    Gen(GenArgs),
    /// Run a benchmark over a directory, file or generator spec.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Instance file (JSON).
    file: PathBuf,
    /// Solution file (JSON matrix); without it the problem itself is checked.
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Restrict the check to one property.
    #[arg(long, value_enum)]
    property: Option<Property>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Weakfeas,
    Strongfeas,
    Weakopt,
    Strongopt,
}

#[derive(Args)]
struct RangeArgs {
    file: PathBuf,
    /// Time limit for the worst-finite part, seconds.
    #[arg(long, default_value_t = 1500.0)]
    time_limit: f64,
}

#[derive(Args)]
struct WorstFiniteArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Time limit in seconds.
    #[arg(long, default_value_t = 1500.0)]
    time_limit: f64,
    /// Deterministic node budget for the search.
    #[arg(long)]
    node_limit: Option<u64>,
    /// Write the convergence log to this CSV file.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Depth-first node order instead of best-bound.
    #[arg(long)]
    depth_first: bool,
    /// Dump the mixed-integer reformulation in LP text format and exit.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Bnb,
    Enum,
    Auto,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ceilings at twice the floors (otherwise exact supply/demand).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    doubling: bool,
    /// Cost floor range `lo,hi`.
    #[arg(long, value_parser = parse_range, default_value = "5,25")]
    cost_lo: (u32, u32),
    /// Cost width range `lo,hi`.
    #[arg(long, value_parser = parse_range, default_value = "0,10")]
    cost_width: (u32, u32),
    /// Supply floor range `lo,hi`.
    #[arg(long, value_parser = parse_range, default_value = "10,50")]
    supply_lo: (u32, u32),
    /// Demand floor range `lo,hi` (before rebalancing).
    #[arg(long, value_parser = parse_range, default_value = "10,50")]
    demand_lo: (u32, u32),
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files, a single file, or a spec `MxN:COUNT:SEED`.
    target: String,
    /// Write the report CSV here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long, default_value_t = 1500.0)]
    time_limit: f64,
    /// Directory for per-instance convergence CSVs.
    #[arg(long)]
    log_dir: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo = a.trim().parse::<u32>().map_err(|e| e.to_string())?;
    let hi = b.trim().parse::<u32>().map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Cmd::Check(args) => cmd_check(args),
        Cmd::Range(args) => cmd_range(args),
        Cmd::WorstFinite(args) => cmd_worst_finite(args),
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: msg.into() }
    }

    fn instance(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_INSTANCE, message: msg.into() }
    }

    fn numerical(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_NUMERICAL, message: msg.into() }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::instance(e.to_string())
    }
}

impl From<PropertyError> for CliError {
    fn from(e: PropertyError) -> Self {
        match e {
            PropertyError::Numerical(_) => CliError::numerical(e.to_string()),
            _ => CliError::instance(e.to_string()),
        }
    }
}

impl From<WorstFiniteError> for CliError {
    fn from(e: WorstFiniteError) -> Self {
        match e {
            WorstFiniteError::Numerical(_) => CliError::numerical(e.to_string()),
            _ => CliError::instance(e.to_string()),
        }
    }
}

impl From<ValueRangeError> for CliError {
    fn from(e: ValueRangeError) -> Self {
        match e {
            ValueRangeError::Numerical(_) => CliError::numerical(e.to_string()),
            _ => CliError::instance(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::instance(e.to_string())
    }
}

fn want(selected: Option<Property>, p: Property) -> bool {
    selected.is_none_or(|s| s == p)
}

fn cmd_check(args: CheckArgs) -> Result<(), CliError> {
    let inst = parse_instance(&args.file)?;
    match &args.solution {
        Some(path) => {
            let plan = parse_solution(path)?;
            check_solution(&inst, &plan, args.property)
        }
        None => {
            if want(args.property, Property::Weakfeas) {
                println!("weakly feasible problem: {}", weak_feasible_problem(&inst));
            }
            if want(args.property, Property::Strongfeas) {
                println!("strongly feasible problem: {}", strong_feasible_problem(&inst));
            }
            if want(args.property, Property::Weakopt) {
                println!("weakly optimal problem: {}", weak_optimal_problem(&inst));
            }
            if want(args.property, Property::Strongopt) {
                println!("strongly optimal problem: {}", strong_optimal_problem(&inst));
            }
            Ok(())
        }
    }
}

fn check_solution(
    inst: &Instance,
    plan: &TransportPlan,
    property: Option<Property>,
) -> Result<(), CliError> {
    if want(property, Property::Weakfeas) {
        println!("weakly feasible solution: {}", weak_feasible_solution(inst, plan)?);
    }
    if want(property, Property::Strongfeas) {
        println!("strongly feasible solution: {}", strong_feasible_solution(inst, plan)?);
    }
    if want(property, Property::Weakopt) {
        match weak_optimal_solution(inst, plan)? {
            Some(cert) => {
                println!("weakly optimal solution: true");
                println!("  witness supply: {:?}", cert.scenario.supply);
                println!("  witness demand: {:?}", cert.scenario.demand);
            }
            None => println!("weakly optimal solution: false"),
        }
    }
    if want(property, Property::Strongopt) {
        let verdict = if inst.has_fixed_costs() {
            strong_optimal_solution_fixed_cost(inst, plan)?
        } else {
            strong_optimal_solution_general(inst, plan)?
        };
        println!("strongly optimal solution: {verdict}");
    }
    Ok(())
}

fn cmd_range(args: RangeArgs) -> Result<(), CliError> {
    let inst = parse_instance(&args.file)?;
    if !weak_feasible_problem(&inst) {
        println!("weakly infeasible: no scenario admits a plan; the value range is empty");
        return Ok(());
    }
    let config = WorstFiniteConfig {
        time_limit: Some(Duration::from_secs_f64(args.time_limit)),
        ..WorstFiniteConfig::default()
    };
    let report = value_range_report(&inst, &config)?;
    println!("best optimal value:  {}", report.best);
    if report.worst.is_finite() {
        println!("worst optimal value: {}", report.worst);
    } else {
        println!("worst optimal value: inf (some scenario is infeasible)");
    }
    if let Some(wf) = report.worst_finite {
        let marker = if report.worst_finite_proven { "" } else { " (not proven)" };
        println!("worst finite value:  {wf}{marker}");
    }
    if let Some(w) = &report.best_witness {
        println!("best witness demand: {:?}", w.scenario.demand);
    }
    if let Some(w) = &report.worst_finite_witness {
        println!("worst witness demand: {:?} (ships {})", w.scenario.demand, w.plan.total());
    }
    Ok(())
}

fn cmd_worst_finite(args: WorstFiniteArgs) -> Result<(), CliError> {
    let inst = parse_instance(&args.file)?;
    if let Some(path) = &args.dump_lp {
        dump_bigm_lp(&inst, path)?;
        println!("wrote mixed-integer reformulation to {}", path.display());
        return Ok(());
    }
    let config = WorstFiniteConfig {
        time_limit: Some(Duration::from_secs_f64(args.time_limit)),
        node_limit: args.node_limit,
        node_order: if args.depth_first { NodeOrder::DepthFirst } else { NodeOrder::BestBound },
        ..WorstFiniteConfig::default()
    };
    let use_enum = match args.method {
        MethodArg::Enum => true,
        MethodArg::Bnb => false,
        MethodArg::Auto => pattern_bits(&inst) <= config.enumerate_cap,
    };
    let res = if use_enum {
        worst_finite_enumerate(&inst, &config)?
    } else {
        worst_finite_bnb(&inst, &config)?
    };
    println!(
        "worst finite value: {}{}",
        res.value,
        if res.proven_optimal { "" } else { " (not proven)" }
    );
    println!("upper bound:        {}", res.upper_bound);
    println!(
        "nodes: {}, lp solves: {}, time: {:.3}s",
        res.stats.nodes_explored,
        res.stats.lp_solves,
        res.stats.wall_time.as_secs_f64()
    );
    if let Ok(sc) = extract_worst_scenario(&inst, &res) {
        println!("worst scenario supply: {:?}", sc.supply);
        println!("worst scenario demand: {:?}", sc.demand);
    }
    if res.is_paradoxical(&inst) {
        println!(
            "paradox: worst scenario ships {} of {} available",
            res.shipped_total().unwrap_or(0.0),
            inst.total_demand_hi()
        );
    }
    if let Some(path) = &args.log {
        std::fs::write(path, itp::bench::convergence_csv(&res.log))?;
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let params = GenParams {
        cost_lo_range: args.cost_lo,
        cost_width_range: args.cost_width,
        supply_lo_range: args.supply_lo,
        demand_lo_range: args.demand_lo,
        doubling: args.doubling,
    };
    let inst = generate_instance(args.m, args.n, args.seed, &params)
        .map_err(|e| CliError::usage(e.to_string()))?;
    match &args.out {
        Some(path) => write_instance(&inst, path)?,
        None => print!("{}", instance_to_string(&inst)),
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let instances = load_bench_target(&args.target)?;
    if instances.is_empty() {
        return Err(CliError::usage(format!("no instances found in `{}`", args.target)));
    }
    let config = BenchConfig {
        method: match args.method {
            MethodArg::Bnb => Method::Bnb,
            MethodArg::Enum => Method::Enumerate,
            MethodArg::Auto => Method::Auto,
        },
        time_limit: Duration::from_secs_f64(args.time_limit),
        log_dir: args.log_dir.clone(),
        threads: threads_from_env(),
        ..BenchConfig::default()
    };
    let report = run_benchmark(&instances, &config);
    print!("{}", report.to_table());
    if let Some(path) = &args.report {
        std::fs::write(path, report.to_csv())?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

/// A bench target is a directory of `.json` instances, a single instance
/// file, or a generator spec `MxN:COUNT:SEED`.
fn load_bench_target(target: &str) -> Result<Vec<Instance>, CliError> {
    let path = Path::new(target);
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        return files.iter().map(|f| parse_instance(f).map_err(CliError::from)).collect();
    }
    if path.is_file() {
        return Ok(vec![parse_instance(path)?]);
    }
    if let Some((m, n, count, seed)) = parse_gen_spec(target) {
        return (0..count)
            .map(|k| {
                generate_instance(m, n, seed + k as u64, &GenParams::default())
                    .map_err(|e| CliError::usage(e.to_string()))
            })
            .collect();
    }
    Err(CliError::usage(format!(
        "`{target}` is neither a directory, an instance file, nor a spec like 5x10:10:42"
    )))
}

fn parse_gen_spec(s: &str) -> Option<(usize, usize, usize, u64)> {
    let mut parts = s.split(':');
    let size = parts.next()?;
    let count = parts.next()?.parse().ok()?;
    let seed = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    let (m, n) = size.split_once('x')?;
    Some((m.parse().ok()?, n.parse().ok()?, count, seed))
}

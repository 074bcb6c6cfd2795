//! Benchmark harness: runs the value-range pipeline over a set of
//! instances, collects per-instance rows, and emits CSV plus an aligned
//! text table together with per-instance convergence logs.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::model::Instance;
use crate::properties::weak_feasible_problem;
use crate::tol;
use crate::value_range::{best_optimal_value, worst_optimal_value};
use crate::worst_finite::{
    pattern_bits, worst_finite_bnb, worst_finite_enumerate, ConvergenceEntry, WorstFiniteConfig,
    WorstFiniteResult,
};

/// Engine choice for the worst-finite column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bnb,
    Enumerate,
    Auto,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub method: Method,
    pub time_limit: Duration,
    /// Deterministic node budget for the branch-and-bound, if any.
    pub node_limit: Option<u64>,
    /// Directory for per-instance convergence CSVs.
    pub log_dir: Option<PathBuf>,
    /// Worker threads across instances.
    pub threads: usize,
    /// Pattern-bit cap below which `Auto` picks enumeration.
    pub enumerate_cap: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            method: Method::Auto,
            time_limit: Duration::from_secs(1500),
            node_limit: None,
            log_dir: None,
            threads: threads_from_env(),
            enumerate_cap: 16,
        }
    }
}

/// Worker count from `ITP_THREADS`, defaulting to one.
pub fn threads_from_env() -> usize {
    std::env::var("ITP_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
}

/// One line of the report.
#[derive(Debug, Clone)]
pub struct BenchmarkRow {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub best: Option<f64>,
    /// Worst optimal value; infinite when some scenario is infeasible.
    pub worst: Option<f64>,
    pub worst_finite: Option<f64>,
    pub proven_optimal: bool,
    pub sum_d_shipped: Option<f64>,
    pub sum_d_upper: f64,
    pub paradox_flag: bool,
    /// Elapsed seconds when the final incumbent was first reached.
    pub best_found_time_s: f64,
    pub total_time_s: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
}

/// Runs every instance and collects the report; failures are recorded in
/// their row and the run continues. Rows keep the input order regardless
/// of the worker count.
pub fn run_benchmark(instances: &[Instance], config: &BenchConfig) -> BenchmarkReport {
    let slots: Mutex<Vec<Option<BenchmarkRow>>> = Mutex::new(vec![None; instances.len()]);
    let cursor = AtomicUsize::new(0);
    let workers = config.threads.max(1).min(instances.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = cursor.fetch_add(1, Ordering::Relaxed);
                if idx >= instances.len() {
                    break;
                }
                let row = run_one(&instances[idx], idx, config);
                slots.lock().unwrap()[idx] = Some(row);
            });
        }
    });
    let rows = slots.into_inner().unwrap().into_iter().map(|r| r.expect("row filled")).collect();
    BenchmarkReport { rows }
}

fn run_one(inst: &Instance, idx: usize, config: &BenchConfig) -> BenchmarkRow {
    let name = inst.name().map_or_else(|| format!("instance-{idx}"), str::to_owned);
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let start = Instant::now();
    let mut row = BenchmarkRow {
        name: name.clone(),
        m,
        n,
        best: None,
        worst: None,
        worst_finite: None,
        proven_optimal: false,
        sum_d_shipped: None,
        sum_d_upper: inst.total_demand_hi(),
        paradox_flag: false,
        best_found_time_s: 0.0,
        total_time_s: 0.0,
        error: None,
    };
    if !weak_feasible_problem(inst) {
        row.error = Some("not weakly feasible".into());
        row.total_time_s = start.elapsed().as_secs_f64();
        return row;
    }
    match best_optimal_value(inst) {
        Ok(w) => row.best = Some(w.value),
        Err(e) => {
            row.error = Some(e.to_string());
            row.total_time_s = start.elapsed().as_secs_f64();
            return row;
        }
    }
    match worst_optimal_value(inst) {
        Ok(v) => row.worst = Some(v),
        Err(e) => {
            row.error = Some(e.to_string());
            row.total_time_s = start.elapsed().as_secs_f64();
            return row;
        }
    }

    let wf_config = WorstFiniteConfig {
        time_limit: Some(config.time_limit),
        node_limit: config.node_limit,
        enumerate_cap: config.enumerate_cap,
        ..WorstFiniteConfig::default()
    };
    let use_enum = match config.method {
        Method::Enumerate => true,
        Method::Bnb => false,
        Method::Auto => pattern_bits(inst) <= config.enumerate_cap,
    };
    let wf = if use_enum {
        worst_finite_enumerate(inst, &wf_config)
    } else {
        worst_finite_bnb(inst, &wf_config)
    };
    match wf {
        Ok(res) => {
            row.worst_finite = Some(res.value);
            row.proven_optimal = res.proven_optimal;
            row.sum_d_shipped = res.shipped_total();
            row.paradox_flag = res.is_paradoxical(inst);
            row.best_found_time_s = best_found_time(&res);
            if let Some(dir) = &config.log_dir {
                let path = dir.join(format!("{}_convergence.csv", sanitize(&name)));
                if let Err(e) = std::fs::create_dir_all(dir)
                    .and_then(|_| std::fs::write(&path, convergence_csv(&res.log)))
                {
                    row.error = Some(format!("convergence log: {e}"));
                }
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row.total_time_s = start.elapsed().as_secs_f64();
    row
}

/// Elapsed time at which the final incumbent value first appeared.
fn best_found_time(res: &WorstFiniteResult) -> f64 {
    let target = res.value;
    res.log
        .iter()
        .find(|e| (e.incumbent - target).abs() <= tol::OPT * (1.0 + target.abs()))
        .map_or(0.0, |e| e.elapsed_s)
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

/// Serializes a convergence log with one row per bound or incumbent move.
pub fn convergence_csv(log: &[ConvergenceEntry]) -> String {
    let mut out = String::from("elapsed_seconds,incumbent_value,upper_bound,nodes_explored\n");
    for e in log {
        out.push_str(&format!(
            "{:.6},{},{},{}\n",
            e.elapsed_s, e.incumbent, e.upper_bound, e.nodes_explored
        ));
    }
    out
}

impl BenchmarkReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "name,m,n,best,worst,worst_finite,proven_optimal,sum_d_shipped,sum_d_upper,paradox_flag,best_found_time_s,total_time_s,error\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{:.3},{:.3},{}\n",
                r.name,
                r.m,
                r.n,
                opt(r.best),
                opt(r.worst),
                opt(r.worst_finite),
                r.proven_optimal,
                opt(r.sum_d_shipped),
                r.sum_d_upper,
                r.paradox_flag,
                r.best_found_time_s,
                r.total_time_s,
                r.error.as_deref().unwrap_or(""),
            ));
        }
        out
    }

    /// Aligned text table; non-proven worst-finite values carry `*`.
    pub fn to_table(&self) -> String {
        let headers =
            ["name", "size", "best", "worst", "worst_fin", "sum_d", "paradox", "found_s", "total_s"];
        let mut cells: Vec<[String; 9]> = Vec::new();
        for r in &self.rows {
            if let Some(err) = &r.error {
                cells.push([
                    r.name.clone(),
                    format!("{}x{}", r.m, r.n),
                    "-".into(),
                    "-".into(),
                    format!("error: {err}"),
                    "-".into(),
                    "-".into(),
                    "-".into(),
                    format!("{:.2}", r.total_time_s),
                ]);
                continue;
            }
            let wf = match r.worst_finite {
                Some(v) if r.proven_optimal => format!("{v}"),
                Some(v) => format!("{v}*"),
                None => "-".into(),
            };
            cells.push([
                r.name.clone(),
                format!("{}x{}", r.m, r.n),
                r.best.map_or("-".into(), |v| format!("{v}")),
                r.worst.map_or("-".into(), |v| format!("{v}")),
                wf,
                r.sum_d_shipped.map_or("-".into(), |v| format!("{v}")),
                if r.paradox_flag { "yes".into() } else { "no".into() },
                format!("{:.2}", r.best_found_time_s),
                format!("{:.2}", r.total_time_s),
            ]);
        }
        let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row.iter()) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        let fmt_row = |cols: &[String], widths: &[usize]| -> String {
            let mut line = String::new();
            for (i, (c, w)) in cols.iter().zip(widths).enumerate() {
                if i == 0 {
                    line.push_str(&format!("{c:<w$}"));
                } else {
                    line.push_str(&format!("  {c:>w$}"));
                }
            }
            line.push('\n');
            line
        };
        let head: Vec<String> = headers.iter().map(|s| s.to_string()).collect();
        out.push_str(&fmt_row(&head, &widths));
        for row in &cells {
            out.push_str(&fmt_row(row.as_slice(), &widths));
        }
        out
    }
}

fn opt(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_infinite() => "inf".into(),
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

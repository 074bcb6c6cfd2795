//! Worst finite optimal value: the largest optimal value over feasible
//! scenarios.
//!
//! Two independent engines compute it exactly. [`worst_finite_enumerate`]
//! brute-forces the decomposition of the weakly optimal solution set by
//! complementary slackness, solving one rational linear program per
//! pattern of tight/slack choices. [`worst_finite_bnb`] searches the same
//! space as a branch-and-bound over the complementarity disjunctions,
//! with the primal relaxation providing bounds and a dual feasibility
//! program pruning patterns that admit no optimal pair.

mod bnb;
mod enumerate;

pub use bnb::{worst_finite_bnb, BnbNode};
pub use enumerate::worst_finite_enumerate;

use std::time::Duration;

use crate::lp::{LpError, LpProblem, Relation, Sense};
use crate::model::{DualPair, Instance, Mode, Scenario, TransportPlan};
use crate::properties::weak_feasible_problem;
use crate::tol;
use crate::value_range::ValueWitness;

#[derive(Debug)]
pub enum WorstFiniteError {
    /// No scenario is feasible, so no finite worst value exists.
    NotWeaklyFeasible,
    /// The pattern enumeration would exceed the configured cap.
    InstanceTooLarge { bits: usize, cap: usize },
    /// The result holds no incumbent to extract a scenario from.
    NoIncumbent,
    Numerical(LpError),
}

impl std::fmt::Display for WorstFiniteError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WorstFiniteError::NotWeaklyFeasible => write!(f, "no scenario is feasible"),
            WorstFiniteError::InstanceTooLarge { bits, cap } => {
                write!(f, "{bits} pattern bits exceed the enumeration cap of {cap}")
            }
            WorstFiniteError::NoIncumbent => write!(f, "result carries no incumbent"),
            WorstFiniteError::Numerical(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for WorstFiniteError {}

impl From<LpError> for WorstFiniteError {
    fn from(e: LpError) -> Self {
        WorstFiniteError::Numerical(e)
    }
}

/// Node selection order of the branch-and-bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOrder {
    /// Process the open node with the largest bound first.
    BestBound,
    /// Stack discipline; smaller memory footprint.
    DepthFirst,
}

/// Search configuration shared by both engines.
#[derive(Debug, Clone)]
pub struct WorstFiniteConfig {
    /// Wall-clock budget for the branch-and-bound; `None` runs to proof.
    pub time_limit: Option<Duration>,
    /// Deterministic node budget; `None` is unlimited.
    pub node_limit: Option<u64>,
    /// Relative optimality gap below which the search stops as proven.
    pub gap_tol: f64,
    pub node_order: NodeOrder,
    /// Largest `m*n + m` for which enumeration is attempted.
    pub enumerate_cap: usize,
}

impl Default for WorstFiniteConfig {
    fn default() -> Self {
        WorstFiniteConfig {
            time_limit: None,
            node_limit: None,
            gap_tol: tol::OPT,
            node_order: NodeOrder::BestBound,
            enumerate_cap: 16,
        }
    }
}

/// One resolved choice per route and per source: a route either ships
/// nothing or its dual row is tight; a source either has a zero dual or
/// ships at least its supply floor with a non-positive dual.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplementarityPattern {
    /// Routes forced to `x_ij = 0` (the rest are forced tight).
    pub zero_routes: Vec<bool>,
    /// Sources forced to `sum_j x_ij >= supply floor` with `u_i <= 0`
    /// (the rest are forced to `u_i = 0`). Unused in depletion mode,
    /// where supply rows bind in every scenario.
    pub slack_sources: Vec<bool>,
}

#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    pub nodes_explored: u64,
    pub lp_solves: u64,
    pub wall_time: Duration,
}

/// One line of the anytime convergence log.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceEntry {
    pub elapsed_s: f64,
    pub incumbent: f64,
    pub upper_bound: f64,
    pub nodes_explored: u64,
}

/// The best certified solution found: a plan, a dual pair and the
/// scenario where the plan is optimal.
#[derive(Debug, Clone)]
pub struct Incumbent {
    pub value: f64,
    pub plan: TransportPlan,
    pub duals: DualPair,
    pub scenario: Scenario,
}

/// Outcome of a worst-finite computation.
#[derive(Debug, Clone)]
pub struct WorstFiniteResult {
    /// Best certified value (equals the worst finite optimal value when
    /// `proven_optimal` is set).
    pub value: f64,
    /// Valid upper bound on the worst finite optimal value.
    pub upper_bound: f64,
    pub proven_optimal: bool,
    pub incumbent: Option<Incumbent>,
    pub stats: SearchStats,
    pub log: Vec<ConvergenceEntry>,
}

impl WorstFiniteResult {
    /// Total amount shipped by the incumbent plan.
    pub fn shipped_total(&self) -> Option<f64> {
        self.incumbent.as_ref().map(|inc| inc.plan.total())
    }

    /// Whether the worst scenario ships strictly less than the maximal
    /// demand: more transferable goods, yet higher cost elsewhere.
    pub fn is_paradoxical(&self, inst: &Instance) -> bool {
        match self.shipped_total() {
            Some(shipped) => {
                let max_d = inst.total_demand_hi();
                shipped < max_d - tol::FEAS * (1.0 + max_d.abs())
            }
            None => false,
        }
    }

    pub fn witness(&self) -> Option<ValueWitness> {
        self.incumbent.as_ref().map(|inc| ValueWitness {
            value: inc.value,
            scenario: inc.scenario.clone(),
            plan: inc.plan.clone(),
        })
    }
}

/// Rebuilds the worst scenario from the incumbent plan: demands are the
/// column sums, supplies cover the row sums, costs sit at the top.
pub fn extract_worst_scenario(
    inst: &Instance,
    result: &WorstFiniteResult,
) -> Result<Scenario, WorstFiniteError> {
    let inc = result.incumbent.as_ref().ok_or(WorstFiniteError::NoIncumbent)?;
    Ok(scenario_for_plan(inst, &inc.plan))
}

/// The witness scenario pinning a plan: expensive costs, demands at the
/// column sums, supplies at the row sums raised to their floors.
pub(crate) fn scenario_for_plan(inst: &Instance, plan: &TransportPlan) -> Scenario {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let (supply, demand) = crate::properties::witness_rhs(inst, plan);
    let cost: Vec<f64> = (0..m * n).map(|k| inst.cost(k / n, k % n).hi).collect();
    Scenario::from_flat(m, n, cost, supply, demand)
}

/// Primal side of a pattern or node: maximize the expensive-cost value of
/// a plan over the weakly feasible region, with selected routes pinned to
/// zero and selected sources forced to ship at least their floor.
pub(crate) fn primal_part_lp(
    inst: &Instance,
    zero_routes: &[bool],
    slack_sources: &[bool],
) -> LpProblem {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let mut p = LpProblem::new(Sense::Maximize);
    let xs: Vec<usize> = (0..m * n)
        .map(|k| {
            let hi = if zero_routes[k] { 0.0 } else { f64::INFINITY };
            p.add_var(inst.cost(k / n, k % n).hi, 0.0, hi)
        })
        .collect();
    for i in 0..m {
        let entries: Vec<(usize, f64)> = (0..n).map(|j| (xs[i * n + j], 1.0)).collect();
        p.add_row(Relation::Le, inst.supply(i).hi, &entries);
        match inst.mode() {
            Mode::SupplyLeq => {
                if slack_sources[i] {
                    p.add_row(Relation::Ge, inst.supply(i).lo, &entries);
                }
            }
            Mode::SupplyEq => {
                p.add_row(Relation::Ge, inst.supply(i).lo, &entries);
            }
        }
    }
    for j in 0..n {
        let entries: Vec<(usize, f64)> = (0..m).map(|i| (xs[i * n + j], 1.0)).collect();
        p.add_row(Relation::Le, inst.demand(j).hi, &entries);
        p.add_row(Relation::Ge, inst.demand(j).lo, &entries);
    }
    p
}

/// Dual side of a pattern or node: multipliers feasible at the expensive
/// costs, with selected rows forced tight and selected sources forced to
/// zero duals. The optional hint biases the solve toward tight rows on
/// the given routes and zero duals on the given sources, so that an
/// unresolved node is more likely to certify its relaxation solution.
pub(crate) fn dual_part_lp(
    inst: &Instance,
    tight_routes: &[bool],
    zero_dual_sources: &[bool],
    hint: Option<(&[bool], &[bool])>,
) -> LpProblem {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let mut u_obj = vec![0.0; m];
    let mut v_obj = vec![0.0; n];
    if let Some((routes, sources)) = hint {
        for k in 0..m * n {
            if routes[k] {
                u_obj[k / n] += 1.0;
                v_obj[k % n] += 1.0;
            }
        }
        for (i, flagged) in sources.iter().enumerate() {
            if *flagged {
                u_obj[i] += 1.0;
            }
        }
    }
    let mut p = LpProblem::new(Sense::Maximize);
    let us: Vec<usize> = (0..m)
        .map(|i| {
            let (lo, hi) = match inst.mode() {
                Mode::SupplyLeq if zero_dual_sources[i] => (0.0, 0.0),
                Mode::SupplyLeq => (f64::NEG_INFINITY, 0.0),
                Mode::SupplyEq => (f64::NEG_INFINITY, f64::INFINITY),
            };
            p.add_var(u_obj[i], lo, hi)
        })
        .collect();
    let vs: Vec<usize> =
        (0..n).map(|j| p.add_var(v_obj[j], f64::NEG_INFINITY, f64::INFINITY)).collect();
    for i in 0..m {
        for j in 0..n {
            let rel = if tight_routes[i * n + j] { Relation::Eq } else { Relation::Le };
            p.add_row(rel, inst.cost(i, j).hi, &[(us[i], 1.0), (vs[j], 1.0)]);
        }
    }
    p
}

/// Writes the worst-finite problem as a big-M mixed-integer program in
/// LP text format, for inspection with external solvers. Debug artifact
/// only: the native engines never use this reformulation, and the M
/// constants are conservative.
pub fn dump_bigm_lp(inst: &Instance, path: impl AsRef<std::path::Path>) -> std::io::Result<()> {
    use std::io::Write;
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let top_cost = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| inst.cost(i, j).hi)
        .fold(1.0f64, f64::max);
    // Basis duals are alternating sums of costs along spanning-tree
    // paths, so (m + n) times the top cost always covers them.
    let dual_box = (m + n) as f64 * top_cost;

    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "Maximize")?;
    write!(f, " obj:")?;
    for i in 0..m {
        for j in 0..n {
            write!(f, " + {} x_{i}_{j}", inst.cost(i, j).hi)?;
        }
    }
    writeln!(f)?;
    writeln!(f, "Subject To")?;
    for i in 0..m {
        write!(f, " sup_hi_{i}:")?;
        for j in 0..n {
            write!(f, " + x_{i}_{j}")?;
        }
        writeln!(f, " <= {}", inst.supply(i).hi)?;
        if inst.mode() == Mode::SupplyEq {
            write!(f, " sup_lo_{i}:")?;
            for j in 0..n {
                write!(f, " + x_{i}_{j}")?;
            }
            writeln!(f, " >= {}", inst.supply(i).lo)?;
        }
    }
    for j in 0..n {
        write!(f, " dem_hi_{j}:")?;
        for i in 0..m {
            write!(f, " + x_{i}_{j}")?;
        }
        writeln!(f, " <= {}", inst.demand(j).hi)?;
        write!(f, " dem_lo_{j}:")?;
        for i in 0..m {
            write!(f, " + x_{i}_{j}")?;
        }
        writeln!(f, " >= {}", inst.demand(j).lo)?;
    }
    for i in 0..m {
        for j in 0..n {
            let top = inst.cost(i, j).hi;
            writeln!(f, " dual_{i}_{j}: u_{i} + v_{j} <= {top}")?;
            // Shipping anything on a route forces its dual row tight.
            let flow_cap = inst.supply(i).hi.min(inst.demand(j).hi);
            writeln!(f, " ship_{i}_{j}: x_{i}_{j} - {flow_cap} z_{i}_{j} <= 0")?;
            let slack_cap = top + 2.0 * dual_box;
            writeln!(
                f,
                " tight_{i}_{j}: - u_{i} - v_{j} + {slack_cap} z_{i}_{j} <= {}",
                slack_cap - top
            )?;
        }
    }
    if inst.mode() == Mode::SupplyLeq {
        for i in 0..m {
            // Shipping below the floor forces a zero dual on the source.
            let floor = inst.supply(i).lo;
            if floor > 0.0 {
                write!(f, " floor_{i}:")?;
                for j in 0..n {
                    write!(f, " + x_{i}_{j}")?;
                }
                writeln!(f, " + {floor} w_{i} >= {floor}")?;
            }
            writeln!(f, " uzero_{i}: u_{i} - {dual_box} w_{i} >= -{dual_box}")?;
        }
    }
    writeln!(f, "Bounds")?;
    for i in 0..m {
        for j in 0..n {
            writeln!(f, " 0 <= x_{i}_{j}")?;
        }
    }
    for i in 0..m {
        match inst.mode() {
            Mode::SupplyLeq => writeln!(f, " -{dual_box} <= u_{i} <= 0")?,
            Mode::SupplyEq => writeln!(f, " -{dual_box} <= u_{i} <= {dual_box}")?,
        }
    }
    for j in 0..n {
        writeln!(f, " -{dual_box} <= v_{j} <= {dual_box}")?;
    }
    writeln!(f, "Binary")?;
    for i in 0..m {
        for j in 0..n {
            writeln!(f, " z_{i}_{j}")?;
        }
    }
    if inst.mode() == Mode::SupplyLeq {
        for i in 0..m {
            writeln!(f, " w_{i}")?;
        }
    }
    writeln!(f, "End")?;
    Ok(())
}

/// Picks the engine by instance size: exhaustive enumeration when the
/// pattern space is small, branch-and-bound otherwise.
pub fn worst_finite_auto(
    inst: &Instance,
    config: &WorstFiniteConfig,
) -> Result<WorstFiniteResult, WorstFiniteError> {
    if !weak_feasible_problem(inst) {
        return Err(WorstFiniteError::NotWeaklyFeasible);
    }
    let bits = pattern_bits(inst);
    if bits <= config.enumerate_cap {
        worst_finite_enumerate(inst, config)
    } else {
        worst_finite_bnb(inst, config)
    }
}

/// Number of binary choices in the complementarity pattern space,
/// the size driver for the enumeration engine.
pub fn pattern_bits(inst: &Instance) -> usize {
    let mn = inst.num_sources() * inst.num_destinations();
    match inst.mode() {
        Mode::SupplyLeq => mn + inst.num_sources(),
        Mode::SupplyEq => mn,
    }
}

//! Branch-and-bound over the complementarity disjunctions.
//!
//! A node is a partial resolution of the per-route and per-source
//! disjunctions. Its primal relaxation (expensive-cost maximization over
//! the weakly feasible region plus the forced rows) gives the bound; a
//! dual feasibility program prunes nodes whose pattern admits no
//! multipliers. When the relaxation solution and some multipliers
//! satisfy every unresolved implication the node is solved exactly;
//! otherwise the search branches on the most violated implication.
//! Every explored node also donates a certified incumbent by re-solving
//! the scenario its relaxation plan pins down.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use crate::lp::{solve_lp, Arithmetic, LpStatus};
use crate::model::{DualPair, Instance, Mode, TransportPlan};
use crate::properties::weak_feasible_problem;
use crate::scenario::solve_scenario;
use crate::tol;
use crate::value_range::{initial_scenario, ValueRangeError};

use super::{
    dual_part_lp, primal_part_lp, scenario_for_plan, ConvergenceEntry, Incumbent, NodeOrder,
    SearchStats, WorstFiniteConfig, WorstFiniteError, WorstFiniteResult,
};

/// A partial resolution of the complementarity disjunctions.
#[derive(Debug, Clone)]
pub struct BnbNode {
    /// Routes forced to ship nothing.
    pub forced_zero: Vec<bool>,
    /// Routes forced to price tight.
    pub forced_tight: Vec<bool>,
    /// Sources forced to a zero dual.
    pub forced_uzero: Vec<bool>,
    /// Sources forced to ship their floor with a non-positive dual.
    pub forced_slack: Vec<bool>,
    /// Inherited upper bound on the subtree.
    pub bound: f64,
    pub depth: u32,
    pub id: u64,
}

struct HeapEntry(BnbNode);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0.bound == other.0.bound && self.0.id == other.0.id
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Larger bound first; older node on ties, for determinism.
        self.0
            .bound
            .partial_cmp(&other.0.bound)
            .expect("node bounds are never NaN")
            .then(other.0.id.cmp(&self.0.id))
    }
}

enum Pool {
    Best(BinaryHeap<HeapEntry>),
    Dfs(Vec<BnbNode>),
}

impl Pool {
    fn new(order: NodeOrder) -> Self {
        match order {
            NodeOrder::BestBound => Pool::Best(BinaryHeap::new()),
            NodeOrder::DepthFirst => Pool::Dfs(Vec::new()),
        }
    }

    fn push(&mut self, node: BnbNode) {
        match self {
            Pool::Best(h) => h.push(HeapEntry(node)),
            Pool::Dfs(v) => v.push(node),
        }
    }

    fn pop(&mut self) -> Option<BnbNode> {
        match self {
            Pool::Best(h) => h.pop().map(|e| e.0),
            Pool::Dfs(v) => v.pop(),
        }
    }

    fn max_bound(&self) -> f64 {
        match self {
            Pool::Best(h) => h.peek().map_or(f64::NEG_INFINITY, |e| e.0.bound),
            Pool::Dfs(v) => v.iter().fold(f64::NEG_INFINITY, |acc, n| acc.max(n.bound)),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            Pool::Best(h) => h.is_empty(),
            Pool::Dfs(v) => v.is_empty(),
        }
    }
}

enum Branch {
    Route(usize),
    Source(usize),
}

/// Computes the worst finite optimal value by branch-and-bound.
///
/// Anytime: with a wall-clock or node budget the result carries the best
/// certified incumbent and a valid global upper bound, flagged as not
/// proven. Without budgets the search runs until the bound meets the
/// incumbent within `config.gap_tol`.
pub fn worst_finite_bnb(
    inst: &Instance,
    config: &WorstFiniteConfig,
) -> Result<WorstFiniteResult, WorstFiniteError> {
    if !weak_feasible_problem(inst) {
        return Err(WorstFiniteError::NotWeaklyFeasible);
    }
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let mn = m * n;
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let mut log: Vec<ConvergenceEntry> = Vec::new();

    let (seed_scenario, seed_solution) = initial_scenario(inst).map_err(|e| match e {
        ValueRangeError::NotWeaklyFeasible => WorstFiniteError::NotWeaklyFeasible,
        ValueRangeError::Numerical(err) => WorstFiniteError::Numerical(err),
        other => WorstFiniteError::Numerical(crate::lp::LpError::NumericalFailure(
            other.to_string(),
        )),
    })?;
    let mut incumbent = Incumbent {
        value: seed_solution.value,
        plan: seed_solution.plan,
        duals: seed_solution.duals,
        scenario: seed_scenario,
    };
    // Probe a few shipped-total levels: the worst scenario often moves
    // strictly less than the maximum, and every probe is a certified
    // incumbent candidate for the cost of one scenario solve.
    for probe in shipped_total_probes(inst) {
        stats.lp_solves += 1;
        if let Ok(sol) = solve_scenario(inst, &probe) {
            if sol.status == LpStatus::Optimal && sol.value > incumbent.value {
                incumbent =
                    Incumbent { value: sol.value, plan: sol.plan, duals: sol.duals, scenario: probe };
            }
        }
    }
    let mut global_bound = f64::INFINITY;

    let mut pool = Pool::new(config.node_order);
    let mut next_id = 0u64;
    pool.push(BnbNode {
        forced_zero: vec![false; mn],
        forced_tight: vec![false; mn],
        forced_uzero: vec![false; m],
        forced_slack: vec![false; m],
        bound: f64::INFINITY,
        depth: 0,
        id: next_id,
    });
    next_id += 1;

    log.push(ConvergenceEntry {
        elapsed_s: start.elapsed().as_secs_f64(),
        incumbent: incumbent.value,
        upper_bound: global_bound,
        nodes_explored: 0,
    });

    let gap_ok =
        |inc: f64, bound: f64| bound - inc <= config.gap_tol * (1.0 + inc.abs());
    let mut budget_hit = false;

    while let Some(node) = pool.pop() {
        let over_time =
            config.time_limit.is_some_and(|limit| start.elapsed() >= limit);
        let over_nodes = config.node_limit.is_some_and(|limit| stats.nodes_explored >= limit);
        if over_time || over_nodes {
            pool.push(node);
            budget_hit = true;
            break;
        }
        if gap_ok(incumbent.value, node.bound) {
            continue;
        }
        stats.nodes_explored += 1;

        // Bound from the primal relaxation.
        let primal = primal_part_lp(inst, &node.forced_zero, &node.forced_slack);
        stats.lp_solves += 1;
        let pout = solve_lp(&primal, Arithmetic::Float)?;
        if pout.status != LpStatus::Optimal {
            shrink_bound(&mut global_bound, &mut log, &pool, &incumbent, &stats, start);
            continue;
        }
        let node_bound = pout.value.min(node.bound);
        if gap_ok(incumbent.value, node_bound) {
            shrink_bound(&mut global_bound, &mut log, &pool, &incumbent, &stats, start);
            continue;
        }
        let x = &pout.primal[..mn];
        let plan = TransportPlan::from_flat(m, n, x.to_vec());

        // Multipliers for the pattern so far, nudged toward certifying x.
        let mut hint_routes = vec![false; mn];
        for k in 0..mn {
            hint_routes[k] = x[k] > tol::COMP && !node.forced_zero[k];
        }
        let mut hint_sources = vec![false; m];
        if inst.mode() == Mode::SupplyLeq {
            for i in 0..m {
                let floor = inst.supply(i).lo;
                hint_sources[i] = !node.forced_uzero[i]
                    && !node.forced_slack[i]
                    && plan.row_sum(i) < floor - tol::COMP * (1.0 + floor.abs());
            }
        }
        let dual = dual_part_lp(
            inst,
            &node.forced_tight,
            &node.forced_uzero,
            Some((&hint_routes, &hint_sources)),
        );
        stats.lp_solves += 1;
        let dout = solve_lp(&dual, Arithmetic::Float)?;
        if dout.status != LpStatus::Optimal {
            // No multipliers match this pattern: no weakly optimal
            // solution lives in the subtree.
            shrink_bound(&mut global_bound, &mut log, &pool, &incumbent, &stats, start);
            continue;
        }
        let u = &dout.primal[..m];
        let v = &dout.primal[m..m + n];

        let violation = most_violated(inst, &node, &plan, u, v);
        match violation {
            None => {
                // The relaxation solution is certified: the node is solved
                // at exactly its bound.
                let cand = Incumbent {
                    value: node_bound,
                    plan,
                    duals: DualPair::new(u.to_vec(), v.to_vec()),
                    scenario: scenario_for_plan(
                        inst,
                        &TransportPlan::from_flat(m, n, x.to_vec()),
                    ),
                };
                try_improve(&mut incumbent, cand, &mut log, &pool, global_bound, &stats, start);
            }
            Some((branch, _)) => {
                // Primal heuristic: the relaxation plan pins a feasible
                // scenario whose exact solution is always certified. A
                // failed heuristic solve is skipped, not fatal.
                let heur_scenario = scenario_for_plan(inst, &plan);
                stats.lp_solves += 1;
                if let Ok(heur) = solve_scenario(inst, &heur_scenario) {
                    if heur.status == LpStatus::Optimal {
                        let cand = Incumbent {
                            value: heur.value,
                            plan: heur.plan,
                            duals: heur.duals,
                            scenario: heur_scenario,
                        };
                        try_improve(
                            &mut incumbent,
                            cand,
                            &mut log,
                            &pool,
                            global_bound,
                            &stats,
                            start,
                        );
                    }
                }
                if gap_ok(incumbent.value, node_bound) {
                    shrink_bound(&mut global_bound, &mut log, &pool, &incumbent, &stats, start);
                    continue;
                }
                let (mut left, mut right) = (node.clone(), node.clone());
                left.bound = node_bound;
                right.bound = node_bound;
                left.depth = node.depth + 1;
                right.depth = node.depth + 1;
                left.id = next_id;
                right.id = next_id + 1;
                next_id += 2;
                match branch {
                    Branch::Route(k) => {
                        left.forced_zero[k] = true;
                        right.forced_tight[k] = true;
                    }
                    Branch::Source(i) => {
                        left.forced_uzero[i] = true;
                        right.forced_slack[i] = true;
                    }
                }
                pool.push(left);
                pool.push(right);
            }
        }
        shrink_bound(&mut global_bound, &mut log, &pool, &incumbent, &stats, start);
    }

    stats.wall_time = start.elapsed();
    let pool_bound = if pool.is_empty() { f64::NEG_INFINITY } else { pool.max_bound() };
    let final_bound = global_bound.min(pool_bound.max(incumbent.value));
    let proven = !budget_hit && pool.is_empty() || gap_ok(incumbent.value, final_bound);
    log.push(ConvergenceEntry {
        elapsed_s: stats.wall_time.as_secs_f64(),
        incumbent: incumbent.value,
        upper_bound: final_bound,
        nodes_explored: stats.nodes_explored,
    });
    Ok(WorstFiniteResult {
        value: incumbent.value,
        upper_bound: final_bound,
        proven_optimal: proven,
        incumbent: Some(incumbent),
        stats,
        log,
    })
}

/// Expensive-cost scenarios at a ladder of shipped totals between the
/// demand floor sum and the transferable maximum.
fn shipped_total_probes(inst: &Instance) -> Vec<crate::model::Scenario> {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let cost: Vec<f64> = (0..m * n).map(|k| inst.cost(k / n, k % n).hi).collect();
    let supplies: Vec<crate::model::Interval> = inst.supplies().to_vec();
    let demands: Vec<crate::model::Interval> = inst.demands().to_vec();
    let g = inst.total_supply_hi().min(inst.total_demand_hi());
    let (lo, hi) = match inst.mode() {
        Mode::SupplyLeq => (inst.total_demand_lo(), g),
        Mode::SupplyEq => (inst.total_supply_lo().max(inst.total_demand_lo()), g),
    };
    let steps = 8;
    let mut out = Vec::new();
    if hi <= lo {
        return out;
    }
    for k in 0..steps {
        let t = lo + (hi - lo) * k as f64 / steps as f64;
        let demand = crate::value_range::fill_to_total(&demands, t);
        let supply_target = match inst.mode() {
            Mode::SupplyLeq => t.max(inst.total_supply_lo()),
            Mode::SupplyEq => t,
        };
        let supply = crate::value_range::fill_to_total(&supplies, supply_target);
        out.push(crate::model::Scenario::from_flat(m, n, cost.clone(), supply, demand));
    }
    out
}

/// The unresolved implication with the largest complementarity violation;
/// ties prefer wider cost intervals, then routes, then smaller indices.
fn most_violated(
    inst: &Instance,
    node: &BnbNode,
    plan: &TransportPlan,
    u: &[f64],
    v: &[f64],
) -> Option<(Branch, f64)> {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let mut best: Option<(Branch, f64, f64)> = None;
    let consider = |branch: Branch, score: f64, width: f64, best: &mut Option<(Branch, f64, f64)>| {
        let replace = match best {
            None => true,
            Some((_, s, w)) => score > *s || (score == *s && width > *w),
        };
        if replace {
            *best = Some((branch, score, width));
        }
    };
    for i in 0..m {
        for j in 0..n {
            let k = i * n + j;
            if node.forced_zero[k] || node.forced_tight[k] {
                continue;
            }
            let x = plan.get(i, j);
            let top = inst.cost(i, j).hi;
            let slack = top - u[i] - v[j];
            if x > tol::COMP && slack > tol::COMP * (1.0 + top.abs()) {
                consider(Branch::Route(k), x * slack, inst.cost(i, j).width(), &mut best);
            }
        }
    }
    if inst.mode() == Mode::SupplyLeq {
        for i in 0..m {
            if node.forced_uzero[i] || node.forced_slack[i] {
                continue;
            }
            let floor = inst.supply(i).lo;
            let short = floor - plan.row_sum(i);
            if short > tol::COMP * (1.0 + floor.abs()) && u[i] < -tol::COMP {
                consider(Branch::Source(i), short * -u[i], inst.supply(i).width(), &mut best);
            }
        }
    }
    best.map(|(branch, score, _)| (branch, score))
}

fn try_improve(
    incumbent: &mut Incumbent,
    cand: Incumbent,
    log: &mut Vec<ConvergenceEntry>,
    pool: &Pool,
    global_bound: f64,
    stats: &SearchStats,
    start: Instant,
) {
    if cand.value > incumbent.value + 1e-12 * (1.0 + incumbent.value.abs()) {
        *incumbent = cand;
        let bound = global_bound.min(pool.max_bound().max(incumbent.value)).max(incumbent.value);
        log.push(ConvergenceEntry {
            elapsed_s: start.elapsed().as_secs_f64(),
            incumbent: incumbent.value,
            upper_bound: bound.min(global_bound),
            nodes_explored: stats.nodes_explored,
        });
    }
}

/// Tightens the running global bound to the best remaining node (or the
/// incumbent when the pool drains) and logs meaningful decreases.
fn shrink_bound(
    global_bound: &mut f64,
    log: &mut Vec<ConvergenceEntry>,
    pool: &Pool,
    incumbent: &Incumbent,
    stats: &SearchStats,
    start: Instant,
) {
    let candidate = pool.max_bound().max(incumbent.value);
    if candidate < *global_bound - 1e-9 * (1.0 + candidate.abs()) {
        *global_bound = candidate;
        log.push(ConvergenceEntry {
            elapsed_s: start.elapsed().as_secs_f64(),
            incumbent: incumbent.value,
            upper_bound: *global_bound,
            nodes_explored: stats.nodes_explored,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Interval;
    use crate::worst_finite::worst_finite_enumerate;

    fn cfg() -> WorstFiniteConfig {
        WorstFiniteConfig::default()
    }

    #[test]
    fn single_route_box() {
        let inst = Instance::new(
            Mode::SupplyLeq,
            vec![vec![Interval::new(3.0, 5.0)]],
            vec![Interval::new(1.0, 2.0)],
            vec![Interval::new(1.0, 2.0)],
        )
        .unwrap();
        let res = worst_finite_bnb(&inst, &cfg()).unwrap();
        assert!(res.proven_optimal);
        assert!((res.value - 10.0).abs() < 1e-6);
        assert!(res.value <= res.upper_bound + 1e-9);
    }

    #[test]
    fn agrees_with_enumeration_small() {
        let inst = Instance::new(
            Mode::SupplyLeq,
            vec![
                vec![Interval::new(1.0, 2.0), Interval::new(2.0, 4.0)],
                vec![Interval::new(3.0, 3.0), Interval::new(1.0, 5.0)],
            ],
            vec![Interval::new(1.0, 3.0), Interval::new(2.0, 2.0)],
            vec![Interval::new(1.0, 2.0), Interval::new(1.0, 3.0)],
        )
        .unwrap();
        let exact = worst_finite_enumerate(&inst, &cfg()).unwrap();
        let searched = worst_finite_bnb(&inst, &cfg()).unwrap();
        assert!(searched.proven_optimal);
        assert!(
            (exact.value - searched.value).abs() <= 1e-6 * (1.0 + exact.value.abs()),
            "enumeration {} vs search {}",
            exact.value,
            searched.value
        );
    }

    #[test]
    fn depth_first_reaches_the_same_value() {
        let inst = Instance::new(
            Mode::SupplyLeq,
            vec![
                vec![Interval::new(1.0, 3.0), Interval::new(2.0, 2.0), Interval::new(4.0, 6.0)],
                vec![Interval::new(2.0, 5.0), Interval::new(1.0, 4.0), Interval::new(3.0, 3.0)],
            ],
            vec![Interval::new(2.0, 4.0), Interval::new(1.0, 5.0)],
            vec![Interval::new(1.0, 2.0), Interval::new(2.0, 3.0), Interval::new(0.0, 2.0)],
        )
        .unwrap();
        let best = worst_finite_bnb(&inst, &cfg()).unwrap();
        let dfs = worst_finite_bnb(
            &inst,
            &WorstFiniteConfig { node_order: NodeOrder::DepthFirst, ..cfg() },
        )
        .unwrap();
        assert!(best.proven_optimal && dfs.proven_optimal);
        assert!((best.value - dfs.value).abs() <= 1e-6 * (1.0 + best.value.abs()));
    }

    #[test]
    fn node_budget_returns_partial_result() {
        let inst = Instance::new(
            Mode::SupplyLeq,
            vec![vec![Interval::new(1.0, 4.0); 5]; 5],
            vec![Interval::new(2.0, 5.0); 5],
            vec![Interval::new(1.0, 4.0); 5],
        )
        .unwrap();
        let res = worst_finite_bnb(
            &inst,
            &WorstFiniteConfig { node_limit: Some(3), ..cfg() },
        )
        .unwrap();
        assert!(res.stats.nodes_explored <= 3);
        assert!(res.value <= res.upper_bound + 1e-9);
        assert!(res.incumbent.is_some(), "the seed incumbent is always available");
    }

    #[test]
    fn anytime_log_is_monotone() {
        let inst = Instance::new(
            Mode::SupplyLeq,
            vec![vec![Interval::new(1.0, 4.0); 4]; 4],
            vec![Interval::new(2.0, 5.0); 4],
            vec![Interval::new(1.0, 4.0); 4],
        )
        .unwrap();
        let res = worst_finite_bnb(&inst, &cfg()).unwrap();
        for pair in res.log.windows(2) {
            assert!(pair[1].incumbent >= pair[0].incumbent - 1e-9);
            assert!(pair[1].upper_bound <= pair[0].upper_bound + 1e-9);
        }
        let last = res.log.last().unwrap();
        assert!(last.incumbent <= last.upper_bound + 1e-9);
    }
}

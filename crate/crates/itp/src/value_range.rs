//! Optimal value range: the best optimal value over all scenarios, the
//! worst (possibly infinite) optimal value, the fixed-RHS worst finite
//! value, and the maximal-volume initial scenario used to seed search.

use crate::lp::{solve_lp, Arithmetic, LpError, LpProblem, LpStatus, Relation, Sense};
use crate::model::{Instance, Mode, Scenario, TransportPlan};
use crate::properties::{strong_feasible_problem, weak_feasible_problem};
use crate::scenario::{solve_scenario_with, ScenarioSolution};
use crate::tol;
use crate::worst_finite::{worst_finite_auto, WorstFiniteConfig, WorstFiniteError};

#[derive(Debug)]
pub enum ValueRangeError {
    /// No scenario is feasible; the value range is empty.
    NotWeaklyFeasible,
    /// The fixed-RHS computation requires degenerate supply and demand.
    RhsNotFixed,
    /// The single scenario of a fixed-RHS instance is itself infeasible.
    InfeasibleScenario,
    Numerical(LpError),
}

impl std::fmt::Display for ValueRangeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValueRangeError::NotWeaklyFeasible => write!(f, "no scenario is feasible"),
            ValueRangeError::RhsNotFixed => {
                write!(f, "supply and demand intervals must be degenerate")
            }
            ValueRangeError::InfeasibleScenario => write!(f, "the fixed scenario is infeasible"),
            ValueRangeError::Numerical(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ValueRangeError {}

impl From<LpError> for ValueRangeError {
    fn from(e: LpError) -> Self {
        ValueRangeError::Numerical(e)
    }
}

/// A value together with the scenario and plan attaining it.
#[derive(Debug, Clone)]
pub struct ValueWitness {
    pub value: f64,
    pub scenario: Scenario,
    pub plan: TransportPlan,
}

/// The optimal value range of an instance.
#[derive(Debug, Clone)]
pub struct ValueRangeReport {
    /// Best optimal value over all scenarios.
    pub best: f64,
    /// Worst optimal value; infinite when some scenario is infeasible.
    pub worst: f64,
    /// Worst optimal value over feasible scenarios only.
    pub worst_finite: Option<f64>,
    /// Whether the worst-finite value was proven exact.
    pub worst_finite_proven: bool,
    pub best_witness: Option<ValueWitness>,
    pub worst_finite_witness: Option<ValueWitness>,
}

/// Best optimal value: the cheapest cost bound minimized over every plan
/// that is feasible for some scenario.
pub fn best_optimal_value(inst: &Instance) -> Result<ValueWitness, ValueRangeError> {
    best_optimal_value_with(inst, Arithmetic::Float)
}

/// [`best_optimal_value`] with an explicit arithmetic backend.
pub fn best_optimal_value_with(
    inst: &Instance,
    arithmetic: Arithmetic,
) -> Result<ValueWitness, ValueRangeError> {
    if !weak_feasible_problem(inst) {
        return Err(ValueRangeError::NotWeaklyFeasible);
    }
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let mut p = LpProblem::new(Sense::Minimize);
    let xs: Vec<usize> = (0..m * n)
        .map(|k| p.add_var(inst.cost(k / n, k % n).lo, 0.0, f64::INFINITY))
        .collect();
    add_weakly_feasible_rows(&mut p, inst, &xs);
    let out = solve_lp(&p, arithmetic)?;
    if out.status != LpStatus::Optimal {
        return Err(LpError::NumericalFailure("weak feasibility region empty against the sum test".into()).into());
    }
    let plan = TransportPlan::from_flat(m, n, out.primal[..m * n].to_vec());
    let scenario = cheapest_witness(inst, &plan);
    Ok(ValueWitness { value: out.value, scenario, plan })
}

/// Rows of the weakly feasible region: shipments under the largest
/// supplies, column sums within the demand intervals.
pub(crate) fn add_weakly_feasible_rows(p: &mut LpProblem, inst: &Instance, xs: &[usize]) {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    for i in 0..m {
        let entries: Vec<(usize, f64)> = (0..n).map(|j| (xs[i * n + j], 1.0)).collect();
        p.add_row(Relation::Le, inst.supply(i).hi, &entries);
        if inst.mode() == Mode::SupplyEq {
            p.add_row(Relation::Ge, inst.supply(i).lo, &entries);
        }
    }
    for j in 0..n {
        let entries: Vec<(usize, f64)> = (0..m).map(|i| (xs[i * n + j], 1.0)).collect();
        p.add_row(Relation::Le, inst.demand(j).hi, &entries);
        p.add_row(Relation::Ge, inst.demand(j).lo, &entries);
    }
}

fn cheapest_witness(inst: &Instance, plan: &TransportPlan) -> Scenario {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let (supply, demand) = crate::properties::witness_rhs(inst, plan);
    let cost: Vec<f64> = (0..m * n).map(|k| inst.cost(k / n, k % n).lo).collect();
    Scenario::from_flat(m, n, cost, supply, demand)
}

/// Worst optimal value: infinite as soon as one scenario is infeasible,
/// otherwise the optimum of the most constrained scenario at the most
/// expensive costs.
pub fn worst_optimal_value(inst: &Instance) -> Result<f64, ValueRangeError> {
    worst_optimal_value_with(inst, Arithmetic::Float)
}

/// [`worst_optimal_value`] with an explicit arithmetic backend.
pub fn worst_optimal_value_with(
    inst: &Instance,
    arithmetic: Arithmetic,
) -> Result<f64, ValueRangeError> {
    if !strong_feasible_problem(inst) {
        return Ok(f64::INFINITY);
    }
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let mut p = LpProblem::new(Sense::Minimize);
    let xs: Vec<usize> = (0..m * n)
        .map(|k| p.add_var(inst.cost(k / n, k % n).hi, 0.0, f64::INFINITY))
        .collect();
    let supply_rel = match inst.mode() {
        Mode::SupplyLeq => Relation::Le,
        Mode::SupplyEq => Relation::Eq,
    };
    for i in 0..m {
        let entries: Vec<(usize, f64)> = (0..n).map(|j| (xs[i * n + j], 1.0)).collect();
        p.add_row(supply_rel, inst.supply(i).lo, &entries);
    }
    for j in 0..n {
        let entries: Vec<(usize, f64)> = (0..m).map(|i| (xs[i * n + j], 1.0)).collect();
        p.add_row(Relation::Eq, inst.demand(j).hi, &entries);
    }
    let out = solve_lp(&p, arithmetic)?;
    if out.status != LpStatus::Optimal {
        return Err(LpError::NumericalFailure(
            "strongly feasible instance yielded no optimum".into(),
        )
        .into());
    }
    Ok(out.value)
}

/// Worst finite optimal value for instances with exact supply and demand:
/// the dual bound at the most expensive costs.
pub fn worst_finite_fixed_rhs(inst: &Instance) -> Result<f64, ValueRangeError> {
    worst_finite_fixed_rhs_with(inst, Arithmetic::Float)
}

/// [`worst_finite_fixed_rhs`] with an explicit arithmetic backend.
pub fn worst_finite_fixed_rhs_with(
    inst: &Instance,
    arithmetic: Arithmetic,
) -> Result<f64, ValueRangeError> {
    if !inst.has_fixed_rhs() {
        return Err(ValueRangeError::RhsNotFixed);
    }
    let feasible = match inst.mode() {
        Mode::SupplyLeq => tol::ge(inst.total_supply_hi(), inst.total_demand_hi()),
        Mode::SupplyEq => tol::eq(inst.total_supply_hi(), inst.total_demand_hi()),
    };
    if !feasible {
        return Err(ValueRangeError::InfeasibleScenario);
    }
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let mut p = LpProblem::new(Sense::Maximize);
    let xs: Vec<usize> = (0..m * n).map(|_| p.add_var(0.0, 0.0, f64::INFINITY)).collect();
    let u_hi = match inst.mode() {
        Mode::SupplyLeq => 0.0,
        Mode::SupplyEq => f64::INFINITY,
    };
    let us: Vec<usize> =
        (0..m).map(|i| p.add_var(inst.supply(i).hi, f64::NEG_INFINITY, u_hi)).collect();
    let vs: Vec<usize> =
        (0..n).map(|j| p.add_var(inst.demand(j).hi, f64::NEG_INFINITY, f64::INFINITY)).collect();
    add_weakly_feasible_rows(&mut p, inst, &xs);
    for i in 0..m {
        for j in 0..n {
            p.add_row(Relation::Le, inst.cost(i, j).hi, &[(us[i], 1.0), (vs[j], 1.0)]);
        }
    }
    let out = solve_lp(&p, arithmetic)?;
    match out.status {
        LpStatus::Optimal => Ok(out.value),
        LpStatus::Infeasible => Err(ValueRangeError::InfeasibleScenario),
        LpStatus::Unbounded => {
            Err(LpError::NumericalFailure("dual bound cannot be unbounded here".into()).into())
        }
    }
}

/// Greedy fill of interval values toward an exact target total: each
/// entry takes as much as its ceiling allows while leaving room for the
/// remaining floors, and never goes below its own floor. The result sums
/// to the target whenever the target lies between the bound sums.
pub(crate) fn fill_to_total(bounds: &[crate::model::Interval], target: f64) -> Vec<f64> {
    let mut floor_rest: f64 = bounds.iter().skip(1).map(|iv| iv.lo).sum();
    let mut out = Vec::with_capacity(bounds.len());
    let mut placed = 0.0;
    for (k, iv) in bounds.iter().enumerate() {
        let v = iv.lo.max(iv.hi.min(target - placed - floor_rest));
        placed += v;
        out.push(v);
        if k + 1 < bounds.len() {
            floor_rest -= bounds[k + 1].lo;
        }
    }
    out
}

/// The scenario shipping the maximal total amount of goods, plus its
/// solution: the seed incumbent for the worst-finite search.
///
/// Demands are filled greedily to their caps until the transferable total
/// is reached, supplies likewise but never below their floors; costs sit
/// at the expensive end.
pub fn initial_scenario(
    inst: &Instance,
) -> Result<(Scenario, ScenarioSolution), ValueRangeError> {
    initial_scenario_with(inst, Arithmetic::Float)
}

/// [`initial_scenario`] with an explicit arithmetic backend.
pub fn initial_scenario_with(
    inst: &Instance,
    arithmetic: Arithmetic,
) -> Result<(Scenario, ScenarioSolution), ValueRangeError> {
    if !weak_feasible_problem(inst) {
        return Err(ValueRangeError::NotWeaklyFeasible);
    }
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let g = inst.total_supply_hi().min(inst.total_demand_hi());

    let demand = fill_to_total(inst.demands(), g);
    let supply = fill_to_total(inst.supplies(), g);

    let cost: Vec<f64> = (0..m * n).map(|k| inst.cost(k / n, k % n).hi).collect();
    let scenario = Scenario::from_flat(m, n, cost, supply, demand);
    let solution = solve_scenario_with(inst, &scenario, arithmetic)?;
    if solution.status != LpStatus::Optimal {
        return Err(LpError::NumericalFailure(
            "constructed initial scenario did not solve".into(),
        )
        .into());
    }
    Ok((scenario, solution))
}

/// Computes the full value range, delegating the worst-finite part to the
/// search engines when some scenario is infeasible.
pub fn value_range_report(
    inst: &Instance,
    config: &WorstFiniteConfig,
) -> Result<ValueRangeReport, WorstFiniteError> {
    let best = match best_optimal_value(inst) {
        Ok(w) => w,
        Err(ValueRangeError::NotWeaklyFeasible) => return Err(WorstFiniteError::NotWeaklyFeasible),
        Err(ValueRangeError::Numerical(e)) => return Err(WorstFiniteError::Numerical(e)),
        Err(e) => {
            return Err(WorstFiniteError::Numerical(LpError::NumericalFailure(e.to_string())))
        }
    };
    let worst = match worst_optimal_value(inst) {
        Ok(v) => v,
        Err(ValueRangeError::Numerical(e)) => return Err(WorstFiniteError::Numerical(e)),
        Err(e) => {
            return Err(WorstFiniteError::Numerical(LpError::NumericalFailure(e.to_string())))
        }
    };
    if worst.is_finite() {
        // Every scenario is feasible, so the worst value is already the
        // worst finite value; reuse the incumbent machinery for a witness.
        let wf = worst_finite_auto(inst, config)?;
        Ok(ValueRangeReport {
            best: best.value,
            worst,
            worst_finite: Some(wf.value),
            worst_finite_proven: wf.proven_optimal,
            best_witness: Some(best),
            worst_finite_witness: wf.witness(),
        })
    } else {
        let wf = worst_finite_auto(inst, config)?;
        Ok(ValueRangeReport {
            best: best.value,
            worst: f64::INFINITY,
            worst_finite: Some(wf.value),
            worst_finite_proven: wf.proven_optimal,
            best_witness: Some(best),
            worst_finite_witness: wf.witness(),
        })
    }
}

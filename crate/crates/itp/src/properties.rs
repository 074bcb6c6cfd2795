//! Decision procedures for weak and strong feasibility and optimality,
//! both of a concrete transport plan and of the interval problem itself.
//!
//! A plan or problem is *weakly* feasible/optimal when some scenario
//! admits it and *strongly* feasible/optimal when every scenario does.
//! Plan-level weak optimality is decided by one linear feasibility solve
//! over a witness scenario; strong optimality with interval costs falls
//! back to an exponential sign enumeration guarded by a cap.

use crate::lp::{solve_lp, Arithmetic, LpError, LpProblem, LpStatus, Relation, Sense};
use crate::model::{DualPair, Instance, Mode, Scenario, TransportPlan};
use crate::tol;

#[derive(Debug)]
pub enum PropertyError {
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
    /// The fixed-cost strong-optimality test requires degenerate cost intervals.
    CostsNotFixed,
    /// The sign enumeration would exceed the configured cap.
    TooManyFreeVariables { count: usize, cap: usize },
    Numerical(LpError),
}

impl std::fmt::Display for PropertyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PropertyError::DimensionMismatch { expected, got } => {
                write!(f, "plan is {}x{}, instance is {}x{}", got.0, got.1, expected.0, expected.1)
            }
            PropertyError::CostsNotFixed => {
                write!(f, "cost intervals are not degenerate; use the general test")
            }
            PropertyError::TooManyFreeVariables { count, cap } => {
                write!(f, "{count} sign-split variables exceed the cap of {cap}")
            }
            PropertyError::Numerical(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PropertyError {}

impl From<LpError> for PropertyError {
    fn from(e: LpError) -> Self {
        PropertyError::Numerical(e)
    }
}

fn check_dims(inst: &Instance, x: &TransportPlan) -> Result<(), PropertyError> {
    let expected = (inst.num_sources(), inst.num_destinations());
    if x.dims() != expected {
        return Err(PropertyError::DimensionMismatch { expected, got: x.dims() });
    }
    Ok(())
}

/// Witness scenario and dual pair certifying weak optimality of a plan.
///
/// The right-hand side is pinned by the plan: demands equal the column
/// sums and supplies cover the row sums from below by their interval
/// floor; costs and duals come from the feasibility solve.
#[derive(Debug, Clone)]
pub struct WeakOptCertificate {
    pub scenario: Scenario,
    pub duals: DualPair,
}

/// Feasible for at least one scenario: shipments fit under the largest
/// supplies and inside the demand intervals.
pub fn weak_feasible_solution(inst: &Instance, x: &TransportPlan) -> Result<bool, PropertyError> {
    check_dims(inst, x)?;
    let (m, n) = x.dims();
    if x.as_flat().iter().any(|&v| !tol::ge(v, 0.0)) {
        return Ok(false);
    }
    for i in 0..m {
        let row = x.row_sum(i);
        let ok = match inst.mode() {
            Mode::SupplyLeq => tol::le(row, inst.supply(i).hi),
            Mode::SupplyEq => tol::ge(row, inst.supply(i).lo) && tol::le(row, inst.supply(i).hi),
        };
        if !ok {
            return Ok(false);
        }
    }
    for j in 0..n {
        let col = x.col_sum(j);
        if !(tol::ge(col, inst.demand(j).lo) && tol::le(col, inst.demand(j).hi)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Feasible for every scenario. Demands must be exact intervals (a plan
/// cannot meet two different demands), shipments must fit under the
/// smallest supplies, and in depletion mode the supplies must be exact
/// intervals as well.
pub fn strong_feasible_solution(inst: &Instance, x: &TransportPlan) -> Result<bool, PropertyError> {
    check_dims(inst, x)?;
    let (m, n) = x.dims();
    if (0..n).any(|j| !inst.demand(j).is_point()) {
        return Ok(false);
    }
    if x.as_flat().iter().any(|&v| !tol::ge(v, 0.0)) {
        return Ok(false);
    }
    for i in 0..m {
        let row = x.row_sum(i);
        let ok = match inst.mode() {
            Mode::SupplyLeq => tol::le(row, inst.supply(i).lo),
            Mode::SupplyEq => inst.supply(i).is_point() && tol::eq(row, inst.supply(i).lo),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok((0..n).all(|j| tol::eq(x.col_sum(j), inst.demand(j).hi)))
}

/// Some scenario has a feasible plan.
pub fn weak_feasible_problem(inst: &Instance) -> bool {
    match inst.mode() {
        Mode::SupplyLeq => tol::ge(inst.total_supply_hi(), inst.total_demand_lo()),
        // Balance must be achievable: the total-supply and total-demand
        // ranges intersect.
        Mode::SupplyEq => {
            tol::le(inst.total_supply_lo(), inst.total_demand_hi())
                && tol::le(inst.total_demand_lo(), inst.total_supply_hi())
        }
    }
}

/// Every scenario has a feasible plan.
pub fn strong_feasible_problem(inst: &Instance) -> bool {
    match inst.mode() {
        Mode::SupplyLeq => tol::ge(inst.total_supply_lo(), inst.total_demand_hi()),
        // Every pairing of supply and demand totals must balance, which
        // pins all four sums to one value.
        Mode::SupplyEq => {
            tol::eq(inst.total_supply_lo(), inst.total_supply_hi())
                && tol::eq(inst.total_demand_lo(), inst.total_demand_hi())
                && tol::eq(inst.total_supply_lo(), inst.total_demand_lo())
        }
    }
}

/// Witness right-hand side for a given plan: demands are the column sums,
/// supplies cover the row sums (raised to the interval floor where needed).
pub(crate) fn witness_rhs(inst: &Instance, x: &TransportPlan) -> (Vec<f64>, Vec<f64>) {
    let (m, n) = x.dims();
    let supply: Vec<f64> = (0..m)
        .map(|i| {
            let row = x.row_sum(i);
            let iv = inst.supply(i);
            match inst.mode() {
                Mode::SupplyLeq => row.max(iv.lo).clamp(iv.lo, iv.hi),
                Mode::SupplyEq => row.clamp(iv.lo, iv.hi),
            }
        })
        .collect();
    let demand: Vec<f64> = (0..n)
        .map(|j| {
            let iv = inst.demand(j);
            x.col_sum(j).clamp(iv.lo, iv.hi)
        })
        .collect();
    (supply, demand)
}

/// Optimal for at least one scenario.
///
/// The plan must be weakly feasible; a single feasibility solve over
/// costs and dual multipliers then looks for a scenario where primal and
/// dual objectives meet. Returns the witnessing certificate.
pub fn weak_optimal_solution(
    inst: &Instance,
    x: &TransportPlan,
) -> Result<Option<WeakOptCertificate>, PropertyError> {
    check_dims(inst, x)?;
    if !weak_feasible_solution(inst, x)? {
        return Ok(None);
    }
    let (m, n) = x.dims();
    let (supply, demand) = witness_rhs(inst, x);

    let mut p = LpProblem::new(Sense::Minimize);
    let u_hi = match inst.mode() {
        Mode::SupplyLeq => 0.0,
        Mode::SupplyEq => f64::INFINITY,
    };
    let us: Vec<usize> = (0..m).map(|_| p.add_var(0.0, f64::NEG_INFINITY, u_hi)).collect();
    let vs: Vec<usize> = (0..n).map(|_| p.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY)).collect();
    let cs: Vec<usize> = (0..m * n)
        .map(|k| {
            let iv = inst.cost(k / n, k % n);
            p.add_var(0.0, iv.lo, iv.hi)
        })
        .collect();

    // Objectives must coincide: sum of c_ij x_ij equals the dual value.
    let mut balance: Vec<(usize, f64)> = Vec::new();
    for k in 0..m * n {
        let xv = x.as_flat()[k];
        if xv != 0.0 {
            balance.push((cs[k], xv));
        }
    }
    for i in 0..m {
        if supply[i] != 0.0 {
            balance.push((us[i], -supply[i]));
        }
    }
    for j in 0..n {
        if demand[j] != 0.0 {
            balance.push((vs[j], -demand[j]));
        }
    }
    p.add_row(Relation::Eq, 0.0, &balance);

    for i in 0..m {
        for j in 0..n {
            p.add_row(Relation::Le, 0.0, &[(us[i], 1.0), (vs[j], 1.0), (cs[i * n + j], -1.0)]);
        }
    }

    let out = solve_lp(&p, Arithmetic::Float)?;
    if out.status != LpStatus::Optimal {
        return Ok(None);
    }
    let cost: Vec<f64> = cs.iter().map(|&k| out.primal[k]).collect();
    let scenario = Scenario::from_flat(m, n, cost, supply, demand);
    let duals = DualPair::new(
        us.iter().map(|&k| out.primal[k]).collect(),
        vs.iter().map(|&k| out.primal[k]).collect(),
    );
    Ok(Some(WeakOptCertificate { scenario, duals }))
}

/// Optimal for every scenario, for instances whose costs are exact.
///
/// The plan must be strongly feasible and match the optimum of the
/// scenario with the largest supplies and demands.
pub fn strong_optimal_solution_fixed_cost(
    inst: &Instance,
    x: &TransportPlan,
) -> Result<bool, PropertyError> {
    check_dims(inst, x)?;
    if !inst.has_fixed_costs() {
        return Err(PropertyError::CostsNotFixed);
    }
    if !strong_feasible_solution(inst, x)? {
        return Ok(false);
    }
    let (m, n) = x.dims();
    let mut p = LpProblem::new(Sense::Minimize);
    let mut obj_x = 0.0;
    let mut xs = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let c = inst.cost(i, j).hi;
            obj_x += c * x.get(i, j);
            xs.push(p.add_var(c, 0.0, f64::INFINITY));
        }
    }
    let supply_rel = match inst.mode() {
        Mode::SupplyLeq => Relation::Le,
        Mode::SupplyEq => Relation::Eq,
    };
    for i in 0..m {
        let entries: Vec<(usize, f64)> = (0..n).map(|j| (xs[i * n + j], 1.0)).collect();
        p.add_row(supply_rel, inst.supply(i).hi, &entries);
    }
    for j in 0..n {
        let entries: Vec<(usize, f64)> = (0..m).map(|i| (xs[i * n + j], 1.0)).collect();
        p.add_row(Relation::Eq, inst.demand(j).hi, &entries);
    }
    let out = solve_lp(&p, Arithmetic::Float)?;
    if out.status != LpStatus::Optimal {
        return Ok(false);
    }
    Ok(tol::opt_eq(obj_x, out.value))
}

/// Default cap on sign-split variables in [`strong_optimal_solution_general`].
pub const DEFAULT_SIGN_SPLIT_CAP: usize = 20;

/// Optimal for every scenario, general interval costs.
pub fn strong_optimal_solution_general(
    inst: &Instance,
    x: &TransportPlan,
) -> Result<bool, PropertyError> {
    strong_optimal_solution_general_with_cap(inst, x, DEFAULT_SIGN_SPLIT_CAP)
}

/// [`strong_optimal_solution_general`] with an explicit enumeration cap.
///
/// Decides whether any scenario admits an improving feasible direction
/// away from the plan. Directions multiply interval costs, so the search
/// enumerates sign patterns of the direction entries whose cost interval
/// has positive width, solving one feasibility program per pattern with
/// the most favorable cost bound on each side.
pub fn strong_optimal_solution_general_with_cap(
    inst: &Instance,
    x: &TransportPlan,
    cap: usize,
) -> Result<bool, PropertyError> {
    check_dims(inst, x)?;
    if !strong_feasible_solution(inst, x)? {
        return Ok(false);
    }
    let (m, n) = x.dims();

    // Active sets: sources shipping at their supply ceiling, routes at zero.
    let tight_supply: Vec<bool> = (0..m)
        .map(|i| {
            let s = inst.supply(i).hi;
            (x.row_sum(i) - s).abs() <= tol::ACTIVE * (1.0 + s.abs())
        })
        .collect();
    let zero_route: Vec<bool> = x.as_flat().iter().map(|v| v.abs() <= tol::ACTIVE).collect();

    // Entries needing a sign split: direction not pinned non-negative and
    // a cost interval wide enough that the bound choice matters.
    let mut split: Vec<(usize, f64)> = (0..m * n)
        .filter(|&k| !zero_route[k] && inst.cost(k / n, k % n).width() > 0.0)
        .map(|k| (k, inst.cost(k / n, k % n).width()))
        .collect();
    if split.len() > cap {
        return Err(PropertyError::TooManyFreeVariables { count: split.len(), cap });
    }
    split.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

    for pattern in 0u64..(1u64 << split.len()) {
        let mut neg = vec![false; m * n];
        for (bit, (k, _)) in split.iter().enumerate() {
            if pattern >> bit & 1 == 1 {
                neg[*k] = true;
            }
        }
        let mut p = LpProblem::new(Sense::Minimize);
        let mut dirs = Vec::with_capacity(m * n);
        let mut obj_row: Vec<(usize, f64)> = Vec::with_capacity(m * n);
        for k in 0..m * n {
            let iv = inst.cost(k / n, k % n);
            let (lo, hi, coef) = if zero_route[k] {
                (0.0, f64::INFINITY, iv.lo)
            } else if iv.width() == 0.0 {
                (f64::NEG_INFINITY, f64::INFINITY, iv.lo)
            } else if neg[k] {
                (f64::NEG_INFINITY, 0.0, iv.hi)
            } else {
                (0.0, f64::INFINITY, iv.lo)
            };
            let var = p.add_var(0.0, lo, hi);
            dirs.push(var);
            if coef != 0.0 {
                obj_row.push((var, coef));
            }
        }
        // A strictly improving direction, normalized.
        p.add_row(Relation::Le, -1.0, &obj_row);
        for j in 0..n {
            let entries: Vec<(usize, f64)> = (0..m).map(|i| (dirs[i * n + j], 1.0)).collect();
            p.add_row(Relation::Eq, 0.0, &entries);
        }
        match inst.mode() {
            Mode::SupplyLeq => {
                for i in 0..m {
                    if tight_supply[i] {
                        let entries: Vec<(usize, f64)> =
                            (0..n).map(|j| (dirs[i * n + j], 1.0)).collect();
                        p.add_row(Relation::Le, 0.0, &entries);
                    }
                }
            }
            Mode::SupplyEq => {
                for i in 0..m {
                    let entries: Vec<(usize, f64)> =
                        (0..n).map(|j| (dirs[i * n + j], 1.0)).collect();
                    p.add_row(Relation::Eq, 0.0, &entries);
                }
            }
        }
        let out = solve_lp(&p, Arithmetic::Float)?;
        if out.status == LpStatus::Optimal {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Some scenario has an optimal plan; with non-negative costs this is
/// exactly weak feasibility.
pub fn weak_optimal_problem(inst: &Instance) -> bool {
    weak_feasible_problem(inst)
}

/// Every scenario has an optimal plan; reduces to strong feasibility.
pub fn strong_optimal_problem(inst: &Instance) -> bool {
    strong_feasible_problem(inst)
}

//! Solving one scenario of an instance: the classical transportation
//! linear program, returning plan, duals and a certified status.

use crate::lp::{solve_lp, Arithmetic, LpError, LpProblem, LpStatus, Relation, Sense};
use crate::model::{DualPair, Instance, Mode, Scenario, TransportPlan};
use crate::tol;

/// Primal plan, dual pair and optimal value for one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioSolution {
    pub status: LpStatus,
    pub plan: TransportPlan,
    pub duals: DualPair,
    pub value: f64,
}

impl ScenarioSolution {
    /// Equality of primal and dual objectives at the scenario, the
    /// certificate that `plan` is optimal.
    pub fn duality_gap(&self, sc: &Scenario) -> f64 {
        let primal = self.plan.cost_under(sc);
        let dual = self.duals.objective(sc);
        (primal - dual).abs() / (1.0 + primal.abs())
    }
}

/// Builds the transportation program for a concrete scenario: supply rows
/// per source, demand equalities per destination, non-negative shipments.
pub(crate) fn scenario_lp(inst: &Instance, sc: &Scenario) -> LpProblem {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let mut p = LpProblem::new(Sense::Minimize);
    let mut xs = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            xs.push(p.add_var(sc.cost(i, j), 0.0, f64::INFINITY));
        }
    }
    let supply_rel = match inst.mode() {
        Mode::SupplyLeq => Relation::Le,
        Mode::SupplyEq => Relation::Eq,
    };
    for i in 0..m {
        let entries: Vec<(usize, f64)> = (0..n).map(|j| (xs[i * n + j], 1.0)).collect();
        p.add_row(supply_rel, sc.supply[i], &entries);
    }
    for j in 0..n {
        let entries: Vec<(usize, f64)> = (0..m).map(|i| (xs[i * n + j], 1.0)).collect();
        p.add_row(Relation::Eq, sc.demand[j], &entries);
    }
    p
}

/// Solves the scenario's transportation program.
///
/// Returns `Optimal` with a plan/dual pair certified by equal objectives,
/// or `Infeasible` exactly when total supply cannot cover total demand.
pub fn solve_scenario(inst: &Instance, sc: &Scenario) -> Result<ScenarioSolution, LpError> {
    solve_scenario_with(inst, sc, Arithmetic::Float)
}

/// [`solve_scenario`] with an explicit arithmetic backend.
pub fn solve_scenario_with(
    inst: &Instance,
    sc: &Scenario,
    arithmetic: Arithmetic,
) -> Result<ScenarioSolution, LpError> {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let p = scenario_lp(inst, sc);
    let out = solve_lp(&p, arithmetic)?;
    match out.status {
        LpStatus::Optimal => {
            let plan = TransportPlan::from_flat(m, n, out.primal[..m * n].to_vec());
            let u = out.duals[..m].to_vec();
            let v = out.duals[m..m + n].to_vec();
            Ok(ScenarioSolution {
                status: LpStatus::Optimal,
                plan,
                duals: DualPair::new(u, v),
                value: out.value,
            })
        }
        LpStatus::Infeasible => Ok(ScenarioSolution {
            status: LpStatus::Infeasible,
            plan: TransportPlan::from_flat(m, n, vec![0.0; m * n]),
            duals: DualPair::new(vec![0.0; m], vec![0.0; n]),
            value: f64::INFINITY,
        }),
        LpStatus::Unbounded => Err(LpError::NumericalFailure(
            "transportation program cannot be unbounded".into(),
        )),
    }
}

/// Complementary-slackness residual of a solution at a scenario: positive
/// shipments must price tight, slack supply rows must price at zero.
pub fn complementarity_violation(
    inst: &Instance,
    sc: &Scenario,
    sol: &ScenarioSolution,
) -> f64 {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..n {
            let x = sol.plan.get(i, j);
            if x > tol::COMP {
                worst = worst.max((sol.duals.u[i] + sol.duals.v[j] - sc.cost(i, j)).abs());
            }
        }
    }
    if inst.mode() == Mode::SupplyLeq {
        for i in 0..m {
            if sol.plan.row_sum(i) < sc.supply[i] - tol::COMP * (1.0 + sc.supply[i].abs()) {
                worst = worst.max(sol.duals.u[i].abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Interval;

    fn inst_2x1() -> Instance {
        Instance::new(
            Mode::SupplyLeq,
            vec![vec![Interval::point(1.0)], vec![Interval::point(3.0)]],
            vec![Interval::new(1.0, 2.0), Interval::new(1.0, 2.0)],
            vec![Interval::new(2.0, 3.0)],
        )
        .unwrap()
    }

    #[test]
    fn two_sources_one_sink() {
        let inst = inst_2x1();
        let sc = Scenario::new(vec![vec![1.0], vec![3.0]], vec![1.0, 2.0], vec![3.0]);
        let sol = solve_scenario(&inst, &sc).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 7.0).abs() < 1e-9);
        assert!((sol.plan.get(0, 0) - 1.0).abs() < 1e-9);
        assert!((sol.plan.get(1, 0) - 2.0).abs() < 1e-9);
        assert!(sol.duals.is_feasible_for(&sc, Mode::SupplyLeq));
        assert!(sol.duality_gap(&sc) < 1e-9);
        assert!(complementarity_violation(&inst, &sc, &sol) < 1e-7);
    }

    #[test]
    fn single_route() {
        let inst = Instance::new(
            Mode::SupplyLeq,
            vec![vec![Interval::point(5.0)]],
            vec![Interval::point(2.0)],
            vec![Interval::point(2.0)],
        )
        .unwrap();
        let sc = Scenario::new(vec![vec![5.0]], vec![2.0], vec![2.0]);
        let sol = solve_scenario(&inst, &sc).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 10.0).abs() < 1e-9);
        assert!((sol.plan.get(0, 0) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn short_supply_is_infeasible() {
        let inst = Instance::new(
            Mode::SupplyLeq,
            vec![vec![Interval::point(5.0)]],
            vec![Interval::new(1.0, 2.0)],
            vec![Interval::point(2.0)],
        )
        .unwrap();
        let sc = Scenario::new(vec![vec![5.0]], vec![1.0], vec![2.0]);
        let sol = solve_scenario(&inst, &sc).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(!inst.scenario_feasibility_condition(&sc));
    }

    #[test]
    fn equality_mode_uses_free_supply_duals() {
        let inst = Instance::new(
            Mode::SupplyEq,
            vec![vec![Interval::point(2.0), Interval::point(1.0)]],
            vec![Interval::point(3.0)],
            vec![Interval::new(1.0, 2.0), Interval::new(1.0, 2.0)],
        )
        .unwrap();
        let sc = Scenario::new(vec![vec![2.0, 1.0]], vec![3.0], vec![1.0, 2.0]);
        let sol = solve_scenario(&inst, &sc).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 4.0).abs() < 1e-9);
        assert!(sol.duality_gap(&sc) < 1e-9);
    }
}

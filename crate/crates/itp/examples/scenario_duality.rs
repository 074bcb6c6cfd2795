//! Solve one scenario of an interval instance and inspect the optimal
//! plan, the dual multipliers and the equal-objectives certificate.

use itp::{solve_scenario, Instance, Interval, Mode, Scenario};

fn main() {
    // Two sources feeding one destination; the cheap source is scarce.
    let inst = Instance::new(
        Mode::SupplyLeq,
        vec![vec![Interval::new(1.0, 2.0)], vec![Interval::new(3.0, 4.0)]],
        vec![Interval::new(1.0, 2.0), Interval::new(1.0, 2.0)],
        vec![Interval::new(2.0, 3.0)],
    )
    .unwrap();

    let scenario = Scenario::new(vec![vec![1.0], vec![3.0]], vec![1.0, 2.0], vec![3.0]);
    assert!(inst.contains_scenario(&scenario).unwrap());

    let sol = solve_scenario(&inst, &scenario).unwrap();
    println!("status: {:?}", sol.status);
    println!("optimal value: {}", sol.value);
    for i in 0..2 {
        println!("ship {} from source {} (u_{} = {})", sol.plan.get(i, 0), i, i, sol.duals.u[i]);
    }
    println!("destination dual v_0 = {}", sol.duals.v[0]);

    // The dual objective at the scenario matches the primal cost: the
    // certificate that the plan is optimal.
    println!("primal objective: {}", sol.plan.cost_under(&scenario));
    println!("dual objective:   {}", sol.duals.objective(&scenario));
    println!("duality gap:      {:.3e}", sol.duality_gap(&scenario));
}

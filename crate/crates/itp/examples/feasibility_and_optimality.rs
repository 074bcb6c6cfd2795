//! Check weak and strong feasibility and optimality of transport plans
//! and of the interval problem itself.

use itp::properties::{
    strong_feasible_problem, strong_feasible_solution, strong_optimal_solution_general,
    weak_feasible_problem, weak_feasible_solution, weak_optimal_solution,
};
use itp::{solve_scenario, Instance, Interval, Mode, TransportPlan};

fn main() {
    let inst = Instance::new(
        Mode::SupplyLeq,
        vec![
            vec![Interval::new(1.0, 2.0), Interval::new(4.0, 5.0)],
            vec![Interval::new(3.0, 3.0), Interval::new(2.0, 4.0)],
        ],
        vec![Interval::new(2.0, 4.0), Interval::new(3.0, 3.0)],
        vec![Interval::new(2.0, 3.0), Interval::new(1.0, 2.0)],
    )
    .unwrap();

    println!("problem weakly feasible:   {}", weak_feasible_problem(&inst));
    println!("problem strongly feasible: {}", strong_feasible_problem(&inst));

    let plan = TransportPlan::new(vec![vec![2.0, 0.0], vec![0.0, 1.0]]);
    println!("\nplan ships 2 on the cheap route, 1 on the diagonal:");
    println!("weakly feasible:  {}", weak_feasible_solution(&inst, &plan).unwrap());
    println!("strongly feasible: {}", strong_feasible_solution(&inst, &plan).unwrap());

    match weak_optimal_solution(&inst, &plan).unwrap() {
        Some(cert) => {
            println!("weakly optimal: true");
            println!("  witness costs row 0: {:?}", [cert.scenario.cost(0, 0), cert.scenario.cost(0, 1)]);
            println!("  witness supply: {:?}", cert.scenario.supply);
            println!("  witness demand: {:?}", cert.scenario.demand);
            // The certificate survives an independent re-solve.
            let check = solve_scenario(&inst, &cert.scenario).unwrap();
            println!("  re-solved optimum: {} (= plan cost {})", check.value, plan.cost_under(&cert.scenario));
        }
        None => println!("weakly optimal: false"),
    }

    // Strong optimality needs a strongly feasible plan first; demands
    // here are intervals, so no plan qualifies.
    println!("strongly optimal: {}", strong_optimal_solution_general(&inst, &plan).unwrap());
}

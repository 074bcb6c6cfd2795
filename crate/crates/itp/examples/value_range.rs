//! Compute the optimal value range of an interval instance: the best
//! optimal value, the worst (possibly infinite) optimal value, and the
//! worst value over feasible scenarios only.

use itp::value_range::{
    best_optimal_value, initial_scenario, value_range_report, worst_optimal_value,
};
use itp::worst_finite::WorstFiniteConfig;
use itp::{Instance, Interval, Mode};

fn main() {
    let inst = Instance::new(
        Mode::SupplyLeq,
        vec![
            vec![Interval::new(2.0, 3.0), Interval::new(5.0, 6.0)],
            vec![Interval::new(4.0, 7.0), Interval::new(1.0, 2.0)],
        ],
        vec![Interval::new(2.0, 5.0), Interval::new(1.0, 4.0)],
        vec![Interval::new(2.0, 4.0), Interval::new(2.0, 3.0)],
    )
    .unwrap();

    let best = best_optimal_value(&inst).unwrap();
    println!("best optimal value: {}", best.value);
    println!("  attained with demand {:?}", best.scenario.demand);

    let worst = worst_optimal_value(&inst).unwrap();
    println!("worst optimal value: {worst}");
    if worst.is_infinite() {
        println!("  (some scenario cannot meet its demand at all)");
    }

    // The full report falls back to the search engines for the worst
    // finite value whenever the plain worst value is infinite.
    let report = value_range_report(&inst, &WorstFiniteConfig::default()).unwrap();
    println!(
        "worst finite value: {} (proven: {})",
        report.worst_finite.unwrap(),
        report.worst_finite_proven
    );
    if let Some(w) = &report.worst_finite_witness {
        println!("  worst scenario ships {} units", w.plan.total());
    }

    // The seed scenario moves as many goods as the boxes allow.
    let (scenario, solution) = initial_scenario(&inst).unwrap();
    println!("initial scenario demand: {:?} (total {})", scenario.demand, scenario.total_demand());
    println!("initial incumbent value: {}", solution.value);
}

//! Compute the worst finite optimal value with both engines and inspect
//! the convergence log and the transportation paradox flag.

use itp::generate::{generate_instance, GenParams};
use itp::worst_finite::{
    extract_worst_scenario, worst_finite_bnb, worst_finite_enumerate, WorstFiniteConfig,
};
use itp::{solve_scenario, Instance, Interval, Mode};

fn main() {
    // Tiny instance: both engines agree and the enumeration is exact.
    let tiny = Instance::new(
        Mode::SupplyLeq,
        vec![vec![Interval::new(1.0, 2.0)], vec![Interval::new(3.0, 3.0)]],
        vec![Interval::new(1.0, 2.0), Interval::new(1.0, 2.0)],
        vec![Interval::new(2.0, 3.0)],
    )
    .unwrap();
    let config = WorstFiniteConfig::default();

    let exact = worst_finite_enumerate(&tiny, &config).unwrap();
    let searched = worst_finite_bnb(&tiny, &config).unwrap();
    println!("enumeration: {} over {} patterns", exact.value, exact.stats.nodes_explored);
    println!("search:      {} over {} nodes", searched.value, searched.stats.nodes_explored);

    // The worst scenario is reconstructible and re-solves to the value.
    let scenario = extract_worst_scenario(&tiny, &searched).unwrap();
    let check = solve_scenario(&tiny, &scenario).unwrap();
    println!("re-solved worst scenario: {}", check.value);

    // A larger generated instance: branch-and-bound with a time limit.
    let inst = generate_instance(6, 6, 11, &GenParams::default()).unwrap();
    let budgeted = WorstFiniteConfig {
        time_limit: Some(std::time::Duration::from_secs(10)),
        ..WorstFiniteConfig::default()
    };
    let res = worst_finite_bnb(&inst, &budgeted).unwrap();
    println!(
        "\n6x6 instance: value {} (proven: {}), {} nodes, {} LP solves, {:.3}s",
        res.value,
        res.proven_optimal,
        res.stats.nodes_explored,
        res.stats.lp_solves,
        res.stats.wall_time.as_secs_f64()
    );
    if res.is_paradoxical(&inst) {
        println!(
            "transportation paradox: worst scenario ships {} of {} possible",
            res.shipped_total().unwrap(),
            inst.total_demand_hi()
        );
    }
    println!("\nconvergence log (incumbent, bound over time):");
    for e in &res.log {
        println!("  {:>8.4}s  incumbent {:>10.2}  bound {:>12.2}  nodes {}", e.elapsed_s, e.incumbent, e.upper_bound, e.nodes_explored);
    }
}

//! Generate benchmark-style instances and round-trip them through the
//! JSON instance format.

use itp::generate::{generate_instance, GenParams};
use itp::io::{instance_to_string, parse_instance_str};

fn main() {
    let params = GenParams::default();
    let inst = generate_instance(3, 5, 42, &params).unwrap();

    println!("generated {}:", inst.name().unwrap());
    for i in 0..3 {
        println!("  supply {i}: [{}, {}]", inst.supply(i).lo, inst.supply(i).hi);
    }
    for j in 0..5 {
        println!("  demand {j}: [{}, {}]", inst.demand(j).lo, inst.demand(j).hi);
    }
    println!("  total supply ceiling: {}", inst.total_supply_hi());
    println!("  total demand ceiling: {}", inst.total_demand_hi());

    // Ceilings sit at twice the floors and the totals match exactly.
    assert_eq!(inst.total_supply_hi(), inst.total_demand_hi());
    assert_eq!(inst.supply(0).hi, 2.0 * inst.supply(0).lo);

    let text = instance_to_string(&inst);
    let back = parse_instance_str(&text, "roundtrip").unwrap();
    assert_eq!(inst, back);
    println!("\nround-trip through JSON preserved all bounds; first lines:");
    for line in text.lines().take(6) {
        println!("  {line}");
    }

    // Exact supply and demand instead of doubled ceilings.
    let fixed = generate_instance(3, 5, 42, &GenParams { doubling: false, ..params }).unwrap();
    println!("\nfixed-rhs variant has degenerate intervals: {}", fixed.has_fixed_rhs());
}

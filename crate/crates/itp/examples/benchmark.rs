//! Run a small benchmark over generated instances and print the report
//! table plus the CSV that would be written to disk.

use std::time::Duration;

use itp::bench::{run_benchmark, BenchConfig, Method};
use itp::generate::{generate_instance, GenParams};

fn main() {
    let instances: Vec<_> = (0..4)
        .map(|k| generate_instance(2 + k % 2, 3, 100 + k as u64, &GenParams::default()).unwrap())
        .collect();

    let config = BenchConfig {
        method: Method::Auto,
        time_limit: Duration::from_secs(60),
        ..BenchConfig::default()
    };
    let report = run_benchmark(&instances, &config);

    print!("{}", report.to_table());
    println!();
    println!("csv form:");
    print!("{}", report.to_csv());
}

//! Random instance generation.
//!
//! [`generate_instance`] reproduces the benchmark family structure:
//! integer data, supply and demand ceilings at twice their floors, and
//! total supply ceiling equal to total demand ceiling. [`sample_instance`]
//! is a looser sampler for randomized testing: mixed interval widths
//! including degenerate ones, both constraint modes, and dyadic values so
//! that sum comparisons are exact in double precision.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::model::{Instance, Interval, Mode};
use crate::properties::weak_feasible_problem;

#[derive(Debug, Clone, PartialEq)]
pub enum GenError {
    InvalidParams(String),
}

impl std::fmt::Display for GenError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GenError::InvalidParams(msg) => write!(f, "invalid generator parameters: {msg}"),
        }
    }
}

impl std::error::Error for GenError {}

/// Knobs of the benchmark-style generator. Ranges are inclusive integer
/// bounds.
#[derive(Debug, Clone)]
pub struct GenParams {
    pub cost_lo_range: (u32, u32),
    pub cost_width_range: (u32, u32),
    pub supply_lo_range: (u32, u32),
    pub demand_lo_range: (u32, u32),
    /// Ceilings at twice the floors; otherwise supply and demand are exact.
    pub doubling: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            cost_lo_range: (5, 25),
            cost_width_range: (0, 10),
            supply_lo_range: (10, 50),
            demand_lo_range: (10, 50),
            doubling: true,
        }
    }
}

/// Deterministically generates one instance.
///
/// With `doubling` set, supply and demand ceilings are exactly twice the
/// floors and the demand floors are rebalanced so the total ceilings
/// coincide; without it, supply and demand are exact and their totals
/// coincide. Costs are integer intervals.
pub fn generate_instance(
    m: usize,
    n: usize,
    seed: u64,
    params: &GenParams,
) -> Result<Instance, GenError> {
    if m == 0 || n == 0 {
        return Err(GenError::InvalidParams("dimensions must be positive".into()));
    }
    for (name, (lo, hi)) in [
        ("cost_lo_range", params.cost_lo_range),
        ("cost_width_range", params.cost_width_range),
        ("supply_lo_range", params.supply_lo_range),
        ("demand_lo_range", params.demand_lo_range),
    ] {
        if lo > hi {
            return Err(GenError::InvalidParams(format!("{name} is reversed")));
        }
    }
    if params.supply_lo_range.0 == 0 {
        return Err(GenError::InvalidParams("supply floors must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let supply_lo: Vec<u64> = (0..m)
        .map(|_| rng.gen_range(params.supply_lo_range.0..=params.supply_lo_range.1) as u64)
        .collect();
    // Demand floors are drawn, then rebalanced so the total ceilings
    // coincide; with doubled ceilings on both sides this reduces to equal
    // floor totals, and without doubling to equal totals outright.
    let target_demand_lo: u64 = supply_lo.iter().sum();
    if target_demand_lo < n as u64 {
        return Err(GenError::InvalidParams(format!(
            "total supply floor {target_demand_lo} cannot cover one unit per destination"
        )));
    }
    let raw: Vec<u64> = (0..n)
        .map(|_| rng.gen_range(params.demand_lo_range.0.max(1)..=params.demand_lo_range.1.max(1)) as u64)
        .collect();
    let raw_sum: u64 = raw.iter().sum();
    let mut demand_lo: Vec<i64> = raw
        .iter()
        .map(|r| (((*r as u128) * (target_demand_lo as u128)) / raw_sum as u128).max(1) as i64)
        .collect();
    let mut diff: i64 = target_demand_lo as i64 - demand_lo.iter().sum::<i64>();
    // Settle the rounding remainder one unit at a time, never below 1.
    let mut j = 0usize;
    while diff != 0 {
        if diff > 0 {
            demand_lo[j % n] += 1;
            diff -= 1;
        } else if demand_lo[j % n] > 1 {
            demand_lo[j % n] -= 1;
            diff += 1;
        }
        j += 1;
    }

    let (supply, demand): (Vec<Interval>, Vec<Interval>) = if params.doubling {
        (
            supply_lo.iter().map(|&s| Interval::new(s as f64, 2.0 * s as f64)).collect(),
            demand_lo.iter().map(|&d| Interval::new(d as f64, 2.0 * d as f64)).collect(),
        )
    } else {
        (
            supply_lo.iter().map(|&s| Interval::point(s as f64)).collect(),
            demand_lo.iter().map(|&d| Interval::point(d as f64)).collect(),
        )
    };

    let cost: Vec<Vec<Interval>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let lo = rng.gen_range(params.cost_lo_range.0..=params.cost_lo_range.1) as f64;
                    let w =
                        rng.gen_range(params.cost_width_range.0..=params.cost_width_range.1) as f64;
                    Interval::new(lo, lo + w)
                })
                .collect()
        })
        .collect();

    let inst = Instance::new(Mode::SupplyLeq, cost, supply, demand)
        .expect("generated data is valid by construction")
        .with_name(format!("gen-{m}x{n}-s{seed}"));
    Ok(inst)
}

/// Shape of randomly sampled test instances.
#[derive(Debug, Clone)]
pub struct SampleConfig {
    pub m: usize,
    pub n: usize,
    pub mode: Mode,
    /// Largest cost bound, in quarter units.
    pub max_cost_quarters: u32,
    /// Largest supply/demand bound, in quarter units.
    pub max_rhs_quarters: u32,
    /// Probability that an interval collapses to a point.
    pub degenerate_prob: f64,
    /// Keep sampling until some scenario is feasible.
    pub ensure_weakly_feasible: bool,
}

impl SampleConfig {
    pub fn new(m: usize, n: usize, mode: Mode) -> Self {
        SampleConfig {
            m,
            n,
            mode,
            max_cost_quarters: 40,
            max_rhs_quarters: 32,
            degenerate_prob: 0.25,
            ensure_weakly_feasible: true,
        }
    }
}

/// Samples an instance with dyadic interval bounds (quarter units), mixed
/// widths including degenerate intervals, in either mode.
pub fn sample_instance(rng: &mut impl Rng, cfg: &SampleConfig) -> Instance {
    loop {
        let iv = |rng: &mut dyn rand::RngCore, max: u32| {
            let lo = rng.gen_range(0..=max) as f64 / 4.0;
            let w = if rng.gen_bool(cfg.degenerate_prob) {
                0.0
            } else {
                rng.gen_range(0..=max / 2) as f64 / 4.0
            };
            Interval::new(lo, lo + w)
        };
        let cost: Vec<Vec<Interval>> = (0..cfg.m)
            .map(|_| (0..cfg.n).map(|_| iv(rng, cfg.max_cost_quarters)).collect())
            .collect();
        let supply: Vec<Interval> =
            (0..cfg.m).map(|_| iv(rng, cfg.max_rhs_quarters)).collect();
        // Demand floors are drawn from the lower half so feasible
        // instances are common; point intervals stay points.
        let demand: Vec<Interval> =
            (0..cfg.n).map(|_| iv(rng, cfg.max_rhs_quarters / 2)).collect();
        let inst = Instance::new(cfg.mode, cost, supply, demand).expect("sampled data is valid");
        if !cfg.ensure_weakly_feasible || weak_feasible_problem(&inst) {
            return inst;
        }
    }
}

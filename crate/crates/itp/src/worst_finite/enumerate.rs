//! Exhaustive pattern enumeration in exact rational arithmetic.
//!
//! Every route either ships nothing or prices tight, and every source
//! either has a zero dual or ships at least its floor. Enumerating all
//! such patterns decomposes the weakly optimal solution set into
//! polyhedra; maximizing the expensive-cost objective over each and
//! taking the largest finite optimum yields the worst finite value
//! beyond numerical doubt.

use std::time::Instant;

use num_rational::BigRational;

use crate::lp::{solve_generic, LpStatus, Scalar};
use crate::model::{DualPair, Instance, Mode, TransportPlan};
use crate::properties::weak_feasible_problem;

use super::{
    pattern_bits, primal_part_lp, scenario_for_plan, ComplementarityPattern, ConvergenceEntry,
    Incumbent, SearchStats, WorstFiniteConfig, WorstFiniteError, WorstFiniteResult,
};

/// Computes the worst finite optimal value by exhaustive enumeration.
///
/// Exact: all pattern programs are solved in rational arithmetic and the
/// running maximum is compared without rounding. Guarded by
/// `config.enumerate_cap` on the number of pattern bits.
pub fn worst_finite_enumerate(
    inst: &Instance,
    config: &WorstFiniteConfig,
) -> Result<WorstFiniteResult, WorstFiniteError> {
    if !weak_feasible_problem(inst) {
        return Err(WorstFiniteError::NotWeaklyFeasible);
    }
    let bits = pattern_bits(inst);
    if bits > config.enumerate_cap {
        return Err(WorstFiniteError::InstanceTooLarge { bits, cap: config.enumerate_cap });
    }

    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let mn = m * n;
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let mut log: Vec<ConvergenceEntry> = Vec::new();

    // Exact running maximum: value, plan, and the dual pair of the
    // pattern attaining it.
    struct BestPattern {
        value: BigRational,
        x: Vec<BigRational>,
        u: Vec<BigRational>,
        v: Vec<BigRational>,
    }
    let mut best: Option<BestPattern> = None;

    let source_masks: u64 = match inst.mode() {
        Mode::SupplyLeq => 1u64 << m,
        Mode::SupplyEq => 1,
    };
    let mut pattern = ComplementarityPattern {
        zero_routes: vec![false; mn],
        slack_sources: vec![false; m],
    };
    let mut tight_routes = vec![true; mn];
    let mut zero_dual_sources = vec![true; m];

    for l_mask in 0..source_masks {
        for (i, flag) in pattern.slack_sources.iter_mut().enumerate() {
            *flag = l_mask >> i & 1 == 1;
        }
        for i in 0..m {
            zero_dual_sources[i] = !pattern.slack_sources[i];
        }
        'patterns: for k_mask in 0..(1u64 << mn) {
            for (k, flag) in pattern.zero_routes.iter_mut().enumerate() {
                *flag = k_mask >> k & 1 == 1;
            }
            for k in 0..mn {
                tight_routes[k] = !pattern.zero_routes[k];
            }
            stats.nodes_explored += 1;

            // A destination with positive demand floor and every incoming
            // route pinned to zero kills the pattern outright.
            for j in 0..n {
                if inst.demand(j).lo > 0.0
                    && (0..m).all(|i| pattern.zero_routes[i * n + j])
                {
                    continue 'patterns;
                }
            }
            // A floor-shipping source needs enough open outgoing capacity.
            if inst.mode() == Mode::SupplyLeq {
                for i in 0..m {
                    if pattern.slack_sources[i] {
                        let open: f64 = (0..n)
                            .filter(|j| !pattern.zero_routes[i * n + j])
                            .map(|j| inst.demand(j).hi)
                            .sum();
                        if open < inst.supply(i).lo {
                            continue 'patterns;
                        }
                    }
                }
            }

            let dual = super::dual_part_lp(inst, &tight_routes, &zero_dual_sources, None);
            stats.lp_solves += 1;
            let dual_out = solve_generic::<BigRational>(&dual)?;
            if dual_out.status != LpStatus::Optimal {
                continue;
            }

            let primal = primal_part_lp(inst, &pattern.zero_routes, &pattern.slack_sources);
            stats.lp_solves += 1;
            let primal_out = solve_generic::<BigRational>(&primal)?;
            match primal_out.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => continue,
                LpStatus::Unbounded => {
                    return Err(WorstFiniteError::Numerical(crate::lp::LpError::NumericalFailure(
                        "pattern program is bounded by the demand caps".into(),
                    )))
                }
            }

            let improves = match &best {
                None => true,
                Some(b) => primal_out.value > b.value,
            };
            if improves {
                log.push(ConvergenceEntry {
                    elapsed_s: start.elapsed().as_secs_f64(),
                    incumbent: primal_out.value.to_f64(),
                    upper_bound: f64::INFINITY,
                    nodes_explored: stats.nodes_explored,
                });
                best = Some(BestPattern {
                    value: primal_out.value,
                    x: primal_out.primal[..mn].to_vec(),
                    u: dual_out.primal[..m].to_vec(),
                    v: dual_out.primal[m..m + n].to_vec(),
                });
            }
        }
    }

    stats.wall_time = start.elapsed();
    let incumbent = best.map(|b| {
        let plan =
            TransportPlan::from_flat(m, n, b.x.iter().map(Scalar::to_f64).collect());
        let scenario = scenario_for_plan(inst, &plan);
        Incumbent {
            value: b.value.to_f64(),
            plan,
            duals: DualPair::new(
                b.u.iter().map(Scalar::to_f64).collect(),
                b.v.iter().map(Scalar::to_f64).collect(),
            ),
            scenario,
        }
    });
    let value = incumbent.as_ref().map_or(f64::NEG_INFINITY, |inc| inc.value);
    log.push(ConvergenceEntry {
        elapsed_s: stats.wall_time.as_secs_f64(),
        incumbent: value,
        upper_bound: value,
        nodes_explored: stats.nodes_explored,
    });
    Ok(WorstFiniteResult {
        value,
        upper_bound: value,
        proven_optimal: true,
        incumbent,
        stats,
        log,
    })
}

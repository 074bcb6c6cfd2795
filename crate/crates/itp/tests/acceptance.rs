//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line. Run with `cargo test -p itp --test acceptance --
//! --nocapture` to see the lines.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use itp::bench::convergence_csv;
use itp::generate::{sample_instance, SampleConfig};
use itp::properties::{
    strong_feasible_problem, strong_optimal_solution_fixed_cost, strong_optimal_solution_general,
    weak_feasible_problem, weak_optimal_solution,
};
use itp::value_range::{
    best_optimal_value, best_optimal_value_with, initial_scenario, worst_finite_fixed_rhs,
    worst_optimal_value, worst_optimal_value_with,
};
use itp::worst_finite::{
    worst_finite_bnb, worst_finite_enumerate, NodeOrder, WorstFiniteConfig, WorstFiniteResult,
};
use itp::{
    complementarity_violation, solve_scenario, solve_scenario_with, Arithmetic, Instance,
    Interval, LpStatus, Mode, Scenario, TransportPlan,
};

fn run_criterion(id: u32, desc: &str, body: impl FnOnce() -> String) {
    let outcome = catch_unwind(AssertUnwindSafe(body));
    match outcome {
        Ok(detail) => println!("[acceptance] criterion {id} PASS - {desc}: {detail}"),
        Err(e) => {
            println!("[acceptance] criterion {id} FAIL - {desc}");
            resume_unwind(e);
        }
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Shapes with `m*n + m <= 12`, cycled to mix the corpus.
const SMALL_SHAPES: [(usize, usize); 16] = [
    (1, 1),
    (1, 2),
    (2, 1),
    (2, 2),
    (1, 3),
    (3, 1),
    (2, 3),
    (3, 2),
    (1, 4),
    (4, 1),
    (2, 4),
    (4, 2),
    (1, 5),
    (5, 1),
    (2, 5),
    (3, 3),
];

#[test]
fn criterion_1_oracle_equivalence() {
    run_criterion(1, "search equals rational enumeration on small boxes", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_001);
        let cfg = WorstFiniteConfig::default();
        let total = 512;
        let mut degenerate_seen = 0;
        for round in 0..total {
            let (m, n) = SMALL_SHAPES[round % SMALL_SHAPES.len()];
            assert!(m * n + m <= 12);
            let mode = if round % 3 == 0 { Mode::SupplyEq } else { Mode::SupplyLeq };
            let mut sample = SampleConfig::new(m, n, mode);
            sample.degenerate_prob = if round % 5 == 0 { 1.0 } else { 0.25 };
            let inst = sample_instance(&mut rng, &sample);
            if inst.has_fixed_rhs() && inst.has_fixed_costs() {
                degenerate_seen += 1;
            }
            let exact = worst_finite_enumerate(&inst, &cfg).unwrap();
            let searched = worst_finite_bnb(&inst, &cfg).unwrap();
            assert!(searched.proven_optimal, "round {round}: search unproven on {inst:?}");
            assert!(
                rel_close(exact.value, searched.value, 1e-6),
                "round {round}: enumeration {} vs search {} on {inst:?}",
                exact.value,
                searched.value
            );
            check_incumbent_certificate(&inst, &searched, round);
            check_incumbent_certificate(&inst, &exact, round);
        }
        format!(
            "{total} instances ({degenerate_seen} fully degenerate) in {:.1}s",
            start.elapsed().as_secs_f64()
        )
    });
}

/// The incumbent must satisfy the primal rows, the dual rows and both
/// complementarity implication families, and its scenario must re-solve
/// to the reported value.
fn check_incumbent_certificate(inst: &Instance, res: &WorstFiniteResult, round: usize) {
    let inc = res.incumbent.as_ref().expect("result carries an incumbent");
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let tol = 1e-6 * (1.0 + inc.value.abs());
    for i in 0..m {
        let row = inc.plan.row_sum(i);
        assert!(row <= inst.supply(i).hi + tol, "round {round}: supply cap violated");
        if inst.mode() == Mode::SupplyEq {
            assert!(row >= inst.supply(i).lo - tol, "round {round}: supply floor violated");
        }
    }
    for j in 0..n {
        let col = inc.plan.col_sum(j);
        assert!(
            col >= inst.demand(j).lo - tol && col <= inst.demand(j).hi + tol,
            "round {round}: demand band violated"
        );
    }
    for i in 0..m {
        if inst.mode() == Mode::SupplyLeq {
            assert!(inc.duals.u[i] <= tol, "round {round}: dual sign violated");
        }
        for j in 0..n {
            let top = inst.cost(i, j).hi;
            let slack = top - inc.duals.u[i] - inc.duals.v[j];
            assert!(slack >= -tol, "round {round}: dual row violated");
            if inc.plan.get(i, j) > 1e-6 {
                assert!(slack <= tol, "round {round}: positive route not tight");
            }
        }
        if inst.mode() == Mode::SupplyLeq
            && inc.plan.row_sum(i) < inst.supply(i).lo - tol
        {
            assert!(inc.duals.u[i] >= -tol, "round {round}: short source with negative dual");
        }
    }
    let sol = solve_scenario(inst, &inc.scenario).unwrap();
    assert!(
        rel_close(sol.value, res.value, 1e-6),
        "round {round}: scenario re-solve {} vs reported {}",
        sol.value,
        res.value
    );
}

/// Strongly feasible instances by construction: supply floors cover the
/// demand ceilings.
fn strongly_feasible_instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Instance {
    let demand: Vec<Interval> = (0..n)
        .map(|_| {
            let lo = rng.gen_range(1..=16) as f64 / 2.0;
            let w = rng.gen_range(0..=8) as f64 / 2.0;
            Interval::new(lo, lo + w)
        })
        .collect();
    let total_hi: f64 = demand.iter().map(|iv| iv.hi).sum();
    let base = (total_hi / m as f64).ceil();
    let supply: Vec<Interval> = (0..m)
        .map(|_| {
            let lo = base + rng.gen_range(0..=4) as f64 / 2.0;
            let w = rng.gen_range(0..=8) as f64 / 2.0;
            Interval::new(lo, lo + w)
        })
        .collect();
    let cost: Vec<Vec<Interval>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let lo = rng.gen_range(0..=30) as f64 / 2.0;
                    let w = rng.gen_range(0..=10) as f64 / 2.0;
                    Interval::new(lo, lo + w)
                })
                .collect()
        })
        .collect();
    Instance::new(Mode::SupplyLeq, cost, supply, demand).unwrap()
}

#[test]
fn criterion_2_strongly_feasible_consistency() {
    run_criterion(2, "search equals the single-solve bound when every scenario is feasible", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_002);
        let cfg = WorstFiniteConfig::default();
        let total = 200;
        for round in 0..total {
            let m = rng.gen_range(1..=8);
            let n = rng.gen_range(1..=8);
            let inst = strongly_feasible_instance(&mut rng, m, n);
            assert!(strong_feasible_problem(&inst), "constructor broke strong feasibility");
            let direct = worst_optimal_value(&inst).unwrap();
            assert!(direct.is_finite());
            let searched = worst_finite_bnb(&inst, &cfg).unwrap();
            assert!(
                rel_close(direct, searched.value, 1e-6),
                "round {round} ({m}x{n}): direct {} vs search {}",
                direct,
                searched.value
            );
        }
        format!("{total} instances in {:.1}s", start.elapsed().as_secs_f64())
    });
}

/// Fixed supply and demand, interval costs, feasible by construction.
fn fixed_rhs_instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Instance {
    let demand: Vec<Interval> =
        (0..n).map(|_| Interval::point(rng.gen_range(1..=16) as f64 / 2.0)).collect();
    let total: f64 = demand.iter().map(|iv| iv.hi).sum();
    let base = (total / m as f64).ceil();
    let supply: Vec<Interval> =
        (0..m).map(|_| Interval::point(base + rng.gen_range(0..=4) as f64 / 2.0)).collect();
    let cost: Vec<Vec<Interval>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let lo = rng.gen_range(0..=30) as f64 / 2.0;
                    let w = rng.gen_range(0..=12) as f64 / 2.0;
                    Interval::new(lo, lo + w)
                })
                .collect()
        })
        .collect();
    Instance::new(Mode::SupplyLeq, cost, supply, demand).unwrap()
}

#[test]
fn criterion_3_fixed_rhs_consistency() {
    run_criterion(3, "search equals the dual bound on exact supply and demand", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_003);
        let cfg = WorstFiniteConfig::default();
        let total = 200;
        for round in 0..total {
            let m = rng.gen_range(1..=8);
            let n = rng.gen_range(1..=8);
            let inst = fixed_rhs_instance(&mut rng, m, n);
            let direct = worst_finite_fixed_rhs(&inst).unwrap();
            let searched = worst_finite_bnb(&inst, &cfg).unwrap();
            assert!(
                rel_close(direct, searched.value, 1e-6),
                "round {round} ({m}x{n}): dual bound {} vs search {}",
                direct,
                searched.value
            );
        }
        format!("{total} instances in {:.1}s", start.elapsed().as_secs_f64())
    });
}

#[test]
fn criterion_4_sandwich_and_collapse() {
    run_criterion(4, "value ordering and degenerate-box collapse", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_004);
        let cfg = WorstFiniteConfig::default();

        // Ordering on general weakly feasible instances.
        let mut finite_worst = 0;
        for round in 0..120 {
            let (m, n) = SMALL_SHAPES[round % SMALL_SHAPES.len()];
            let mode = if round % 4 == 0 { Mode::SupplyEq } else { Mode::SupplyLeq };
            let inst = sample_instance(&mut rng, &SampleConfig::new(m, n, mode));
            let best = best_optimal_value(&inst).unwrap().value;
            let wf = worst_finite_bnb(&inst, &cfg).unwrap();
            assert!(wf.proven_optimal);
            let worst = worst_optimal_value(&inst).unwrap();
            assert!(
                best <= wf.value + 1e-6 * (1.0 + wf.value.abs()),
                "round {round}: best {} above worst-finite {}",
                best,
                wf.value
            );
            if worst.is_finite() {
                finite_worst += 1;
                assert!(
                    wf.value <= worst + 1e-6 * (1.0 + worst.abs()),
                    "round {round}: worst-finite {} above worst {}",
                    wf.value,
                    worst
                );
            }
        }

        // Point boxes collapse every value to the single scenario optimum,
        // exactly in rational arithmetic.
        for round in 0..50 {
            let (m, n) = SMALL_SHAPES[round % 8];
            let mode = if round % 2 == 0 { Mode::SupplyLeq } else { Mode::SupplyEq };
            let inst = point_instance(&mut rng, m, n, mode);
            let sc = Scenario::new(
                (0..m).map(|i| (0..n).map(|j| inst.cost(i, j).lo).collect()).collect(),
                (0..m).map(|i| inst.supply(i).lo).collect(),
                (0..n).map(|j| inst.demand(j).lo).collect(),
            );
            let sol = solve_scenario_with(&inst, &sc, Arithmetic::Rational).unwrap();
            assert_eq!(sol.status, LpStatus::Optimal);
            let best = best_optimal_value_with(&inst, Arithmetic::Rational).unwrap().value;
            let worst = worst_optimal_value_with(&inst, Arithmetic::Rational).unwrap();
            let wf = worst_finite_enumerate(&inst, &cfg).unwrap();
            for (label, v) in [("best", best), ("worst", worst), ("worst-finite", wf.value)] {
                assert!(
                    (v - sol.value).abs() <= 1e-9 * (1.0 + sol.value.abs()),
                    "round {round}: {label} {} differs from scenario optimum {}",
                    v,
                    sol.value
                );
            }
        }
        format!(
            "120 ordered cases ({finite_worst} with finite worst), 50 exact collapses in {:.1}s",
            start.elapsed().as_secs_f64()
        )
    });
}

fn point_instance(rng: &mut ChaCha8Rng, m: usize, n: usize, mode: Mode) -> Instance {
    let demand: Vec<Interval> =
        (0..n).map(|_| Interval::point(rng.gen_range(1..=12) as f64 / 2.0)).collect();
    let total: f64 = demand.iter().map(|iv| iv.hi).sum();
    let supply: Vec<Interval> = match mode {
        Mode::SupplyLeq => (0..m)
            .map(|_| Interval::point((total / m as f64).ceil() + rng.gen_range(0..=3) as f64))
            .collect(),
        Mode::SupplyEq => {
            // Balanced exactly: spread the total, fix the remainder on the
            // last source.
            let mut left = total;
            let mut v: Vec<Interval> = (0..m - 1)
                .map(|_| {
                    let s = (left / 2.0 * 2.0).max(0.0) / 2.0;
                    let s = (s * 2.0).floor() / 2.0;
                    left -= s;
                    Interval::point(s)
                })
                .collect();
            v.push(Interval::point(left));
            v
        }
    };
    let cost: Vec<Vec<Interval>> = (0..m)
        .map(|_| (0..n).map(|_| Interval::point(rng.gen_range(0..=20) as f64 / 2.0)).collect())
        .collect();
    Instance::new(mode, cost, supply, demand).unwrap()
}

#[test]
fn criterion_5_duality_and_complementarity() {
    run_criterion(5, "scenario solves carry duality certificates and weakly optimal plans", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_005);
        let total = 1000;
        let mut solved = 0;
        for round in 0..total {
            let m = rng.gen_range(1..=8);
            let n = rng.gen_range(1..=8);
            let mode = if round % 3 == 0 { Mode::SupplyEq } else { Mode::SupplyLeq };
            let inst = sample_instance(&mut rng, &SampleConfig::new(m, n, mode));
            // Every fifth scenario is raw-random, exercising the
            // infeasible branch of the status/sum-condition equivalence.
            let sc = if round % 5 == 0 {
                random_scenario(&mut rng, &inst)
            } else {
                feasible_scenario(&mut rng, &inst)
            };
            assert!(inst.contains_scenario(&sc).unwrap());
            let sol = solve_scenario(&inst, &sc).unwrap();
            assert_eq!(
                sol.status == LpStatus::Optimal,
                inst.scenario_feasibility_condition(&sc),
                "round {round}: solver status disagrees with the sum condition"
            );
            if sol.status != LpStatus::Optimal {
                continue;
            }
            solved += 1;
            assert!(sol.duality_gap(&sc) <= 1e-6, "round {round}: duality gap too large");
            assert!(
                complementarity_violation(&inst, &sc, &sol) <= 1e-6,
                "round {round}: complementarity violated"
            );
            assert!(sol.duals.is_feasible_for(&sc, inst.mode()), "round {round}: dual infeasible");
            let cert = weak_optimal_solution(&inst, &sol.plan)
                .unwrap()
                .unwrap_or_else(|| panic!("round {round}: optimal plan not weakly optimal"));
            let re = solve_scenario(&inst, &cert.scenario).unwrap();
            assert!(
                rel_close(re.value, sol.plan.cost_under(&cert.scenario), 1e-6),
                "round {round}: witness does not certify the plan"
            );
        }
        assert!(solved >= total * 7 / 10, "too few feasible scenarios: {solved}");
        format!("{solved}/{total} optimal solves certified in {:.1}s", start.elapsed().as_secs_f64())
    });
}

fn pick_in(iv: Interval, rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..4) {
        0 => iv.lo,
        1 => iv.hi,
        _ => {
            // Dyadic interior point.
            let steps = 4;
            let k = rng.gen_range(0..=steps);
            iv.lo + (iv.hi - iv.lo) * k as f64 / steps as f64
        }
    }
}

fn random_scenario(rng: &mut ChaCha8Rng, inst: &Instance) -> Scenario {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let cost: Vec<Vec<f64>> =
        (0..m).map(|i| (0..n).map(|j| pick_in(inst.cost(i, j), rng)).collect()).collect();
    let supply: Vec<f64> = (0..m).map(|i| pick_in(inst.supply(i), rng)).collect();
    let demand: Vec<f64> = (0..n).map(|j| pick_in(inst.demand(j), rng)).collect();
    Scenario::new(cost, supply, demand)
}

/// Greedy fill of box values to an exact target total; lands exactly when
/// the target lies between the bound sums.
fn fill_to_total(bounds: &[Interval], target: f64) -> Vec<f64> {
    let mut floor_rest: f64 = bounds.iter().skip(1).map(|iv| iv.lo).sum();
    let mut out = Vec::with_capacity(bounds.len());
    let mut placed = 0.0;
    for (k, iv) in bounds.iter().enumerate() {
        let v = iv.lo.max(iv.hi.min(target - placed - floor_rest));
        placed += v;
        out.push(v);
        if k + 1 < bounds.len() {
            floor_rest -= bounds[k + 1].lo;
        }
    }
    out
}

/// A scenario guaranteed feasible: demand filled to a reachable total and
/// supply filled to cover it (exactly in depletion mode).
fn feasible_scenario(rng: &mut ChaCha8Rng, inst: &Instance) -> Scenario {
    let (m, n) = (inst.num_sources(), inst.num_destinations());
    let cost: Vec<Vec<f64>> =
        (0..m).map(|i| (0..n).map(|j| pick_in(inst.cost(i, j), rng)).collect()).collect();
    let supplies: Vec<Interval> = (0..m).map(|i| inst.supply(i)).collect();
    let demands: Vec<Interval> = (0..n).map(|j| inst.demand(j)).collect();
    match inst.mode() {
        Mode::SupplyLeq => {
            // Any demand total at most the supply ceiling works.
            let cap = inst.total_supply_hi().min(inst.total_demand_hi());
            let lo = inst.total_demand_lo();
            let steps = 4;
            let t = lo + (cap - lo).max(0.0) * rng.gen_range(0..=steps) as f64 / steps as f64;
            let demand = fill_to_total(&demands, t);
            let need: f64 = demand.iter().sum();
            let supply = fill_to_total(&supplies, need.max(inst.total_supply_lo()));
            Scenario::new(cost, supply, demand)
        }
        Mode::SupplyEq => {
            // Both totals pinned to a point in the overlap.
            let lo = inst.total_supply_lo().max(inst.total_demand_lo());
            let hi = inst.total_supply_hi().min(inst.total_demand_hi());
            let steps = 4;
            let t = lo + (hi - lo).max(0.0) * rng.gen_range(0..=steps) as f64 / steps as f64;
            Scenario::new(cost, fill_to_total(&supplies, t), fill_to_total(&demands, t))
        }
    }
}

#[test]
fn criterion_6_initial_scenario_contract() {
    run_criterion(6, "seed scenario fills the boxes and lower-bounds the worst value", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_006);
        let cfg = WorstFiniteConfig::default();
        let total = 1000;
        for round in 0..total {
            let (m, n) = SMALL_SHAPES[round % SMALL_SHAPES.len()];
            let mode = if round % 3 == 0 { Mode::SupplyEq } else { Mode::SupplyLeq };
            let inst = sample_instance(&mut rng, &SampleConfig::new(m, n, mode));
            assert!(weak_feasible_problem(&inst));
            let (sc, sol) = initial_scenario(&inst).unwrap();
            let g = inst.total_supply_hi().min(inst.total_demand_hi());
            assert!(
                (sc.total_demand() - g).abs() <= 1e-9 * (1.0 + g.abs()),
                "round {round}: transferred total misses the cap"
            );
            assert!(inst.contains_scenario(&sc).unwrap(), "round {round}: scenario left the box");
            assert!(
                sc.total_supply() >= sc.total_demand() - 1e-9 * (1.0 + g.abs()),
                "round {round}: supply does not cover demand"
            );
            assert_eq!(sol.status, LpStatus::Optimal);
            let wf = worst_finite_bnb(&inst, &cfg).unwrap();
            assert!(wf.proven_optimal);
            assert!(
                sol.value <= wf.value + 1e-6 * (1.0 + wf.value.abs()),
                "round {round}: seed {} exceeds the worst finite value {}",
                sol.value,
                wf.value
            );
        }
        format!("{total} seeds verified in {:.1}s", start.elapsed().as_secs_f64())
    });
}

#[test]
fn criterion_7_reference_dataset_values() {
    run_criterion(7, "published benchmark values (conditional on dataset presence)", || {
        let dir = std::env::var("ITP_REFERENCE_DIR").unwrap_or_else(|_| "testdata/reference".into());
        let dir = std::path::Path::new(&dir);
        if !dir.is_dir() {
            return format!("SKIPPED - dataset directory `{}` not present", dir.display());
        }
        let expect = [("3x5.json", 9555.0), ("4x6.json", 15060.0), ("5x10.json", 13175.0), ("10x10.json", 26350.0)];
        let mut checked = 0;
        for (file, value) in expect {
            let path = dir.join(file);
            if !path.is_file() {
                continue;
            }
            let inst = itp::io::parse_instance(&path).unwrap();
            let cfg = WorstFiniteConfig {
                time_limit: Some(Duration::from_secs(60)),
                ..WorstFiniteConfig::default()
            };
            let res = worst_finite_bnb(&inst, &cfg).unwrap();
            assert!(res.proven_optimal, "{file}: not proven within the desk budget");
            assert!(
                (res.value - value).abs() <= 1e-6 * (1.0 + value),
                "{file}: got {}, published {}",
                res.value,
                value
            );
            checked += 1;
        }
        let big = dir.join("20x20.json");
        if big.is_file() {
            let inst = itp::io::parse_instance(&big).unwrap();
            let cfg = WorstFiniteConfig {
                time_limit: Some(Duration::from_secs(1500)),
                ..WorstFiniteConfig::default()
            };
            let res = worst_finite_bnb(&inst, &cfg).unwrap();
            assert!(res.value >= 9425.0 - 1e-6, "20x20 incumbent {} below 9425", res.value);
            checked += 1;
        }
        format!("{checked} dataset instances reproduced")
    });
}

#[test]
fn criterion_8_property_checker_cross_validation() {
    run_criterion(8, "weak-optimality certificates re-verify; strong tests agree on exact costs", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_008);

        // Certificates always survive an independent re-solve.
        let mut some = 0;
        for round in 0..300 {
            let (m, n) = if round % 2 == 0 { (2, 2) } else { (2, 3) };
            let mode = if round % 3 == 0 { Mode::SupplyEq } else { Mode::SupplyLeq };
            let inst = sample_instance(&mut rng, &SampleConfig::new(m, n, mode));
            let plan = if round % 2 == 0 {
                // An optimal plan of a random feasible scenario.
                let sc = feasible_scenario(&mut rng, &inst);
                let sol = solve_scenario(&inst, &sc).unwrap();
                if sol.status != LpStatus::Optimal {
                    continue;
                }
                sol.plan
            } else {
                // An arbitrary plan inside the demand bands.
                let cols: Vec<f64> = (0..n)
                    .map(|j| {
                        let iv = inst.demand(j);
                        iv.lo + (iv.hi - iv.lo) * (rng.gen_range(0..=4) as f64 / 4.0)
                    })
                    .collect();
                TransportPlan::new(
                    (0..m)
                        .map(|i| (0..n).map(|j| cols[j] * if i == 0 { 1.0 } else { 0.0 }).collect())
                        .collect(),
                )
            };
            if let Some(cert) = weak_optimal_solution(&inst, &plan).unwrap() {
                some += 1;
                assert!(inst.contains_scenario(&cert.scenario).unwrap(), "round {round}");
                let re = solve_scenario(&inst, &cert.scenario).unwrap();
                assert_eq!(re.status, LpStatus::Optimal);
                assert!(
                    rel_close(re.value, plan.cost_under(&cert.scenario), 1e-6),
                    "round {round}: certificate failed re-verification: {} vs {}",
                    re.value,
                    plan.cost_under(&cert.scenario)
                );
            }
        }
        assert!(some >= 100, "too few certificates exercised: {some}");

        // With exact costs the general test must agree with the
        // closed-form one.
        let mut agreements = 0;
        for round in 0..200 {
            let m = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=3);
            let inst = fixed_cost_instance(&mut rng, m, n);
            let sc = Scenario::new(
                (0..m).map(|i| (0..n).map(|j| inst.cost(i, j).hi).collect()).collect(),
                (0..m).map(|i| inst.supply(i).hi).collect(),
                (0..n).map(|j| inst.demand(j).hi).collect(),
            );
            let sol = solve_scenario(&inst, &sc).unwrap();
            let plan = if sol.status == LpStatus::Optimal {
                sol.plan
            } else {
                TransportPlan::new(vec![vec![0.0; n]; m])
            };
            let fixed = strong_optimal_solution_fixed_cost(&inst, &plan).unwrap();
            let general = strong_optimal_solution_general(&inst, &plan).unwrap();
            assert_eq!(fixed, general, "round {round}: strong tests disagree on {inst:?}");
            agreements += 1;
        }
        format!(
            "{some} certificates re-verified, {agreements} strong-test agreements in {:.1}s",
            start.elapsed().as_secs_f64()
        )
    });
}

fn fixed_cost_instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Instance {
    let demand: Vec<Interval> =
        (0..n).map(|_| Interval::point(rng.gen_range(1..=8) as f64)).collect();
    let total: f64 = demand.iter().map(|iv| iv.hi).sum();
    let supply: Vec<Interval> = (0..m)
        .map(|_| Interval::point((total / m as f64).ceil() + rng.gen_range(0..=2) as f64))
        .collect();
    let cost: Vec<Vec<Interval>> = (0..m)
        .map(|_| (0..n).map(|_| Interval::point(rng.gen_range(1..=15) as f64)).collect())
        .collect();
    Instance::new(Mode::SupplyLeq, cost, supply, demand).unwrap()
}

#[test]
fn criterion_9_anytime_behavior() {
    run_criterion(9, "budgeted search is monotone, bounded and reproducible", || {
        let start = Instant::now();
        let total = 20;
        for seed in 0..total {
            let inst = itp::generate::generate_instance(
                15,
                15,
                9000 + seed,
                &itp::generate::GenParams::default(),
            )
            .unwrap();
            let cfg = WorstFiniteConfig {
                time_limit: Some(Duration::from_secs(10)),
                node_limit: Some(200),
                node_order: NodeOrder::BestBound,
                ..WorstFiniteConfig::default()
            };
            let first = worst_finite_bnb(&inst, &cfg).unwrap();
            let second = worst_finite_bnb(&inst, &cfg).unwrap();
            assert_eq!(
                first.value, second.value,
                "seed {seed}: values differ between identical runs"
            );
            assert_eq!(
                first.stats.nodes_explored, second.stats.nodes_explored,
                "seed {seed}: node counts differ between identical runs"
            );
            let csv = convergence_csv(&first.log);
            let rows: Vec<(f64, f64)> = csv
                .lines()
                .skip(1)
                .map(|line| {
                    let mut parts = line.split(',');
                    let _elapsed: f64 = parts.next().unwrap().parse().unwrap();
                    let inc: f64 = parts.next().unwrap().parse().unwrap();
                    let bound: f64 = parts.next().unwrap().parse().unwrap();
                    (inc, bound)
                })
                .collect();
            for pair in rows.windows(2) {
                assert!(pair[1].0 >= pair[0].0 - 1e-9, "seed {seed}: incumbent regressed");
                assert!(pair[1].1 <= pair[0].1 + 1e-9, "seed {seed}: bound increased");
            }
            let (final_inc, final_bound) = *rows.last().unwrap();
            assert!(
                final_inc <= final_bound + 1e-6 * (1.0 + final_inc.abs()),
                "seed {seed}: incumbent above the bound"
            );
        }
        format!("{total} budgeted searches reproduced in {:.1}s", start.elapsed().as_secs_f64())
    });
}

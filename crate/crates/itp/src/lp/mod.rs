//! Generic linear-programming engine.
//!
//! One bounded-variable primal simplex behind a small problem container;
//! every linear program in the toolkit (scenario solves, certificate
//! systems, pattern relaxations) goes through this module. Solves run in
//! double precision by default and in exact rational arithmetic on
//! request.

mod number;
mod simplex;

pub(crate) use number::Scalar;
pub use number::rational_int;

use num_rational::BigRational;

use simplex::{solve_std, SimplexError, SimplexStatus, StdForm};

/// Objective sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Row relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Arithmetic backend for a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Float,
    Rational,
}

#[derive(Debug, Clone)]
struct Row {
    relation: Relation,
    rhs: f64,
    entries: Vec<(usize, f64)>,
}

/// A linear program with bounded variables and sparse rows.
///
/// Bounds use `f64::NEG_INFINITY` / `f64::INFINITY` for free directions.
#[derive(Debug, Clone)]
pub struct LpProblem {
    sense: Sense,
    obj: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        LpProblem { sense, obj: Vec::new(), lower: Vec::new(), upper: Vec::new(), rows: Vec::new() }
    }

    /// Adds a variable and returns its column index.
    ///
    /// Panics on NaN data or a reversed bound pair; those are programming
    /// errors in the caller, not solvable states.
    pub fn add_var(&mut self, obj: f64, lower: f64, upper: f64) -> usize {
        assert!(!obj.is_nan() && !lower.is_nan() && !upper.is_nan(), "NaN in variable definition");
        assert!(lower <= upper, "variable bounds reversed: [{lower}, {upper}]");
        self.obj.push(obj);
        self.lower.push(lower);
        self.upper.push(upper);
        self.obj.len() - 1
    }

    /// Adds a constraint row; entries are `(column, coefficient)` pairs.
    pub fn add_row(&mut self, relation: Relation, rhs: f64, entries: &[(usize, f64)]) {
        assert!(!rhs.is_nan(), "NaN right-hand side");
        for (col, coef) in entries {
            assert!(*col < self.obj.len(), "row references undeclared column {col}");
            assert!(!coef.is_nan(), "NaN coefficient");
        }
        self.rows.push(Row { relation, rhs, entries: entries.to_vec() });
    }

    pub fn num_vars(&self) -> usize {
        self.obj.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn to_std<T: Scalar>(&self) -> StdForm<T> {
        let nstruct = self.obj.len();
        let nrows = self.rows.len();
        let ncols = nstruct + nrows;
        let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); ncols];
        let mut lower: Vec<Option<T>> = Vec::with_capacity(ncols);
        let mut upper: Vec<Option<T>> = Vec::with_capacity(ncols);
        for j in 0..nstruct {
            lower.push(finite(self.lower[j]));
            upper.push(finite(self.upper[j]));
        }
        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut obj: Vec<T> = self.obj.iter().map(|c| T::from_f64(sign * c)).collect();
        obj.resize(ncols, T::zero());
        let mut rhs = Vec::with_capacity(nrows);
        for (i, row) in self.rows.iter().enumerate() {
            for (col, coef) in &row.entries {
                if *coef != 0.0 {
                    cols[*col].push((i, T::from_f64(*coef)));
                }
            }
            let slack = nstruct + i;
            cols[slack].push((i, T::one()));
            let (slo, shi) = match row.relation {
                Relation::Le => (Some(T::zero()), None),
                Relation::Eq => (Some(T::zero()), Some(T::zero())),
                Relation::Ge => (None, Some(T::zero())),
            };
            lower.push(slo);
            upper.push(shi);
            rhs.push(T::from_f64(row.rhs));
        }
        StdForm { nrows, ncols, nstruct, cols, lower, upper, obj, rhs }
    }
}

fn finite<T: Scalar>(v: f64) -> Option<T> {
    if v.is_finite() {
        Some(T::from_f64(v))
    } else {
        None
    }
}

/// Solver verdict for one linear program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve: primal point, one dual per row, objective value,
/// plus an infeasibility or unboundedness certificate when applicable.
///
/// Dual sign convention for minimization: `<=` rows get non-positive
/// duals, `>=` rows non-negative, equality rows are free. Maximization
/// flips all signs. The `farkas` weights `y` certify infeasibility via
/// `y . rhs > sup { y . (A x) : x within bounds }`; the `ray` is a
/// feasible direction that improves the objective forever.
#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub duals: Vec<f64>,
    pub value: f64,
    pub farkas: Option<Vec<f64>>,
    pub ray: Option<Vec<f64>>,
}

/// Engine failure; exact-arithmetic retries are the caller's recourse.
#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    NumericalFailure(String),
}

impl std::fmt::Display for LpError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpError::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for LpError {}

impl From<SimplexError> for LpError {
    fn from(e: SimplexError) -> Self {
        match e {
            SimplexError::IterationLimit => LpError::NumericalFailure("iteration limit".into()),
            SimplexError::SingularBasis => LpError::NumericalFailure("singular basis".into()),
            SimplexError::Internal(msg) => LpError::NumericalFailure(msg.into()),
        }
    }
}

/// Typed solve used internally when exact values matter.
pub(crate) struct GenericOutcome<T> {
    pub status: LpStatus,
    pub primal: Vec<T>,
    pub duals: Vec<T>,
    pub value: T,
    pub farkas: Option<Vec<T>>,
    pub ray: Option<Vec<T>>,
}

pub(crate) fn solve_generic<T: Scalar>(p: &LpProblem) -> Result<GenericOutcome<T>, LpError> {
    let form = p.to_std::<T>();
    let res = solve_std(&form)?;
    let sign = match p.sense {
        Sense::Minimize => T::one(),
        Sense::Maximize => -T::one(),
    };
    Ok(match res.status {
        SimplexStatus::Optimal => {
            let primal: Vec<T> = res.x[..form.nstruct].to_vec();
            let mut value = T::zero();
            for (c, x) in p.obj.iter().zip(&primal) {
                if *c != 0.0 {
                    value = value + T::from_f64(*c) * x.clone();
                }
            }
            let duals = res.duals.into_iter().map(|y| sign.clone() * y).collect();
            GenericOutcome { status: LpStatus::Optimal, primal, duals, value, farkas: None, ray: None }
        }
        SimplexStatus::Infeasible { farkas } => GenericOutcome {
            status: LpStatus::Infeasible,
            primal: Vec::new(),
            duals: Vec::new(),
            value: T::zero(),
            farkas: Some(farkas),
            ray: None,
        },
        SimplexStatus::Unbounded { ray } => GenericOutcome {
            status: LpStatus::Unbounded,
            primal: Vec::new(),
            duals: Vec::new(),
            value: T::zero(),
            farkas: None,
            ray: Some(ray[..form.nstruct].to_vec()),
        },
    })
}

/// Solves a linear program, returning a certified outcome.
///
/// `Rational` solves run the identical pivoting path in arbitrary
/// precision; results are exact and then reported as doubles.
pub fn solve_lp(p: &LpProblem, arithmetic: Arithmetic) -> Result<LpOutcome, LpError> {
    match arithmetic {
        Arithmetic::Float => solve_generic::<f64>(p).map(|g| outcome_from(g, p)),
        Arithmetic::Rational => solve_generic::<BigRational>(p).map(|g| outcome_from(g, p)),
    }
}

fn outcome_from<T: Scalar>(g: GenericOutcome<T>, p: &LpProblem) -> LpOutcome {
    let value = match g.status {
        LpStatus::Optimal => g.value.to_f64(),
        LpStatus::Infeasible => f64::NAN,
        LpStatus::Unbounded => match p.sense {
            Sense::Minimize => f64::NEG_INFINITY,
            Sense::Maximize => f64::INFINITY,
        },
    };
    LpOutcome {
        status: g.status,
        primal: g.primal.iter().map(Scalar::to_f64).collect(),
        duals: g.duals.iter().map(Scalar::to_f64).collect(),
        value,
        farkas: g.farkas.map(|v| v.iter().map(Scalar::to_f64).collect()),
        ray: g.ray.map(|v| v.iter().map(Scalar::to_f64).collect()),
    }
}

impl LpOutcome {
    /// Largest violation of rows and bounds by the primal point.
    pub fn primal_violation(&self, p: &LpProblem) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, x) in self.primal.iter().enumerate() {
            worst = worst.max(p.lower[j] - x).max(x - p.upper[j]);
        }
        for row in &p.rows {
            let lhs: f64 = row.entries.iter().map(|(c, a)| a * self.primal[*c]).sum();
            let v = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Largest violation of the dual sign conventions and reduced-cost
    /// optimality conditions.
    pub fn dual_violation(&self, p: &LpProblem) -> f64 {
        let sign = match p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut worst: f64 = 0.0;
        for (i, row) in p.rows.iter().enumerate() {
            let y = sign * self.duals[i];
            match row.relation {
                Relation::Le => worst = worst.max(y),
                Relation::Ge => worst = worst.max(-y),
                Relation::Eq => {}
            }
        }
        // Reduced costs: d_j = c_j - y . A_j must price every variable as
        // non-improving at its resting position.
        let red = self.reduced_costs(p);
        for (j, d) in red.iter().enumerate() {
            let x = self.primal[j];
            let at_lower = (x - p.lower[j]).abs() <= 1e-7 * (1.0 + x.abs());
            let at_upper = (p.upper[j] - x).abs() <= 1e-7 * (1.0 + x.abs());
            if at_lower && at_upper {
                continue;
            } else if at_lower {
                worst = worst.max(-d);
            } else if at_upper {
                worst = worst.max(*d);
            } else {
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// `|primal value - dual value|` relative to the value magnitude, with
    /// the dual objective carrying the reduced-cost bound terms.
    pub fn duality_gap(&self, p: &LpProblem) -> f64 {
        let sign = match p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut dual_int: f64 =
            self.duals.iter().zip(&p.rows).map(|(y, r)| sign * y * r.rhs).sum();
        for (j, d) in self.reduced_costs(p).iter().enumerate() {
            if *d > 0.0 && p.lower[j].is_finite() {
                dual_int += d * p.lower[j];
            } else if *d < 0.0 && p.upper[j].is_finite() {
                dual_int += d * p.upper[j];
            }
        }
        let value_int = sign * self.value;
        (value_int - dual_int).abs() / (1.0 + self.value.abs())
    }

    /// Internal-sense reduced costs `c_j - y . A_j`.
    fn reduced_costs(&self, p: &LpProblem) -> Vec<f64> {
        let sign = match p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut red: Vec<f64> = p.obj.iter().map(|c| sign * c).collect();
        for (i, row) in p.rows.iter().enumerate() {
            let y = sign * self.duals[i];
            if y != 0.0 {
                for (c, a) in &row.entries {
                    red[*c] -= y * a;
                }
            }
        }
        red
    }
}

/// Writes the program in the conventional textual LP format, for
/// inspection with external tools.
pub fn write_lp_format(p: &LpProblem, w: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(w, "{}", if p.sense == Sense::Minimize { "Minimize" } else { "Maximize" })?;
    write!(w, " obj:")?;
    let mut first = true;
    for (j, c) in p.obj.iter().enumerate() {
        if *c != 0.0 {
            write_term(w, *c, j, first)?;
            first = false;
        }
    }
    if first {
        write!(w, " 0 x0")?;
    }
    writeln!(w)?;
    writeln!(w, "Subject To")?;
    for (i, row) in p.rows.iter().enumerate() {
        write!(w, " r{i}:")?;
        let mut first = true;
        for (col, coef) in &row.entries {
            if *coef != 0.0 {
                write_term(w, *coef, *col, first)?;
                first = false;
            }
        }
        if first {
            write!(w, " 0 x0")?;
        }
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        writeln!(w, " {rel} {}", row.rhs)?;
    }
    writeln!(w, "Bounds")?;
    for j in 0..p.obj.len() {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            writeln!(w, " x{j} free")?;
        } else if hi == f64::INFINITY {
            writeln!(w, " x{j} >= {lo}")?;
        } else {
            writeln!(w, " {lo} <= x{j} <= {hi}")?;
        }
    }
    writeln!(w, "End")
}

fn write_term(w: &mut impl std::io::Write, coef: f64, col: usize, first: bool) -> std::io::Result<()> {
    if coef >= 0.0 {
        write!(w, " {}{} x{col}", if first { "" } else { "+ " }, coef)
    } else {
        write!(w, " - {} x{col}", -coef)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_equality() {
        // minimize 3x subject to x = 2, x >= 0
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(3.0, 0.0, f64::INFINITY);
        p.add_row(Relation::Eq, 2.0, &[(x, 1.0)]);
        let out = solve_lp(&p, Arithmetic::Float).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.primal[x] - 2.0).abs() < 1e-9);
        assert!((out.value - 6.0).abs() < 1e-9);
        assert!((out.duals[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn empty_box_is_infeasible() {
        // minimize x subject to x <= -1, x >= 0
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(1.0, 0.0, f64::INFINITY);
        p.add_row(Relation::Le, -1.0, &[(x, 1.0)]);
        let out = solve_lp(&p, Arithmetic::Float).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        let y = out.farkas.expect("infeasibility certificate");
        // y . rhs must exceed the best the row activity can reach.
        assert!(y[0] <= 0.0);
        assert!(-y[0] > 0.0);
    }

    #[test]
    fn free_ray_is_unbounded() {
        // maximize x subject to x >= 0 (no rows)
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(1.0, 0.0, f64::INFINITY);
        let out = solve_lp(&p, Arithmetic::Float).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
        let ray = out.ray.expect("unbounded direction");
        assert!(ray[x] > 0.0);
    }

    #[test]
    fn bounded_two_var_max() {
        // maximize x + 2y, x + y <= 4, 0 <= x <= 3, 0 <= y <= 3
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(1.0, 0.0, 3.0);
        let y = p.add_var(2.0, 0.0, 3.0);
        p.add_row(Relation::Le, 4.0, &[(x, 1.0), (y, 1.0)]);
        let out = solve_lp(&p, Arithmetic::Float).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.value - 7.0).abs() < 1e-9);
        assert!((out.primal[x] - 1.0).abs() < 1e-9);
        assert!((out.primal[y] - 3.0).abs() < 1e-9);
        assert!(out.primal_violation(&p) <= 1e-9);
        assert!(out.dual_violation(&p) <= 1e-9);
        assert!(out.duality_gap(&p) <= 1e-9);
    }

    #[test]
    fn rational_matches_float() {
        let mut p = LpProblem::new(Sense::Minimize);
        let x = p.add_var(1.0, 0.0, f64::INFINITY);
        let y = p.add_var(1.5, 0.0, f64::INFINITY);
        p.add_row(Relation::Ge, 3.0, &[(x, 1.0), (y, 2.0)]);
        p.add_row(Relation::Le, 2.5, &[(x, 1.0)]);
        let f = solve_lp(&p, Arithmetic::Float).unwrap();
        let r = solve_lp(&p, Arithmetic::Rational).unwrap();
        assert_eq!(f.status, LpStatus::Optimal);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((f.value - r.value).abs() <= 1e-6 * (1.0 + r.value.abs()));
    }

    #[test]
    fn free_variables_and_ranges() {
        // minimize v with u + v >= 2, u <= 0, u free below
        let mut p = LpProblem::new(Sense::Minimize);
        let u = p.add_var(0.0, f64::NEG_INFINITY, 0.0);
        let v = p.add_var(1.0, f64::NEG_INFINITY, f64::INFINITY);
        p.add_row(Relation::Ge, 2.0, &[(u, 1.0), (v, 1.0)]);
        let out = solve_lp(&p, Arithmetic::Float).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert!((out.value - 2.0).abs() < 1e-9, "u is pushed to its upper bound 0");
    }

    #[test]
    fn random_programs_agree_across_arithmetics() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut optimal = 0;
        for _ in 0..200 {
            let nv = rng.gen_range(1..=6);
            let nr = rng.gen_range(0..=5);
            let sense = if rng.gen_bool(0.5) { Sense::Minimize } else { Sense::Maximize };
            let mut p = LpProblem::new(sense);
            for _ in 0..nv {
                let obj = rng.gen_range(-8..=8) as f64 / 2.0;
                let kind = rng.gen_range(0..4);
                let (lo, hi) = match kind {
                    0 => (0.0, f64::INFINITY),
                    1 => (0.0, rng.gen_range(0..=8) as f64 / 2.0),
                    2 => (f64::NEG_INFINITY, rng.gen_range(-4..=4) as f64 / 2.0),
                    _ => {
                        let a = rng.gen_range(-6..=2) as f64 / 2.0;
                        (a, a + rng.gen_range(0..=8) as f64 / 2.0)
                    }
                };
                p.add_var(obj, lo, hi);
            }
            for _ in 0..nr {
                let rel = match rng.gen_range(0..3) {
                    0 => Relation::Le,
                    1 => Relation::Ge,
                    _ => Relation::Eq,
                };
                let mut entries: Vec<(usize, f64)> = Vec::new();
                for c in 0..nv {
                    if rng.gen_bool(0.7) {
                        entries.push((c, rng.gen_range(-6..=6) as f64 / 2.0));
                    }
                }
                let rhs = rng.gen_range(-10..=10) as f64 / 2.0;
                p.add_row(rel, rhs, &entries);
            }
            let f = solve_lp(&p, Arithmetic::Float).unwrap();
            let r = solve_lp(&p, Arithmetic::Rational).unwrap();
            assert_eq!(f.status, r.status, "status disagreement on {p:?}");
            match f.status {
                LpStatus::Optimal => {
                    optimal += 1;
                    assert!(
                        (f.value - r.value).abs() <= 1e-6 * (1.0 + r.value.abs()),
                        "value mismatch {} vs {} on {p:?}",
                        f.value,
                        r.value
                    );
                    for out in [&f, &r] {
                        assert!(out.primal_violation(&p) <= 1e-7, "primal violation on {p:?}");
                        assert!(out.dual_violation(&p) <= 1e-7, "dual violation on {p:?}");
                        assert!(out.duality_gap(&p) <= 1e-7, "duality gap on {p:?}");
                    }
                }
                LpStatus::Infeasible => {
                    // Certificate: y . rhs must exceed the reachable activity.
                    let y = r.farkas.as_ref().unwrap();
                    let mut margin: f64 = y.iter().zip(&p.rows).map(|(yi, row)| yi * row.rhs).sum();
                    let mut g = vec![0.0; p.num_vars()];
                    for (yi, row) in y.iter().zip(&p.rows) {
                        for (c, a) in &row.entries {
                            g[*c] += yi * a;
                        }
                        // slack of the row also contributes to the sup
                        match row.relation {
                            Relation::Le => assert!(*yi <= 1e-9, "wrong farkas sign"),
                            Relation::Ge => assert!(*yi >= -1e-9, "wrong farkas sign"),
                            Relation::Eq => {}
                        }
                    }
                    let dust = 1e-9 * y.iter().fold(1.0f64, |a, v| a.max(v.abs()));
                    for (j, gj) in g.iter().enumerate() {
                        if gj.abs() <= dust {
                            continue;
                        }
                        if *gj > 0.0 {
                            assert!(p.upper[j].is_finite(), "unbounded sup in certificate");
                            margin -= gj * p.upper[j];
                        } else {
                            assert!(p.lower[j].is_finite(), "unbounded sup in certificate");
                            margin -= gj * p.lower[j];
                        }
                    }
                    assert!(margin > dust, "certificate margin {margin} not positive on {p:?}");
                }
                LpStatus::Unbounded => {
                    let ray = r.ray.as_ref().unwrap();
                    // Ray must be feasible for the recession cone and improving.
                    let obj_step: f64 =
                        p.obj.iter().zip(ray).map(|(c, d)| c * d).sum();
                    match p.sense {
                        Sense::Minimize => assert!(obj_step < 1e-9),
                        Sense::Maximize => assert!(obj_step > -1e-9),
                    }
                    for row in &p.rows {
                        let step: f64 = row.entries.iter().map(|(c, a)| a * ray[*c]).sum();
                        match row.relation {
                            Relation::Le => assert!(step <= 1e-7),
                            Relation::Ge => assert!(step >= -1e-7),
                            Relation::Eq => assert!(step.abs() <= 1e-7),
                        }
                    }
                    for (j, d) in ray.iter().enumerate() {
                        if *d > 1e-9 {
                            assert!(p.upper[j].is_infinite());
                        } else if *d < -1e-9 {
                            assert!(p.lower[j].is_infinite());
                        }
                    }
                }
            }
        }
        assert!(optimal >= 40, "want a healthy share of optimal cases, got {optimal}");
    }

    #[test]
    fn lp_format_dump_contains_rows() {
        let mut p = LpProblem::new(Sense::Maximize);
        let x = p.add_var(1.0, 0.0, 2.0);
        p.add_row(Relation::Le, 1.5, &[(x, 1.0)]);
        let mut buf = Vec::new();
        write_lp_format(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("Maximize"));
        assert!(text.contains("r0:"));
        assert!(text.contains("Bounds"));
    }
}

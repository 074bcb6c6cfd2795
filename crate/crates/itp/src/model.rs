//! Core domain types: closed intervals, interval transportation instances,
//! scenarios, transport plans and dual vectors.

use serde::{Deserialize, Serialize};

use crate::tol;

/// A closed real interval `[lo, hi]`.
///
/// Serialized as a two-element array `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.lo, self.hi).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [lo, hi] = <[f64; 2]>::deserialize(d)?;
        Ok(Interval { lo, hi })
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    /// A degenerate interval `[v, v]`.
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    /// Membership test on the closed interval, exact bound comparison.
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

impl From<[f64; 2]> for Interval {
    fn from(b: [f64; 2]) -> Self {
        Interval { lo: b[0], hi: b[1] }
    }
}

/// Constraint mode of the supply rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Shipments from a source may not exceed its supply.
    #[serde(rename = "le")]
    SupplyLeq,
    /// Supplies must be depleted exactly.
    #[serde(rename = "eq")]
    SupplyEq,
}

/// Validation errors for instance data.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// Array shapes disagree with the declared dimensions.
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
    /// An interval with `lo > hi`.
    InvalidInterval { what: &'static str, index: (usize, usize), lo: f64, hi: f64 },
    /// A negative lower bound; all instance data must be non-negative.
    NegativeBound { what: &'static str, index: (usize, usize), lo: f64 },
}

impl std::fmt::Display for ModelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelError::DimensionMismatch { what, expected, got } => {
                write!(f, "{what}: expected {expected} entries, got {got}")
            }
            ModelError::InvalidInterval { what, index: (i, j), lo, hi } => {
                write!(f, "{what}[{i}][{j}]: invalid interval [{lo}, {hi}]")
            }
            ModelError::NegativeBound { what, index: (i, j), lo } => {
                write!(f, "{what}[{i}][{j}]: negative lower bound {lo}")
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// Unchecked instance data as read from a file or built by a generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawInstance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub mode: Mode,
    pub m: usize,
    pub n: usize,
    pub cost: Vec<Vec<Interval>>,
    pub supply: Vec<Interval>,
    pub demand: Vec<Interval>,
}

/// A validated interval transportation instance.
///
/// Holds an `m x n` matrix of cost intervals, `m` supply intervals and
/// `n` demand intervals, all non-negative, plus a constraint [`Mode`].
/// Instances are immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: Option<String>,
    mode: Mode,
    m: usize,
    n: usize,
    cost: Vec<Interval>, // row-major m*n
    supply: Vec<Interval>,
    demand: Vec<Interval>,
}

/// Validates raw data and builds an [`Instance`], enforcing shapes,
/// `lo <= hi` and non-negativity.
pub fn validate_instance(raw: RawInstance) -> Result<Instance, ModelError> {
    let RawInstance { name, mode, m, n, cost, supply, demand } = raw;
    if m == 0 {
        return Err(ModelError::DimensionMismatch { what: "m", expected: 1, got: 0 });
    }
    if n == 0 {
        return Err(ModelError::DimensionMismatch { what: "n", expected: 1, got: 0 });
    }
    if cost.len() != m {
        return Err(ModelError::DimensionMismatch { what: "cost rows", expected: m, got: cost.len() });
    }
    for (i, row) in cost.iter().enumerate() {
        if row.len() != n {
            return Err(ModelError::DimensionMismatch { what: "cost columns", expected: n, got: row.len() });
        }
        for (j, iv) in row.iter().enumerate() {
            check_interval("cost", (i, j), iv)?;
        }
    }
    if supply.len() != m {
        return Err(ModelError::DimensionMismatch { what: "supply", expected: m, got: supply.len() });
    }
    for (i, iv) in supply.iter().enumerate() {
        check_interval("supply", (i, 0), iv)?;
    }
    if demand.len() != n {
        return Err(ModelError::DimensionMismatch { what: "demand", expected: n, got: demand.len() });
    }
    for (j, iv) in demand.iter().enumerate() {
        check_interval("demand", (j, 0), iv)?;
    }
    Ok(Instance {
        name,
        mode,
        m,
        n,
        cost: cost.into_iter().flatten().collect(),
        supply,
        demand,
    })
}

fn check_interval(what: &'static str, index: (usize, usize), iv: &Interval) -> Result<(), ModelError> {
    if !iv.lo.is_finite() || !iv.hi.is_finite() || iv.lo > iv.hi {
        return Err(ModelError::InvalidInterval { what, index, lo: iv.lo, hi: iv.hi });
    }
    if iv.lo < 0.0 {
        return Err(ModelError::NegativeBound { what, index, lo: iv.lo });
    }
    Ok(())
}

impl Instance {
    /// Convenience constructor used in tests and examples; delegates to
    /// [`validate_instance`].
    pub fn new(
        mode: Mode,
        cost: Vec<Vec<Interval>>,
        supply: Vec<Interval>,
        demand: Vec<Interval>,
    ) -> Result<Self, ModelError> {
        let m = cost.len();
        let n = cost.first().map_or(0, |r| r.len());
        validate_instance(RawInstance { name: None, mode, m, n, cost, supply, demand })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn num_sources(&self) -> usize {
        self.m
    }

    pub fn num_destinations(&self) -> usize {
        self.n
    }

    pub fn cost(&self, i: usize, j: usize) -> Interval {
        self.cost[i * self.n + j]
    }

    pub fn supply(&self, i: usize) -> Interval {
        self.supply[i]
    }

    pub fn demand(&self, j: usize) -> Interval {
        self.demand[j]
    }

    pub fn supplies(&self) -> &[Interval] {
        &self.supply
    }

    pub fn demands(&self) -> &[Interval] {
        &self.demand
    }

    pub fn total_supply_lo(&self) -> f64 {
        self.supply.iter().map(|iv| iv.lo).sum()
    }

    pub fn total_supply_hi(&self) -> f64 {
        self.supply.iter().map(|iv| iv.hi).sum()
    }

    pub fn total_demand_lo(&self) -> f64 {
        self.demand.iter().map(|iv| iv.lo).sum()
    }

    pub fn total_demand_hi(&self) -> f64 {
        self.demand.iter().map(|iv| iv.hi).sum()
    }

    /// True iff all cost intervals are degenerate.
    pub fn has_fixed_costs(&self) -> bool {
        self.cost.iter().all(|iv| iv.is_point())
    }

    /// True iff supply and demand intervals are all degenerate.
    pub fn has_fixed_rhs(&self) -> bool {
        self.supply.iter().chain(self.demand.iter()).all(|iv| iv.is_point())
    }

    /// Reconstructs the raw form, e.g. for serialization.
    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            name: self.name.clone(),
            mode: self.mode,
            m: self.m,
            n: self.n,
            cost: (0..self.m)
                .map(|i| (0..self.n).map(|j| self.cost(i, j)).collect())
                .collect(),
            supply: self.supply.clone(),
            demand: self.demand.clone(),
        }
    }

    /// Scenario membership: component-wise containment in the closed
    /// interval boxes, exact comparison on bounds.
    pub fn contains_scenario(&self, sc: &Scenario) -> Result<bool, ModelError> {
        sc.check_dims(self.m, self.n)?;
        let cost_ok = (0..self.m).all(|i| (0..self.n).all(|j| self.cost(i, j).contains(sc.cost(i, j))));
        let supply_ok = (0..self.m).all(|i| self.supply[i].contains(sc.supply[i]));
        let demand_ok = (0..self.n).all(|j| self.demand[j].contains(sc.demand[j]));
        Ok(cost_ok && supply_ok && demand_ok)
    }

    /// Whether the scenario's right-hand side admits a feasible transport
    /// plan: total supply covers total demand (and matches it exactly in
    /// [`Mode::SupplyEq`]).
    pub fn scenario_feasibility_condition(&self, sc: &Scenario) -> bool {
        let s: f64 = sc.supply.iter().sum();
        let d: f64 = sc.demand.iter().sum();
        match self.mode {
            Mode::SupplyLeq => tol::ge(s, d),
            Mode::SupplyEq => tol::eq(s, d),
        }
    }
}

/// One realization `(c, s, d)` of the interval data.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    m: usize,
    n: usize,
    cost: Vec<f64>, // row-major
    pub supply: Vec<f64>,
    pub demand: Vec<f64>,
}

impl Scenario {
    pub fn new(cost: Vec<Vec<f64>>, supply: Vec<f64>, demand: Vec<f64>) -> Self {
        let m = cost.len();
        let n = cost.first().map_or(0, |r| r.len());
        assert!(cost.iter().all(|r| r.len() == n), "ragged cost matrix");
        Scenario { m, n, cost: cost.into_iter().flatten().collect(), supply, demand }
    }

    pub(crate) fn from_flat(m: usize, n: usize, cost: Vec<f64>, supply: Vec<f64>, demand: Vec<f64>) -> Self {
        debug_assert_eq!(cost.len(), m * n);
        Scenario { m, n, cost, supply, demand }
    }

    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.n + j]
    }

    pub fn cost_flat(&self) -> &[f64] {
        &self.cost
    }

    pub fn total_supply(&self) -> f64 {
        self.supply.iter().sum()
    }

    pub fn total_demand(&self) -> f64 {
        self.demand.iter().sum()
    }

    fn check_dims(&self, m: usize, n: usize) -> Result<(), ModelError> {
        if self.m != m || self.supply.len() != m {
            return Err(ModelError::DimensionMismatch { what: "scenario supply", expected: m, got: self.supply.len() });
        }
        if self.n != n || self.demand.len() != n {
            return Err(ModelError::DimensionMismatch { what: "scenario demand", expected: n, got: self.demand.len() });
        }
        Ok(())
    }
}

/// A transport plan: the `m x n` matrix of shipped quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    m: usize,
    n: usize,
    x: Vec<f64>, // row-major
}

impl TransportPlan {
    pub fn new(x: Vec<Vec<f64>>) -> Self {
        let m = x.len();
        let n = x.first().map_or(0, |r| r.len());
        assert!(x.iter().all(|r| r.len() == n), "ragged plan matrix");
        TransportPlan { m, n, x: x.into_iter().flatten().collect() }
    }

    pub(crate) fn from_flat(m: usize, n: usize, x: Vec<f64>) -> Self {
        debug_assert_eq!(x.len(), m * n);
        TransportPlan { m, n, x }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.n + j]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.x
    }

    /// Total shipped out of source `i`.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.x[i * self.n..(i + 1) * self.n].iter().sum()
    }

    /// Total shipped into destination `j`.
    pub fn col_sum(&self, j: usize) -> f64 {
        (0..self.m).map(|i| self.x[i * self.n + j]).sum()
    }

    /// Total amount of goods shipped.
    pub fn total(&self) -> f64 {
        self.x.iter().sum()
    }

    /// Objective value of the plan under the given cost matrix.
    pub fn cost_under(&self, sc: &Scenario) -> f64 {
        self.x.iter().zip(sc.cost_flat()).map(|(x, c)| x * c).sum()
    }
}

/// A dual vector pair: one multiplier per source (`u`) and one per
/// destination (`v`).
#[derive(Debug, Clone, PartialEq)]
pub struct DualPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl DualPair {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        DualPair { u, v }
    }

    /// Dual feasibility of the pair at the given costs: `u_i + v_j <= c_ij`
    /// everywhere, and `u <= 0` when supplies are upper bounds.
    pub fn is_feasible_for(&self, sc: &Scenario, mode: Mode) -> bool {
        let (m, n) = (self.u.len(), self.v.len());
        if mode == Mode::SupplyLeq && !self.u.iter().all(|&ui| tol::le(ui, 0.0)) {
            return false;
        }
        (0..m).all(|i| (0..n).all(|j| tol::le(self.u[i] + self.v[j], sc.cost(i, j))))
    }

    /// Dual objective value at the scenario's right-hand side.
    pub fn objective(&self, sc: &Scenario) -> f64 {
        let su: f64 = self.u.iter().zip(&sc.supply).map(|(u, s)| u * s).sum();
        let dv: f64 = self.v.iter().zip(&sc.demand).map(|(v, d)| v * d).sum();
        su + dv
    }
}

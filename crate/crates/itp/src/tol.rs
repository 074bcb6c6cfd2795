//! Shared numeric tolerances.
//!
//! One fixed absolute-on-scaled-data tolerance for feasibility and
//! equality checks, a relative tolerance for optimality claims, and a
//! tighter threshold for complementarity and active-set construction.

/// Feasibility / equality comparisons on scaled data.
pub const FEAS: f64 = 1e-9;

/// Relative tolerance for optimality claims (duality gaps, value equality).
pub const OPT: f64 = 1e-6;

/// Complementarity violation threshold.
pub const COMP: f64 = 1e-7;

/// Tight-row / zero-entry detection when building active sets.
pub const ACTIVE: f64 = 1e-7;

fn scale(a: f64, b: f64) -> f64 {
    1.0 + a.abs().max(b.abs())
}

/// `a == b` within the feasibility tolerance.
pub fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= FEAS * scale(a, b)
}

/// `a <= b` within the feasibility tolerance.
pub fn le(a: f64, b: f64) -> bool {
    a - b <= FEAS * scale(a, b)
}

/// `a >= b` within the feasibility tolerance.
pub fn ge(a: f64, b: f64) -> bool {
    b - a <= FEAS * scale(a, b)
}

/// `a == b` within the relative optimality tolerance.
pub fn opt_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= OPT * scale(a, b)
}

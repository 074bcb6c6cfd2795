/*!
Exact solver toolkit for interval transportation problems.

A transportation problem ships goods from `m` sources to `n` destinations
at minimum cost. Here every unit cost, supply and demand is only known to
lie in a closed interval, and each choice of concrete values inside the
boxes (a *scenario*) is an ordinary linear program. The toolkit answers
the questions that arise from that uncertainty:

* whether a given plan or the problem itself is feasible/optimal for
  *some* scenario (weakly) or for *every* scenario (strongly),
* the range of optimal values over scenarios — the best value, the worst
  value (possibly infinite), and the worst *finite* value taken over
  feasible scenarios only,
* an exact worst-finite value via two independent engines: brute-force
  enumeration of complementary-slackness patterns in rational arithmetic,
  and an LP-based branch-and-bound over the complementarity disjunctions.

The `examples/` directory has one runnable example per capability; the
`itp` binary exposes the same operations on instance files.
*/

// Index loops mirror the row/column structure of the math throughout;
// iterator rewrites would obscure it.
#![allow(clippy::needless_range_loop)]

pub mod bench;
pub mod generate;
pub mod io;
pub mod lp;
pub mod model;
pub mod properties;
pub mod tol;
pub mod value_range;
pub mod worst_finite;

mod scenario;

pub use lp::{solve_lp, Arithmetic, LpError, LpOutcome, LpProblem, LpStatus, Relation, Sense};
pub use model::{
    validate_instance, DualPair, Instance, Interval, Mode, ModelError, RawInstance, Scenario,
    TransportPlan,
};
pub use scenario::{complementarity_violation, solve_scenario, solve_scenario_with, ScenarioSolution};

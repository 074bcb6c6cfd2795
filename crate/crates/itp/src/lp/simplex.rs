//! Revised primal simplex with bounded variables.
//!
//! Two-phase method over an explicit dense basis inverse. Entering rule is
//! steepest reduced cost (Dantzig) with a switch to Bland's least-index
//! rule once the degenerate-pivot budget is exhausted, which guarantees
//! termination on the heavily degenerate transportation bases.

use super::number::Scalar;

/// Equality-standard-form problem: `A x = b` with per-column bounds,
/// minimization objective. Columns `0..nstruct` are the caller's
/// variables, the rest are row slacks (one per row, coefficient 1).
pub(crate) struct StdForm<T> {
    pub nrows: usize,
    pub ncols: usize,
    pub nstruct: usize,
    /// Sparse columns of `A` (row index, coefficient).
    pub cols: Vec<Vec<(usize, T)>>,
    /// `None` means unbounded below.
    pub lower: Vec<Option<T>>,
    /// `None` means unbounded above.
    pub upper: Vec<Option<T>>,
    pub obj: Vec<T>,
    pub rhs: Vec<T>,
}

pub(crate) enum SimplexStatus<T> {
    Optimal,
    /// Infeasible with row weights certifying an empty feasible set.
    Infeasible { farkas: Vec<T> },
    /// Unbounded with an improving feasible ray over all columns.
    Unbounded { ray: Vec<T> },
}

pub(crate) struct SimplexResult<T> {
    pub status: SimplexStatus<T>,
    /// Value per column (meaningful for `Optimal`).
    pub x: Vec<T>,
    /// One dual multiplier per row (meaningful for `Optimal`).
    pub duals: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SimplexError {
    IterationLimit,
    SingularBasis,
    Internal(&'static str),
}

#[derive(Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    FreeZero,
}

enum RatioOutcome<T> {
    Unbounded,
    BoundFlip { t: T },
    Pivot { t: T, row: usize },
}

pub(crate) fn solve_std<T: Scalar>(form: &StdForm<T>) -> Result<SimplexResult<T>, SimplexError> {
    Worker::new(form).run()
}

struct Worker<'a, T> {
    form: &'a StdForm<T>,
    nrows: usize,
    ncols: usize,
    art_cols: Vec<Vec<(usize, T)>>,
    art_lower: Vec<Option<T>>,
    art_upper: Vec<Option<T>>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    /// Dense row-major basis inverse.
    binv: Vec<T>,
    /// Values of the basic variables, aligned with `basis`.
    xb: Vec<T>,
    eps_pivot: T,
    eps_cost: T,
    degenerate_pivots: usize,
    bland: bool,
    pivots: usize,
    max_pivots: usize,
}

impl<'a, T: Scalar> Worker<'a, T> {
    fn new(form: &'a StdForm<T>) -> Self {
        let (eps_pivot, eps_cost) = if T::EXACT {
            (T::zero(), T::zero())
        } else {
            (T::from_f64(1e-10), T::from_f64(1e-9))
        };
        Worker {
            form,
            nrows: form.nrows,
            ncols: form.ncols,
            art_cols: Vec::new(),
            art_lower: Vec::new(),
            art_upper: Vec::new(),
            basis: Vec::new(),
            state: Vec::new(),
            binv: Vec::new(),
            xb: Vec::new(),
            eps_pivot,
            eps_cost,
            degenerate_pivots: 0,
            bland: false,
            pivots: 0,
            max_pivots: 1000 + 50 * (form.nrows + form.ncols),
        }
    }

    fn lower(&self, j: usize) -> &Option<T> {
        if j < self.ncols {
            &self.form.lower[j]
        } else {
            &self.art_lower[j - self.ncols]
        }
    }

    fn upper(&self, j: usize) -> &Option<T> {
        if j < self.ncols {
            &self.form.upper[j]
        } else {
            &self.art_upper[j - self.ncols]
        }
    }

    fn col(&self, j: usize) -> &[(usize, T)] {
        if j < self.ncols {
            &self.form.cols[j]
        } else {
            &self.art_cols[j - self.ncols]
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        matches!((self.lower(j), self.upper(j)), (Some(l), Some(u)) if l == u)
    }

    fn total_cols(&self) -> usize {
        self.ncols + self.art_cols.len()
    }

    /// Current value of any column.
    fn value_of(&self, j: usize) -> T {
        match self.state[j] {
            VarState::AtLower => self.lower(j).clone().expect("AtLower requires finite lower"),
            VarState::AtUpper => self.upper(j).clone().expect("AtUpper requires finite upper"),
            VarState::FreeZero => T::zero(),
            VarState::Basic(r) => self.xb[r].clone(),
        }
    }

    fn run(mut self) -> Result<SimplexResult<T>, SimplexError> {
        self.init_basis();

        if !self.art_cols.is_empty() {
            // Phase 1: minimize the total artificial infeasibility.
            let mut phase1_obj = vec![T::zero(); self.total_cols()];
            for k in self.ncols..self.total_cols() {
                phase1_obj[k] = T::one();
            }
            if self.iterate(&phase1_obj)?.is_some() {
                return Err(SimplexError::Internal("infeasibility phase reported unbounded"));
            }
            let infeas = self.objective_value(&phase1_obj);
            let feas_tol = if T::EXACT {
                T::zero()
            } else {
                let scale = self
                    .form
                    .rhs
                    .iter()
                    .fold(T::one(), |acc, b| if b.abs() > acc { b.abs() } else { acc });
                T::from_f64(1e-7) * scale
            };
            if infeas > feas_tol {
                let farkas = self.row_duals(&phase1_obj);
                return Ok(SimplexResult {
                    status: SimplexStatus::Infeasible { farkas },
                    x: Vec::new(),
                    duals: Vec::new(),
                });
            }
            self.retire_artificials()?;
        }

        let mut phase2_obj = self.form.obj.clone();
        phase2_obj.resize(self.total_cols(), T::zero());
        self.bland = false;
        self.degenerate_pivots = 0;
        if let Some(ray) = self.iterate(&phase2_obj)? {
            return Ok(SimplexResult {
                status: SimplexStatus::Unbounded { ray },
                x: Vec::new(),
                duals: Vec::new(),
            });
        }

        let x: Vec<T> = (0..self.ncols).map(|j| self.value_of(j)).collect();
        let duals = self.row_duals(&phase2_obj);
        Ok(SimplexResult { status: SimplexStatus::Optimal, x, duals })
    }

    /// Initial point: nonbasics rest at a finite bound (zero if free),
    /// each row gets its slack as the basic variable when the implied
    /// value fits the slack bounds, and an artificial column otherwise.
    fn init_basis(&mut self) {
        let ncols = self.ncols;
        self.state = (0..ncols)
            .map(|j| match (self.form.lower[j].as_ref(), self.form.upper[j].as_ref()) {
                (Some(_), _) => VarState::AtLower,
                (None, Some(_)) => VarState::AtUpper,
                (None, None) => VarState::FreeZero,
            })
            .collect();
        self.basis = vec![usize::MAX; self.nrows];
        self.xb = vec![T::zero(); self.nrows];
        self.binv = vec![T::zero(); self.nrows * self.nrows];

        // Row activity of the all-nonbasic point.
        let mut activity = vec![T::zero(); self.nrows];
        for j in 0..ncols {
            let v = self.value_of(j);
            if v.is_zero() {
                continue;
            }
            for (r, a) in self.col(j) {
                activity[*r] = activity[*r].clone() + a.clone() * v.clone();
            }
        }

        for i in 0..self.nrows {
            let slack = self.form.nstruct + i;
            // Value the slack would need to close the row.
            let candidate =
                self.form.rhs[i].clone() - (activity[i].clone() - self.value_of(slack));
            let fits_lower = self.form.lower[slack].as_ref().is_none_or(|l| *l <= candidate);
            let fits_upper = self.form.upper[slack].as_ref().is_none_or(|u| candidate <= *u);
            if fits_lower && fits_upper {
                self.basis[i] = slack;
                self.state[slack] = VarState::Basic(i);
                self.xb[i] = candidate;
                self.binv[i * self.nrows + i] = T::one();
            } else {
                // Park the slack at its nearest bound and patch with an artificial.
                let parked = if !fits_lower {
                    self.state[slack] = VarState::AtLower;
                    self.form.lower[slack].clone().unwrap()
                } else {
                    self.state[slack] = VarState::AtUpper;
                    self.form.upper[slack].clone().unwrap()
                };
                let resid = candidate - parked;
                let sign = if resid >= T::zero() { T::one() } else { -T::one() };
                let art = self.total_cols();
                self.art_cols.push(vec![(i, sign.clone())]);
                self.art_lower.push(Some(T::zero()));
                self.art_upper.push(None);
                self.state.push(VarState::Basic(i));
                self.basis[i] = art;
                self.xb[i] = resid.abs();
                // The initial basis is diagonal with entries +-1.
                self.binv[i * self.nrows + i] = sign;
            }
        }
    }

    fn objective_value(&self, obj: &[T]) -> T {
        let mut v = T::zero();
        for (j, c) in obj.iter().enumerate() {
            if !c.is_zero() {
                v = v + c.clone() * self.value_of(j);
            }
        }
        v
    }

    fn row_duals(&self, obj: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        for (r, jb) in self.basis.iter().enumerate() {
            let cb = obj[*jb].clone();
            if cb.is_zero() {
                continue;
            }
            for k in 0..self.nrows {
                let b = self.binv[r * self.nrows + k].clone();
                if !b.is_zero() {
                    y[k] = y[k].clone() + cb.clone() * b;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, obj: &[T], y: &[T], j: usize) -> T {
        let mut d = obj[j].clone();
        for (r, a) in self.col(j) {
            if !y[*r].is_zero() {
                d = d - y[*r].clone() * a.clone();
            }
        }
        d
    }

    /// Runs the simplex loop for the given objective. Returns `Some(ray)`
    /// when the problem is unbounded, `None` at optimality.
    fn iterate(&mut self, obj: &[T]) -> Result<Option<Vec<T>>, SimplexError> {
        loop {
            self.pivots += 1;
            if self.pivots > self.max_pivots {
                return Err(SimplexError::IterationLimit);
            }
            if !T::EXACT && self.pivots.is_multiple_of(64) {
                self.refactorize()?;
            }

            let y = self.row_duals(obj);
            let Some((col, dir)) = self.price(obj, &y) else {
                return Ok(None);
            };

            // w = B^-1 a_col
            let mut w = vec![T::zero(); self.nrows];
            for (r, a) in self.col(col) {
                for k in 0..self.nrows {
                    let b = self.binv[k * self.nrows + *r].clone();
                    if !b.is_zero() {
                        w[k] = w[k].clone() + b * a.clone();
                    }
                }
            }

            match self.ratio_test(col, &dir, &w) {
                RatioOutcome::Unbounded => {
                    return Ok(Some(self.build_ray(col, &dir, &w)));
                }
                RatioOutcome::BoundFlip { t } => {
                    for k in 0..self.nrows {
                        if !w[k].is_zero() {
                            self.xb[k] =
                                self.xb[k].clone() - dir.clone() * t.clone() * w[k].clone();
                        }
                    }
                    self.state[col] = match self.state[col] {
                        VarState::AtLower => VarState::AtUpper,
                        VarState::AtUpper => VarState::AtLower,
                        _ => return Err(SimplexError::Internal("flip on unbounded column")),
                    };
                }
                RatioOutcome::Pivot { t, row } => {
                    let degenerate =
                        t.is_zero() || (!T::EXACT && t.abs() <= T::from_f64(1e-12));
                    let leaving = self.basis[row];
                    let step = dir.clone() * w[row].clone();
                    self.state[leaving] = if step > T::zero() {
                        VarState::AtLower
                    } else {
                        VarState::AtUpper
                    };
                    let enter_val = self.value_of(col) + dir.clone() * t.clone();
                    for k in 0..self.nrows {
                        if k != row && !w[k].is_zero() {
                            self.xb[k] =
                                self.xb[k].clone() - dir.clone() * t.clone() * w[k].clone();
                        }
                    }
                    self.basis[row] = col;
                    self.state[col] = VarState::Basic(row);
                    self.xb[row] = enter_val;
                    self.update_binv(row, &w)?;

                    if degenerate {
                        self.degenerate_pivots += 1;
                        if self.degenerate_pivots > 3 * (self.nrows + self.total_cols()) {
                            self.bland = true;
                        }
                    }
                }
            }
        }
    }

    /// Entering column and movement direction, or `None` at optimality.
    fn price(&self, obj: &[T], y: &[T]) -> Option<(usize, T)> {
        let mut best: Option<(usize, T, T)> = None; // (col, dir, score)
        for j in 0..self.total_cols() {
            if matches!(self.state[j], VarState::Basic(_)) || self.is_fixed(j) {
                continue;
            }
            let d = self.reduced_cost(obj, y, j);
            let cand: Option<(T, T)> = match self.state[j] {
                VarState::AtLower => {
                    if d < -self.eps_cost.clone() {
                        Some((T::one(), -d))
                    } else {
                        None
                    }
                }
                VarState::AtUpper => {
                    if d > self.eps_cost {
                        Some((-T::one(), d))
                    } else {
                        None
                    }
                }
                VarState::FreeZero => {
                    if d < -self.eps_cost.clone() {
                        Some((T::one(), -d))
                    } else if d > self.eps_cost {
                        Some((-T::one(), d))
                    } else {
                        None
                    }
                }
                VarState::Basic(_) => None,
            };
            if let Some((dir, score)) = cand {
                if self.bland {
                    return Some((j, dir));
                }
                match &best {
                    Some((_, _, s)) if *s >= score => {}
                    _ => best = Some((j, dir, score)),
                }
            }
        }
        best.map(|(col, dir, _)| (col, dir))
    }

    fn ratio_test(&self, col: usize, dir: &T, w: &[T]) -> RatioOutcome<T> {
        // (step length, limiting row or None for the entering bound span)
        let mut limit: Option<(T, Option<usize>)> = None;
        if let (Some(l), Some(u)) = (self.lower(col), self.upper(col)) {
            limit = Some((u.clone() - l.clone(), None));
        }
        for r in 0..self.nrows {
            let step = dir.clone() * w[r].clone();
            let cand: Option<T> = if step > self.eps_pivot {
                self.lower(self.basis[r])
                    .as_ref()
                    .map(|lb| (self.xb[r].clone() - lb.clone()) / step.clone())
            } else if step < -self.eps_pivot.clone() {
                self.upper(self.basis[r])
                    .as_ref()
                    .map(|ub| (ub.clone() - self.xb[r].clone()) / (-step))
            } else {
                None
            };
            let Some(mut t) = cand else { continue };
            if t < T::zero() {
                // Numerical noise on a tight bound: treat as a degenerate step.
                t = T::zero();
            }
            let replace = match &limit {
                None => true,
                Some((tb, at)) => {
                    if t < *tb {
                        true
                    } else if t == *tb {
                        match at {
                            // Prefer a basis change over a bound flip on ties.
                            None => true,
                            Some(prev) => {
                                if self.bland {
                                    self.basis[r] < self.basis[*prev]
                                } else {
                                    w[r].abs() > w[*prev].abs()
                                }
                            }
                        }
                    } else {
                        false
                    }
                }
            };
            if replace {
                limit = Some((t, Some(r)));
            }
        }
        match limit {
            None => RatioOutcome::Unbounded,
            Some((t, None)) => RatioOutcome::BoundFlip { t },
            Some((t, Some(row))) => RatioOutcome::Pivot { t, row },
        }
    }

    fn build_ray(&self, col: usize, dir: &T, w: &[T]) -> Vec<T> {
        let mut ray = vec![T::zero(); self.ncols];
        if col < self.ncols {
            ray[col] = dir.clone();
        }
        for r in 0..self.nrows {
            let b = self.basis[r];
            if b < self.ncols && !w[r].is_zero() {
                ray[b] = -(dir.clone() * w[r].clone());
            }
        }
        ray
    }

    fn update_binv(&mut self, row: usize, w: &[T]) -> Result<(), SimplexError> {
        let piv = w[row].clone();
        if piv.is_zero() || (!T::EXACT && piv.abs() <= self.eps_pivot) {
            return Err(SimplexError::SingularBasis);
        }
        for k in 0..self.nrows {
            let idx = row * self.nrows + k;
            self.binv[idx] = self.binv[idx].clone() / piv.clone();
        }
        for r in 0..self.nrows {
            if r == row || w[r].is_zero() {
                continue;
            }
            let factor = w[r].clone();
            for k in 0..self.nrows {
                let pivot_entry = self.binv[row * self.nrows + k].clone();
                if !pivot_entry.is_zero() {
                    let idx = r * self.nrows + k;
                    self.binv[idx] = self.binv[idx].clone() - factor.clone() * pivot_entry;
                }
            }
        }
        Ok(())
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination with partial
    /// pivoting and recomputes the basic values, flushing accumulated
    /// floating-point drift.
    fn refactorize(&mut self) -> Result<(), SimplexError> {
        let n = self.nrows;
        let mut b = vec![T::zero(); n * n];
        for (pos, jb) in self.basis.iter().enumerate() {
            for (r, a) in self.col(*jb) {
                b[*r * n + pos] = a.clone();
            }
        }
        let mut inv = vec![T::zero(); n * n];
        for i in 0..n {
            inv[i * n + i] = T::one();
        }
        for c in 0..n {
            let mut piv_row = c;
            let mut piv_val = b[c * n + c].abs();
            for r in (c + 1)..n {
                let v = b[r * n + c].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val.is_zero() || (!T::EXACT && piv_val <= self.eps_pivot) {
                return Err(SimplexError::SingularBasis);
            }
            if piv_row != c {
                for k in 0..n {
                    b.swap(c * n + k, piv_row * n + k);
                    inv.swap(c * n + k, piv_row * n + k);
                }
            }
            let piv = b[c * n + c].clone();
            for k in 0..n {
                b[c * n + k] = b[c * n + k].clone() / piv.clone();
                inv[c * n + k] = inv[c * n + k].clone() / piv.clone();
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = b[r * n + c].clone();
                if f.is_zero() {
                    continue;
                }
                for k in 0..n {
                    b[r * n + k] = b[r * n + k].clone() - f.clone() * b[c * n + k].clone();
                    inv[r * n + k] = inv[r * n + k].clone() - f.clone() * inv[c * n + k].clone();
                }
            }
        }
        self.binv = inv;

        // xb = B^-1 (rhs - N x_N)
        let mut t = self.form.rhs.clone();
        for j in 0..self.total_cols() {
            if matches!(self.state[j], VarState::Basic(_)) {
                continue;
            }
            let v = self.value_of(j);
            if v.is_zero() {
                continue;
            }
            for (r, a) in self.col(j) {
                t[*r] = t[*r].clone() - a.clone() * v.clone();
            }
        }
        for r in 0..n {
            let mut acc = T::zero();
            for k in 0..n {
                let b = self.binv[r * n + k].clone();
                if !b.is_zero() {
                    acc = acc + b * t[k].clone();
                }
            }
            self.xb[r] = acc;
        }
        Ok(())
    }

    /// After phase 1: pivot zero-valued artificials out of the basis where
    /// possible and freeze every artificial at zero. An artificial left
    /// basic marks a linearly dependent row; pinned bounds keep it put.
    fn retire_artificials(&mut self) -> Result<(), SimplexError> {
        let solid_pivot = if T::EXACT { T::zero() } else { T::from_f64(1e-7) };
        for row in 0..self.nrows {
            if self.basis[row] < self.ncols {
                continue;
            }
            let mut found: Option<usize> = None;
            for j in 0..self.ncols {
                if matches!(self.state[j], VarState::Basic(_)) {
                    continue;
                }
                let mut wr = T::zero();
                for (r, a) in self.col(j) {
                    let b = self.binv[row * self.nrows + *r].clone();
                    if !b.is_zero() {
                        wr = wr + b * a.clone();
                    }
                }
                if wr.abs() > solid_pivot {
                    found = Some(j);
                    break;
                }
            }
            if let Some(j) = found {
                let mut w = vec![T::zero(); self.nrows];
                for (r, a) in self.col(j) {
                    for k in 0..self.nrows {
                        let b = self.binv[k * self.nrows + *r].clone();
                        if !b.is_zero() {
                            w[k] = w[k].clone() + b * a.clone();
                        }
                    }
                }
                let art = self.basis[row];
                let val = self.value_of(j);
                self.state[art] = VarState::AtLower;
                self.basis[row] = j;
                self.state[j] = VarState::Basic(row);
                self.xb[row] = val;
                self.update_binv(row, &w)?;
            }
        }
        for k in 0..self.art_cols.len() {
            self.art_upper[k] = Some(T::zero());
        }
        Ok(())
    }
}

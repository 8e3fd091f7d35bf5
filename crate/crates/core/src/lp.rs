//! Dense two-phase primal simplex.
//!
//! The model is brought into the form `min c'x, Ax = b, x >= 0, b >= 0` by
//! substituting fixed variables, shifting finite lower bounds, reflecting
//! variables with only an upper bound, splitting free variables, and adding
//! slack, surplus and artificial columns. Finite upper bounds on shifted
//! variables become explicit rows.
//!
//! Pricing is Dantzig (most negative reduced cost). When the objective fails
//! to improve for `rows + cols` consecutive pivots the phase switches to
//! Bland's rule for the rest of the phase. Once a phase-2 basis is optimal the
//! primal and dual values are recomputed from the original data with a fresh
//! LU factorization of the basis matrix.

use log::{debug, trace};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{LinearModel, Relation, VarKind};

pub const FEAS_TOL: f64 = 1e-7;
pub const OPT_TOL: f64 = 1e-7;
pub const PIVOT_TOL: f64 = 1e-10;
pub const BOUND_TOL: f64 = 1e-9;
const HARRIS_TOL: f64 = 1e-9;
const DROP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Where a model variable sits relative to the final basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Lower and upper bound coincide; the variable was substituted out.
    Fixed,
    /// Nonbasic free variable, sitting at zero.
    FreeZero,
}

#[derive(Debug, Clone, Serialize)]
pub struct LpResult {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub basis: Vec<VarStatus>,
    /// One multiplier per model row, in the model's sign convention
    /// (`<=` rows nonpositive, `>=` rows nonnegative for minimization).
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
    /// The bounds the LP was solved under, after relaxation and overrides.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Per-variable bound override `(index, lower, upper)`, intersected with
/// the model bounds.
pub type BoundOverride = (usize, f64, f64);

#[derive(Debug, Clone, Copy, Default)]
pub struct LpOptions {
    /// Treat binary columns as continuous in `[0, 1]`.
    pub relax_binaries: bool,
    /// Emit per-iteration trace logs.
    pub verbose: bool,
}

/// Solves the LP relaxation of `model`.
///
/// With `relax_binaries == false` every binary variable must be fixed by
/// `extra_bounds`, otherwise the call is rejected.
pub fn solve_lp(model: &LinearModel, relax_binaries: bool, extra_bounds: &[BoundOverride]) -> Result<LpResult> {
    solve_lp_with(
        model,
        LpOptions {
            relax_binaries,
            verbose: false,
        },
        extra_bounds,
    )
}

pub fn solve_lp_with(model: &LinearModel, opts: LpOptions, extra_bounds: &[BoundOverride]) -> Result<LpResult> {
    let nv = model.num_vars();
    let mut lower: Vec<f64> = model.variables().iter().map(|v| v.lower).collect();
    let mut upper: Vec<f64> = model.variables().iter().map(|v| v.upper).collect();
    for &(j, lo, hi) in extra_bounds {
        if j >= nv {
            return Err(Error::InvalidModel(format!("bound override for variable {j} out of range")));
        }
        lower[j] = lower[j].max(lo);
        upper[j] = upper[j].min(hi);
    }
    if !opts.relax_binaries {
        for (j, v) in model.variables().iter().enumerate() {
            if v.kind == VarKind::Binary && lower[j] != upper[j] {
                return Err(Error::InvalidModel(format!(
                    "binary {} must be fixed when relaxation is disabled",
                    v.name
                )));
            }
        }
    }

    let infeasible = |lower: Vec<f64>, upper: Vec<f64>| LpResult {
        status: LpStatus::Infeasible,
        values: vec![0.0; nv],
        objective: f64::INFINITY,
        basis: vec![],
        duals: vec![],
        reduced_costs: vec![],
        iterations: 0,
        lower,
        upper,
    };
    if (0..nv).any(|j| lower[j] > upper[j] + BOUND_TOL) {
        return Ok(infeasible(lower, upper));
    }
    for j in 0..nv {
        if lower[j] > upper[j] {
            upper[j] = lower[j];
        }
    }

    let sf = match StandardForm::build(model, &lower, &upper) {
        Some(sf) => sf,
        None => return Ok(infeasible(lower, upper)),
    };
    let mut tab = Tableau::new(&sf, opts.verbose);
    let cap = 50 * (sf.m + sf.ncols).max(1);

    // Phase 1.
    if sf.has_artificials() {
        tab.run(Phase::One, cap)?;
        let w = tab.obj_value(Phase::One);
        let scale = sf.b.iter().fold(1.0_f64, |acc, &v| acc.max(v.abs()));
        if w > FEAS_TOL * scale {
            debug!("phase 1 ended with infeasibility {w:.3e}");
            let mut r = infeasible(lower, upper);
            r.iterations = tab.iterations;
            return Ok(r);
        }
        tab.drive_out_artificials();
    }

    // Phase 2.
    match tab.run(Phase::Two, cap)? {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => {
            return Ok(LpResult {
                status: LpStatus::Unbounded,
                values: vec![0.0; nv],
                objective: f64::NEG_INFINITY,
                basis: vec![],
                duals: vec![],
                reduced_costs: vec![],
                iterations: tab.iterations,
                lower,
                upper,
            })
        }
    }

    let (col_values, row_duals) = tab.recompute(&sf);
    let values = sf.map_values(&col_values);
    let duals = sf.map_duals(model, &row_duals);
    let reduced_costs = reduced_costs(model, &duals);
    let basis = sf.var_statuses(&tab.basic_flags());
    let objective = model.objective_value(&values);
    debug!("LP optimal: obj={objective:.9} after {} iterations", tab.iterations);
    Ok(LpResult {
        status: LpStatus::Optimal,
        values,
        objective,
        basis,
        duals,
        reduced_costs,
        iterations: tab.iterations,
        lower,
        upper,
    })
}

/// `c_j - sum_r a_rj y_r` for every model variable.
pub fn reduced_costs(model: &LinearModel, duals: &[f64]) -> Vec<f64> {
    let mut d = vec![0.0; model.num_vars()];
    for &(j, c) in model.objective() {
        d[j] += c;
    }
    for (row, &y) in model.constraints().iter().zip(duals) {
        if y != 0.0 {
            for &(j, a) in &row.terms {
                d[j] -= a * y;
            }
        }
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Repr {
    Fixed,
    /// `x = lower + col`.
    Lower,
    /// `x = upper - col`.
    Upper,
    /// `x = pos - neg`.
    Free,
}

#[derive(Debug, Clone)]
struct VarMap {
    repr: Repr,
    offset: f64,
    col: usize,
    neg_col: usize,
    /// Standard-form row holding `col <= upper - lower`.
    bound_row: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowOrigin {
    /// Model row, and whether it was negated to make the rhs nonnegative.
    Model { index: usize, negated: bool },
    Bound,
}

struct StandardForm {
    m: usize,
    ncols: usize,
    /// Row-major `m x ncols` constraint matrix.
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    kinds: Vec<ColKind>,
    initial_basis: Vec<usize>,
    origins: Vec<RowOrigin>,
    vars: Vec<VarMap>,
}

impl StandardForm {
    /// Returns `None` when a row left without columns is violated.
    fn build(model: &LinearModel, lower: &[f64], upper: &[f64]) -> Option<Self> {
        let nv = model.num_vars();
        let mut vars = Vec::with_capacity(nv);
        let mut ncols = 0usize;
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();
        for j in 0..nv {
            let (lo, hi) = (lower[j], upper[j]);
            let vm = if lo == hi {
                VarMap { repr: Repr::Fixed, offset: lo, col: usize::MAX, neg_col: usize::MAX, bound_row: None }
            } else if lo.is_finite() {
                ncols += 1;
                let bound_row = if hi.is_finite() {
                    bound_rows.push((ncols - 1, hi - lo));
                    Some(bound_rows.len() - 1)
                } else {
                    None
                };
                VarMap { repr: Repr::Lower, offset: lo, col: ncols - 1, neg_col: usize::MAX, bound_row }
            } else if hi.is_finite() {
                ncols += 1;
                VarMap { repr: Repr::Upper, offset: hi, col: ncols - 1, neg_col: usize::MAX, bound_row: None }
            } else {
                ncols += 2;
                VarMap { repr: Repr::Free, offset: 0.0, col: ncols - 2, neg_col: ncols - 1, bound_row: None }
            };
            vars.push(vm);
        }
        let nstruct = ncols;

        // Sparse rows over structural columns first.
        let mut rows: Vec<(Vec<(usize, f64)>, Relation, f64, RowOrigin)> = Vec::new();
        for (ri, row) in model.constraints().iter().enumerate() {
            let mut terms: Vec<(usize, f64)> = Vec::with_capacity(row.terms.len());
            let mut rhs = row.rhs;
            for &(j, a) in &row.terms {
                let vm = &vars[j];
                match vm.repr {
                    Repr::Fixed => rhs -= a * vm.offset,
                    Repr::Lower => {
                        rhs -= a * vm.offset;
                        terms.push((vm.col, a));
                    }
                    Repr::Upper => {
                        rhs -= a * vm.offset;
                        terms.push((vm.col, -a));
                    }
                    Repr::Free => {
                        terms.push((vm.col, a));
                        terms.push((vm.neg_col, -a));
                    }
                }
            }
            if terms.is_empty() {
                let ok = match row.relation {
                    Relation::Le => rhs >= -FEAS_TOL,
                    Relation::Ge => rhs <= FEAS_TOL,
                    Relation::Eq => rhs.abs() <= FEAS_TOL,
                };
                if !ok {
                    debug!("row {} is empty after substitution and violated", row.label);
                    return None;
                }
                continue;
            }
            let (relation, negated) = if rhs < 0.0 {
                rhs = -rhs;
                for t in terms.iter_mut() {
                    t.1 = -t.1;
                }
                let flipped = match row.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (flipped, true)
            } else {
                (row.relation, false)
            };
            rows.push((terms, relation, rhs, RowOrigin::Model { index: ri, negated }));
        }
        let bound_row_base = rows.len();
        for &(col, width) in &bound_rows {
            rows.push((vec![(col, 1.0)], Relation::Le, width, RowOrigin::Bound));
        }
        for vm in vars.iter_mut() {
            if let Some(k) = vm.bound_row {
                vm.bound_row = Some(bound_row_base + k);
            }
        }

        let m = rows.len();
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let ncols = nstruct + n_slack + n_art;
        let mut a = vec![0.0; m * ncols];
        let mut b = vec![0.0; m];
        let mut kinds = vec![ColKind::Structural; nstruct];
        kinds.extend(std::iter::repeat(ColKind::Slack).take(n_slack));
        kinds.extend(std::iter::repeat(ColKind::Artificial).take(n_art));
        let mut initial_basis = vec![0; m];
        let mut origins = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (nstruct, nstruct + n_slack);
        for (i, (terms, rel, rhs, origin)) in rows.into_iter().enumerate() {
            let base = i * ncols;
            for (col, v) in terms {
                a[base + col] += v;
            }
            b[i] = rhs;
            match rel {
                Relation::Le => {
                    a[base + next_slack] = 1.0;
                    initial_basis[i] = next_slack;
                    next_slack += 1;
                }
                Relation::Ge => {
                    a[base + next_slack] = -1.0;
                    next_slack += 1;
                    a[base + next_art] = 1.0;
                    initial_basis[i] = next_art;
                    next_art += 1;
                }
                Relation::Eq => {
                    a[base + next_art] = 1.0;
                    initial_basis[i] = next_art;
                    next_art += 1;
                }
            }
            origins.push(origin);
        }

        let mut c = vec![0.0; ncols];
        for &(j, cj) in model.objective() {
            let vm = &vars[j];
            match vm.repr {
                Repr::Fixed => {}
                Repr::Lower => c[vm.col] += cj,
                Repr::Upper => c[vm.col] -= cj,
                Repr::Free => {
                    c[vm.col] += cj;
                    c[vm.neg_col] -= cj;
                }
            }
        }

        Some(Self { m, ncols, a, b, c, kinds, initial_basis, origins, vars })
    }

    fn has_artificials(&self) -> bool {
        self.kinds.contains(&ColKind::Artificial)
    }

    fn map_values(&self, cols: &[f64]) -> Vec<f64> {
        self.vars
            .iter()
            .map(|vm| match vm.repr {
                Repr::Fixed => vm.offset,
                Repr::Lower => vm.offset + cols[vm.col],
                Repr::Upper => vm.offset - cols[vm.col],
                Repr::Free => cols[vm.col] - cols[vm.neg_col],
            })
            .collect()
    }

    fn map_duals(&self, model: &LinearModel, row_duals: &[f64]) -> Vec<f64> {
        let mut duals = vec![0.0; model.num_constraints()];
        for (i, origin) in self.origins.iter().enumerate() {
            if let RowOrigin::Model { index, negated } = *origin {
                duals[index] = if negated { -row_duals[i] } else { row_duals[i] };
            }
        }
        duals
    }

    fn var_statuses(&self, basic: &[bool]) -> Vec<VarStatus> {
        self.vars
            .iter()
            .map(|vm| match vm.repr {
                Repr::Fixed => VarStatus::Fixed,
                Repr::Lower => {
                    if !basic[vm.col] {
                        VarStatus::AtLower
                    } else {
                        match vm.bound_row {
                            // The bound row's slack is nonbasic: the variable
                            // sits at its upper bound.
                            Some(r) if !self.row_slack_basic(r, basic) => VarStatus::AtUpper,
                            _ => VarStatus::Basic,
                        }
                    }
                }
                Repr::Upper => {
                    if basic[vm.col] {
                        VarStatus::Basic
                    } else {
                        VarStatus::AtUpper
                    }
                }
                Repr::Free => {
                    if basic[vm.col] || basic[vm.neg_col] {
                        VarStatus::Basic
                    } else {
                        VarStatus::FreeZero
                    }
                }
            })
            .collect()
    }

    fn row_slack_basic(&self, row: usize, basic: &[bool]) -> bool {
        let base = row * self.ncols;
        (0..self.ncols).any(|j| self.kinds[j] == ColKind::Slack && self.a[base + j] != 0.0 && basic[j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    ncols: usize,
    /// `m` constraint rows followed by the phase-2 and phase-1 reduced cost
    /// rows; each row has `ncols + 1` entries, the last being the rhs.
    t: Vec<f64>,
    basis: Vec<usize>,
    active: Vec<bool>,
    banned: Vec<bool>,
    iterations: usize,
    /// Phase 1 stops once the infeasibility sum reaches this level.
    phase1_target: f64,
    verbose: bool,
}

impl Tableau {
    fn new(sf: &StandardForm, verbose: bool) -> Self {
        let (m, n) = (sf.m, sf.ncols);
        let w = n + 1;
        let mut t = vec![0.0; (m + 2) * w];
        for i in 0..m {
            t[i * w..i * w + n].copy_from_slice(&sf.a[i * n..(i + 1) * n]);
            t[i * w + n] = sf.b[i];
        }
        // Reduced costs relative to the initial (slack/artificial) basis.
        let p2 = m * w;
        t[p2..p2 + n].copy_from_slice(&sf.c);
        let p1 = (m + 1) * w;
        for j in 0..n {
            if sf.kinds[j] == ColKind::Artificial {
                t[p1 + j] = 1.0;
            }
        }
        for i in 0..m {
            if sf.kinds[sf.initial_basis[i]] == ColKind::Artificial {
                for j in 0..=n {
                    t[p1 + j] -= t[i * w + j];
                }
            }
        }
        Self {
            m,
            ncols: n,
            t,
            basis: sf.initial_basis.clone(),
            active: vec![true; m],
            banned: sf.kinds.iter().map(|&k| k == ColKind::Artificial).collect(),
            iterations: 0,
            phase1_target: 1e-9 * sf.b.iter().fold(1.0_f64, |acc, &v| acc.max(v.abs())),
            verbose,
        }
    }

    fn width(&self) -> usize {
        self.ncols + 1
    }

    fn cost_row(&self, phase: Phase) -> usize {
        match phase {
            Phase::Two => self.m,
            Phase::One => self.m + 1,
        }
    }

    /// Current objective value of the given phase.
    fn obj_value(&self, phase: Phase) -> f64 {
        let w = self.width();
        -self.t[self.cost_row(phase) * w + self.ncols]
    }

    fn basic_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.ncols];
        for i in 0..self.m {
            if self.active[i] {
                flags[self.basis[i]] = true;
            }
        }
        flags
    }

    fn run(&mut self, phase: Phase, cap: usize) -> Result<PhaseEnd> {
        let w = self.width();
        let n = self.ncols;
        let crow = self.cost_row(phase) * w;
        let stall_limit = self.m + self.ncols;
        let mut stalled = 0usize;
        let mut bland = false;
        let allow_artificial = phase == Phase::One;
        loop {
            if phase == Phase::One && self.obj_value(phase) <= self.phase1_target {
                return Ok(PhaseEnd::Optimal);
            }
            if self.iterations >= cap {
                return Err(Error::NumericalBreakdown { iterations: self.iterations });
            }
            // Pricing.
            let mut enter = None;
            let mut best = -OPT_TOL;
            for j in 0..n {
                if self.banned[j] && !allow_artificial {
                    continue;
                }
                let d = self.t[crow + j];
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(e) = enter else {
                return Ok(PhaseEnd::Optimal);
            };

            let Some(r) = self.ratio_test(e, bland) else {
                return Ok(PhaseEnd::Unbounded);
            };

            let before = self.obj_value(phase);
            self.pivot(r, e);
            self.iterations += 1;
            let after = self.obj_value(phase);
            if self.verbose {
                trace!(
                    "{phase:?} it={} enter={e} leave_row={r} obj={after:.9}{}",
                    self.iterations,
                    if bland { " (bland)" } else { "" }
                );
            }
            if after < before - 1e-12 * (1.0 + before.abs()) {
                stalled = 0;
            } else {
                stalled += 1;
                if !bland && stalled >= stall_limit {
                    debug!("degeneracy detected after {} iterations, switching to Bland's rule", self.iterations);
                    bland = true;
                }
            }
        }
    }

    /// Two-pass ratio test. The first pass finds the step allowed when every
    /// basic value may go `HARRIS_TOL` below zero; the second picks the
    /// largest pivot among rows blocking within that step. Under Bland's rule
    /// ties go to the smallest basic index instead.
    fn ratio_test(&self, e: usize, bland: bool) -> Option<usize> {
        let w = self.width();
        let n = self.ncols;
        let rows = || {
            (0..self.m)
                .filter(|&i| self.active[i])
                .map(move |i| (i, self.t[i * w + e], self.t[i * w + n].max(0.0)))
                .filter(|&(_, a, _)| a > PIVOT_TOL)
        };
        if bland {
            let min = rows().map(|(_, a, b)| b / a).fold(f64::INFINITY, f64::min);
            let tie = 1e-12 * (1.0 + min.abs());
            return rows().filter(|&(_, a, b)| b / a <= min + tie).min_by_key(|&(i, _, _)| self.basis[i]).map(|r| r.0);
        }
        let bound = rows().map(|(_, a, b)| (b + HARRIS_TOL) / a).fold(f64::INFINITY, f64::min);
        rows()
            .filter(|&(_, a, b)| b / a <= bound)
            .max_by(|x, y| x.1.total_cmp(&y.1).then(y.0.cmp(&x.0)))
            .map(|r| r.0)
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.width();
        let rows = self.m + 2;
        let piv = self.t[r * w + e];
        let inv = 1.0 / piv;
        let mut nz: Vec<usize> = Vec::with_capacity(w);
        for j in 0..w {
            let v = &mut self.t[r * w + j];
            if *v != 0.0 {
                *v *= inv;
                nz.push(j);
            }
        }
        self.t[r * w + e] = 1.0;
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        let update = |row: &mut [f64]| {
            let f = row[e];
            if f != 0.0 {
                for &j in &nz {
                    let v = row[j] - f * prow[j];
                    row[j] = if v.abs() < DROP_TOL { 0.0 } else { v };
                }
                row[e] = 0.0;
            }
        };
        for row in before.chunks_exact_mut(w) {
            update(row);
        }
        for row in after.chunks_exact_mut(w).take(rows - r - 1) {
            update(row);
        }
        self.basis[r] = e;
    }

    /// Pivots basic artificials (at zero level) out of the basis, or marks
    /// their rows redundant when no structural or slack column can replace
    /// them.
    fn drive_out_artificials(&mut self) {
        let w = self.width();
        for i in 0..self.m {
            if !self.active[i] || !self.banned[self.basis[i]] {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.ncols {
                if self.banned[j] {
                    continue;
                }
                let a = self.t[i * w + j].abs();
                if a > 1e-9 && best.map_or(true, |(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            match best {
                Some((j, _)) => {
                    self.pivot(i, j);
                    self.iterations += 1;
                }
                None => {
                    self.active[i] = false;
                }
            }
        }
    }

    /// Recomputes basic values and row duals from the original data.
    ///
    /// Redundant rows keep their artificial basic, so the full basis is
    /// square and nonsingular.
    fn recompute(&self, sf: &StandardForm) -> (Vec<f64>, Vec<f64>) {
        let (m, w) = (self.m, self.width());
        let mut col_values = vec![0.0; self.ncols];
        let mut duals = vec![0.0; m];
        if m == 0 {
            return (col_values, duals);
        }
        let bmat = DMatrix::from_fn(m, m, |r, c| sf.a[r * sf.ncols + self.basis[c]]);
        let rhs = DVector::from_column_slice(&sf.b);
        let cb = DVector::from_iterator(m, self.basis.iter().map(|&j| sf.c[j]));
        let xb = bmat.clone().lu().solve(&rhs);
        let y = bmat.transpose().lu().solve(&cb);
        match (xb, y) {
            (Some(xb), Some(y)) if xb.iter().chain(y.iter()).all(|v| v.is_finite()) => {
                for i in 0..m {
                    col_values[self.basis[i]] = xb[i];
                    duals[i] = y[i];
                }
            }
            _ => {
                debug!("basis refactorization failed, using tableau values");
                for i in 0..m {
                    col_values[self.basis[i]] = self.t[i * w + self.ncols];
                    // The initial basis column of row i is e_i, so its
                    // reduced cost is c_j - y_i.
                    let j0 = sf.initial_basis[i];
                    duals[i] = sf.c[j0] - self.t[m * w + j0];
                }
            }
        }
        (col_values, duals)
    }
}

/// Outcome of [`verify_certificate`].
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub pass: bool,
    pub max_row_residual: f64,
    pub max_bound_violation: f64,
    pub min_reduced_cost_at_lower: f64,
    pub max_reduced_cost_at_upper: f64,
    pub objective_gap: f64,
    /// Human-readable description of each failed check, naming the row or
    /// variable.
    pub failures: Vec<String>,
}

/// Replays the optimality conditions of `result` against `model`.
///
/// Only model data and the reported primal values, duals and variable
/// statuses are used. Reduced costs are recomputed from the duals.
pub fn verify_certificate(model: &LinearModel, result: &LpResult) -> CertificateReport {
    let mut failures = Vec::new();
    let mut report = CertificateReport {
        pass: false,
        max_row_residual: 0.0,
        max_bound_violation: 0.0,
        min_reduced_cost_at_lower: f64::INFINITY,
        max_reduced_cost_at_upper: f64::NEG_INFINITY,
        objective_gap: 0.0,
        failures: Vec::new(),
    };
    if result.status != LpStatus::Optimal {
        report.failures.push(format!("status is {:?}, not optimal", result.status));
        return report;
    }
    let nv = model.num_vars();
    if result.values.len() != nv || result.duals.len() != model.num_constraints() || result.basis.len() != nv {
        report.failures.push("result dimensions do not match the model".into());
        return report;
    }
    let x = &result.values;

    for (j, var) in model.variables().iter().enumerate() {
        let (lo, hi) = (result.lower[j].max(var.lower), result.upper[j].min(var.upper));
        let v = (lo - x[j]).max(x[j] - hi).max(0.0);
        report.max_bound_violation = report.max_bound_violation.max(v);
        if v > BOUND_TOL {
            failures.push(format!("bound on {} violated by {v:.3e}", var.name));
        }
    }

    let obj = model.objective_value(x);
    let scale = 1.0_f64.max(obj.abs());
    for (row, &y) in model.constraints().iter().zip(&result.duals) {
        let act = row.activity(x);
        let slack = row.rhs - act;
        let residual = match row.relation {
            Relation::Eq => slack.abs(),
            Relation::Le => (-slack).max(0.0),
            Relation::Ge => slack.max(0.0),
        };
        report.max_row_residual = report.max_row_residual.max(residual);
        if residual > FEAS_TOL {
            failures.push(format!("row {} violated by {residual:.3e}", row.label));
        }
        let sign_ok = match row.relation {
            Relation::Eq => true,
            Relation::Le => y <= OPT_TOL,
            Relation::Ge => y >= -OPT_TOL,
        };
        if !sign_ok {
            failures.push(format!("dual of row {} has the wrong sign ({y:.3e})", row.label));
        }
        if row.relation != Relation::Eq && (y * slack).abs() > 1e-6 * scale {
            failures.push(format!(
                "complementary slackness fails on row {} (dual {y:.3e}, slack {slack:.3e})",
                row.label
            ));
        }
    }

    let d = reduced_costs(model, &result.duals);
    for (j, status) in result.basis.iter().enumerate() {
        let name = &model.variables()[j].name;
        match status {
            VarStatus::AtLower => {
                report.min_reduced_cost_at_lower = report.min_reduced_cost_at_lower.min(d[j]);
                if d[j] < -OPT_TOL {
                    failures.push(format!("reduced cost of {name} at lower bound is {:.3e}", d[j]));
                }
                if (x[j] - result.lower[j]).abs() > BOUND_TOL {
                    failures.push(format!("{name} is reported at its lower bound but is not"));
                }
            }
            VarStatus::AtUpper => {
                report.max_reduced_cost_at_upper = report.max_reduced_cost_at_upper.max(d[j]);
                if d[j] > OPT_TOL {
                    failures.push(format!("reduced cost of {name} at upper bound is {:.3e}", d[j]));
                }
                if (x[j] - result.upper[j]).abs() > BOUND_TOL {
                    failures.push(format!("{name} is reported at its upper bound but is not"));
                }
            }
            VarStatus::Basic | VarStatus::FreeZero => {
                if d[j].abs() > OPT_TOL {
                    failures.push(format!("reduced cost of basic {name} is {:.3e}", d[j]));
                }
            }
            VarStatus::Fixed => {}
        }
    }

    report.objective_gap = (obj - result.objective).abs();
    if report.objective_gap > 1e-9 * scale {
        failures.push(format!("reported objective differs from c'x by {:.3e}", report.objective_gap));
    }
    report.pass = failures.is_empty();
    report.failures = failures;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LinearModel;

    fn one_var(rel: Relation, rhs: f64, cost: f64) -> LinearModel {
        let mut m = LinearModel::new();
        let x = m.add_continuous("x");
        m.add_constraint("c", [(x, 1.0)], rel, rhs);
        m.set_objective([(x, cost)]);
        m
    }

    #[test]
    fn single_lower_bound_row() {
        let m = one_var(Relation::Ge, 3.0, 1.0);
        let r = solve_lp(&m, true, &[]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.values[0] - 3.0).abs() < 1e-12);
        assert!((r.objective - 3.0).abs() < 1e-12);
        assert!(verify_certificate(&m, &r).pass);
        assert!((r.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut m = one_var(Relation::Le, 1.0, 1.0);
        m.add_constraint("d", [(0, 1.0)], Relation::Ge, 2.0);
        assert_eq!(solve_lp(&m, true, &[]).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn ray_is_unbounded() {
        let mut m = LinearModel::new();
        let x = m.add_continuous("x");
        m.set_objective([(x, -1.0)]);
        assert_eq!(solve_lp(&m, true, &[]).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn perturbed_value_fails_named_row() {
        let m = one_var(Relation::Ge, 3.0, 1.0);
        let mut r = solve_lp(&m, true, &[]).unwrap();
        r.values[0] -= 1e-3;
        r.objective = m.objective_value(&r.values);
        let rep = verify_certificate(&m, &r);
        assert!(!rep.pass);
        assert!(rep.failures.iter().any(|f| f.contains("row c")), "{:?}", rep.failures);
    }

    #[test]
    fn free_and_upper_bounded_variables() {
        // min x + 2y - z  s.t.  x - y >= -4, x + y + z = 10, z <= 3 (bound), y free, x in [-5, 5]
        let mut m = LinearModel::new();
        let x = m.add_var("x", VarKind::Continuous, -5.0, 5.0);
        let y = m.add_free("y");
        let z = m.add_var("z", VarKind::Continuous, f64::NEG_INFINITY, 3.0);
        m.add_constraint("a", [(x, 1.0), (y, -1.0)], Relation::Ge, -4.0);
        m.add_constraint("b", [(x, 1.0), (y, 1.0), (z, 1.0)], Relation::Eq, 10.0);
        m.set_objective([(x, 1.0), (y, 2.0), (z, -1.0)]);
        let r = solve_lp(&m, true, &[]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        // Enumerated by hand over the vertices: x=5, y=2, z=3 gives 6.
        assert!((r.objective - 6.0).abs() < 1e-9, "{:?}", r.values);
        let rep = verify_certificate(&m, &r);
        assert!(rep.pass, "{:?}", rep.failures);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic Beale cycling example.
        let mut m = LinearModel::new();
        let x: Vec<usize> = (0..4).map(|i| m.add_continuous(format!("x{i}"))).collect();
        m.add_constraint("r1", [(x[0], 0.25), (x[1], -60.0), (x[2], -0.04), (x[3], 9.0)], Relation::Le, 0.0);
        m.add_constraint("r2", [(x[0], 0.5), (x[1], -90.0), (x[2], -0.02), (x[3], 3.0)], Relation::Le, 0.0);
        m.add_constraint("r3", [(x[2], 1.0)], Relation::Le, 1.0);
        m.set_objective([(x[0], -0.75), (x[1], 150.0), (x[2], -0.02), (x[3], 6.0)]);
        let r = solve_lp(&m, true, &[]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective + 0.05).abs() < 1e-9);
        assert!(verify_certificate(&m, &r).pass);
    }

    #[test]
    fn binaries_must_be_fixed_without_relaxation() {
        let mut m = LinearModel::new();
        let h = m.add_binary("h");
        m.set_objective([(h, 1.0)]);
        assert!(solve_lp(&m, false, &[]).is_err());
        let r = solve_lp(&m, false, &[(h, 1.0, 1.0)]).unwrap();
        assert_eq!(r.values, vec![1.0]);
        assert_eq!(r.basis, vec![VarStatus::Fixed]);
    }

    #[test]
    fn relaxed_binary_at_upper_bound() {
        let mut m = LinearModel::new();
        let h = m.add_binary("h");
        m.set_objective([(h, -2.0)]);
        let r = solve_lp(&m, true, &[]).unwrap();
        assert_eq!(r.values, vec![1.0]);
        assert_eq!(r.basis, vec![VarStatus::AtUpper]);
        assert!(verify_certificate(&m, &r).pass);
    }

    #[test]
    fn redundant_equalities() {
        let mut m = LinearModel::new();
        let x = m.add_continuous("x");
        let y = m.add_continuous("y");
        m.add_constraint("e1", [(x, 1.0), (y, 1.0)], Relation::Eq, 2.0);
        m.add_constraint("e2", [(x, 2.0), (y, 2.0)], Relation::Eq, 4.0);
        m.set_objective([(x, 1.0), (y, 3.0)]);
        let r = solve_lp(&m, true, &[]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 2.0).abs() < 1e-12);
        let rep = verify_certificate(&m, &r);
        assert!(rep.pass, "{:?}", rep.failures);
    }

    #[test]
    fn deterministic() {
        let mut m = LinearModel::new();
        let xs: Vec<usize> = (0..6).map(|i| m.add_continuous(format!("x{i}"))).collect();
        for i in 0..5 {
            m.add_constraint(format!("r{i}"), [(xs[i], 1.0), (xs[i + 1], 1.0)], Relation::Ge, 1.0 + i as f64);
        }
        m.set_objective(xs.iter().map(|&j| (j, 1.0 + j as f64 * 0.1)));
        let a = solve_lp(&m, true, &[]).unwrap();
        let b = solve_lp(&m, true, &[]).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.basis, b.basis);
    }
}

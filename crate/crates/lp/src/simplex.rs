//! Bounded-variable simplex on a dense tableau.
//!
//! Every row `a·x (rel) b` gets a logical column `s = -a·x` whose bounds
//! encode the relation, so the tableau starts from the identity basis and
//! variable bounds never become rows: a nonbasic column sits at one of its
//! bounds (or at zero when free). Rows are scaled to unit max-norm.
//!
//! Phase one minimizes the total bound violation of the basic columns;
//! phase two optimizes the objective. Pricing is Dantzig's largest
//! coefficient rule with a Harris two-pass ratio test. After a fixed streak
//! of degenerate pivots the solver switches to Bland's rule until a step of
//! positive length is taken.
//!
//! A solved tableau can be re-optimized after bound changes. When the basis
//! is still dual feasible the dual simplex restores primal feasibility,
//! which is what branch-and-bound relies on between nodes.

use crate::{LinearProgram, LpError, Relation, Sense};


/// Numerical tolerances for [`solve_lp`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpTolerances {
    /// Primal feasibility tolerance, scaled by `1 + |bound|`.
    pub feasibility: f64,
    /// Reduced-cost tolerance, relative to the largest objective coefficient.
    pub optimality: f64,
    /// Smallest admissible pivot element.
    pub pivot: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        Self { feasibility: 1e-9, optimality: 1e-9, pivot: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point. Meaningful for `Optimal`; for `Unbounded` it is the last
    /// vertex visited.
    pub x: Vec<f64>,
    /// Objective value in the program's own sense (`NaN` when infeasible,
    /// `±inf` when unbounded).
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const BLAND_STREAK: usize = 50;
/// Pivots smaller than this fraction of the largest candidate are refused.
const PIVOT_REL: f64 = 1e-7;
/// Entries smaller than this are flushed to zero after each pivot.
const DROP_TOL: f64 = 1e-12;
/// Scaled violation still accepted as feasible when no improving column is left.
const PHASE_ONE_TOL: f64 = 1e-7;
/// A pivot row with more than `1 / DENSE_SHARE` nonzeros is applied densely.
const DENSE_SHARE: usize = 4;
/// Tiny entries left by elimination are swept this often (in pivots).
const FLUSH_EVERY: usize = 64;
/// Share of the feasibility tolerance the Harris ratio test may spend, so that
/// its overshoot stays strictly inside what phase one calls feasible.
const HARRIS_SHARE: f64 = 0.5;
/// Basic values are recomputed from the nonbasic ones this often.
const REFRESH_EVERY: usize = 100;
/// Fresh restarts allowed when the final check finds drift.
const MAX_RESTARTS: usize = 5;

/// Solves `lp` with its own variable bounds.
pub fn solve_lp(lp: &LinearProgram, tol: &LpTolerances) -> Result<LpSolution, LpError> {
    solve_lp_with_bounds(lp, lp.lower(), lp.upper(), tol)
}

/// Solves `lp` with the variable bounds replaced by `lower` / `upper`.
pub fn solve_lp_with_bounds(
    lp: &LinearProgram,
    lower: &[f64],
    upper: &[f64],
    tol: &LpTolerances,
) -> Result<LpSolution, LpError> {
    let mut s = Simplex::new(lp, lower, upper, *tol)?;
    let status = s.optimize()?;
    Ok(s.solution(lp, status))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free column held at zero.
    Free,
}

enum Step {
    Flip(f64),
    Pivot { row: usize, t: f64, leave: State },
    Unbounded,
}

enum Outcome {
    Optimal,
    Unbounded,
}

/// Simplex state that survives between solves of the same rows.
pub(crate) struct Simplex {
    /// Structural column count.
    ns: usize,
    m: usize,
    /// Tableau width: structural then logical columns.
    w: usize,
    t: Vec<f64>,
    /// Phase-two reduced costs, kept current by every pivot.
    d: Vec<f64>,
    /// Minimization costs.
    cost: Vec<f64>,
    cost_scale: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    tol: LpTolerances,
    iterations: usize,
    empty_row_violated: bool,
    nz: Vec<(usize, f64)>,
    prow: Vec<f64>,
    pivots: usize,
}

fn resting_place(lo: f64, hi: f64) -> (State, f64) {
    if lo.is_finite() {
        (State::Lower, lo)
    } else if hi.is_finite() {
        (State::Upper, hi)
    } else {
        (State::Free, 0.0)
    }
}

impl Simplex {
    pub(crate) fn new(lp: &LinearProgram, lower: &[f64], upper: &[f64], tol: LpTolerances) -> Result<Self, LpError> {
        let ns = lp.num_vars();
        if lower.len() != ns || upper.len() != ns {
            return Err(LpError::Dimension(format!(
                "bound vectors have lengths {}/{} but the program has {ns} variables",
                lower.len(),
                upper.len()
            )));
        }
        let mut rows = Vec::with_capacity(lp.num_constraints());
        let mut empty_row_violated = false;
        let mut acc = vec![0.0; ns];
        let mut touched = Vec::new();
        for row in lp.constraints() {
            for &(j, a) in &row.coeffs {
                if j >= ns {
                    return Err(LpError::Dimension(format!("row references variable {j} but the program has {ns}")));
                }
                if acc[j] == 0.0 {
                    touched.push(j);
                }
                acc[j] += a;
            }
            touched.sort_unstable();
            touched.dedup();
            let mut coeffs = Vec::with_capacity(touched.len());
            for &j in &touched {
                if acc[j] != 0.0 {
                    coeffs.push((j, acc[j]));
                }
                acc[j] = 0.0;
            }
            touched.clear();
            if coeffs.is_empty() {
                let slack = tol.feasibility * (1.0 + row.rhs.abs());
                empty_row_violated |= match row.relation {
                    Relation::Le => row.rhs < -slack,
                    Relation::Ge => row.rhs > slack,
                    Relation::Eq => row.rhs.abs() > slack,
                };
                continue;
            }
            rows.push((coeffs, row.relation, row.rhs));
        }

        let m = rows.len();
        let w = ns + m;
        let mut t = vec![0.0; m * w];
        let mut lo = Vec::with_capacity(w);
        let mut hi = Vec::with_capacity(w);
        lo.extend_from_slice(lower);
        hi.extend_from_slice(upper);
        for (r, (coeffs, relation, rhs)) in rows.iter().enumerate() {
            let scale = 1.0 / coeffs.iter().fold(0.0f64, |a, c| a.max(c.1.abs()));
            let line = &mut t[r * w..(r + 1) * w];
            for &(j, a) in coeffs {
                line[j] = a * scale;
            }
            line[ns + r] = 1.0;
            let b = rhs * scale;
            let (l, h) = match relation {
                Relation::Le => (-b, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, -b),
                Relation::Eq => (-b, -b),
            };
            lo.push(l);
            hi.push(h);
        }

        let sign = match lp.sense() {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; w];
        for (c, &o) in cost.iter_mut().zip(lp.objective()) {
            *c = sign * o;
        }
        let cost_scale = cost.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let cost_scale = if cost_scale > 0.0 { cost_scale } else { 1.0 };

        let mut state = vec![State::Basic; w];
        let mut x = vec![0.0; w];
        for j in 0..ns {
            let (s, v) = resting_place(lo[j], hi[j]);
            state[j] = s;
            x[j] = v;
        }
        let basis = (ns..w).collect();
        let mut s = Self {
            ns,
            m,
            w,
            t,
            d: vec![0.0; w],
            cost,
            cost_scale,
            lo,
            hi,
            x,
            state,
            basis,
            tol,
            iterations: 0,
            empty_row_violated,
            nz: Vec::with_capacity(w),
            prow: Vec::with_capacity(w),
            pivots: 0,
        };
        s.refresh_values();
        s.refresh_duals();
        Ok(s)
    }

    pub(crate) fn x(&self) -> &[f64] {
        &self.x[..self.ns]
    }

    pub(crate) fn solution(&self, lp: &LinearProgram, status: LpStatus) -> LpSolution {
        let x = self.x().to_vec();
        let objective = match status {
            LpStatus::Optimal => lp.evaluate(&x),
            LpStatus::Infeasible => f64::NAN,
            LpStatus::Unbounded => match lp.sense() {
                Sense::Minimize => f64::NEG_INFINITY,
                Sense::Maximize => f64::INFINITY,
            },
        };
        LpSolution { status, x, objective, iterations: self.iterations }
    }

    pub(crate) fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lo[j], self.hi[j])
    }

    /// Replaces the bounds of structural column `j`, keeping the basis.
    pub(crate) fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        debug_assert!(j < self.ns);
        self.lo[j] = lo;
        self.hi[j] = hi;
        if self.state[j] != State::Basic {
            let (s, v) = if lo.is_finite() && hi.is_finite() && self.d[j] < 0.0 {
                (State::Upper, hi)
            } else {
                resting_place(lo, hi)
            };
            self.move_nonbasic(j, s, v);
        }
    }

    fn move_nonbasic(&mut self, j: usize, s: State, v: f64) {
        let delta = v - self.x[j];
        if delta != 0.0 {
            for r in 0..self.m {
                let a = self.t[r * self.w + j];
                if a != 0.0 {
                    self.x[self.basis[r]] -= a * delta;
                }
            }
        }
        self.x[j] = v;
        self.state[j] = s;
    }

    #[inline]
    fn ftol(&self, bound: f64) -> f64 {
        self.tol.feasibility * (1.0 + bound.abs())
    }

    /// Signed violation of column `c`: negative below `lo`, positive above `hi`.
    #[inline]
    fn violation(&self, c: usize, tol_factor: f64) -> f64 {
        let v = self.x[c];
        if v < self.lo[c] - tol_factor * self.ftol(self.lo[c]) {
            v - self.lo[c]
        } else if v > self.hi[c] + tol_factor * self.ftol(self.hi[c]) {
            v - self.hi[c]
        } else {
            0.0
        }
    }

    fn max_scaled_violation(&self) -> f64 {
        self.basis
            .iter()
            .map(|&b| {
                let v = self.violation(b, 0.0);
                let bound = if v < 0.0 { self.lo[b] } else { self.hi[b] };
                v.abs() / (1.0 + bound.abs())
            })
            .fold(0.0, f64::max)
    }

    fn refresh_values(&mut self) {
        let moved: Vec<(usize, f64)> =
            (0..self.w).filter(|&j| self.state[j] != State::Basic && self.x[j] != 0.0).map(|j| (j, self.x[j])).collect();
        for r in 0..self.m {
            let line = &self.t[r * self.w..(r + 1) * self.w];
            let v: f64 = moved.iter().map(|&(j, xj)| line[j] * xj).sum();
            self.x[self.basis[r]] = -v;
        }
    }

    fn refresh_duals(&mut self) {
        self.d.copy_from_slice(&self.cost);
        for r in 0..self.m {
            let cb = self.cost[self.basis[r]];
            if cb != 0.0 {
                let line = &self.t[r * self.w..(r + 1) * self.w];
                for (d, &a) in self.d.iter_mut().zip(line) {
                    *d -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            self.d[b] = 0.0;
        }
    }

    fn budget(&self) -> usize {
        20_000 + 20 * (self.m + self.w)
    }

    /// Optimizes from the current basis.
    pub(crate) fn optimize(&mut self) -> Result<LpStatus, LpError> {
        if self.empty_row_violated {
            return Ok(LpStatus::Infeasible);
        }
        for j in 0..self.ns {
            if self.lo[j] > self.hi[j] + self.ftol(self.hi[j]) {
                return Ok(LpStatus::Infeasible);
            }
        }
        self.refresh_values();
        self.refresh_duals();
        if self.max_scaled_violation() > 0.0 && self.make_dual_feasible() {
            if let Some(LpStatus::Infeasible) = self.dual()? {
                return Ok(LpStatus::Infeasible);
            }
        }
        self.primal()
    }

    /// Moves boxed nonbasic columns to the bound their reduced cost prefers.
    /// Returns `false` when some other column is dual infeasible.
    fn make_dual_feasible(&mut self) -> bool {
        let dtol = self.tol.optimality * self.cost_scale;
        let mut flips = Vec::new();
        for j in 0..self.w {
            let boxed = self.lo[j].is_finite() && self.hi[j].is_finite();
            match self.state[j] {
                State::Basic => {}
                State::Lower if self.d[j] < -dtol => {
                    if !boxed {
                        return false;
                    }
                    flips.push((j, State::Upper, self.hi[j]));
                }
                State::Upper if self.d[j] > dtol => {
                    if !boxed {
                        return false;
                    }
                    flips.push((j, State::Lower, self.lo[j]));
                }
                State::Free if self.d[j].abs() > dtol => return false,
                _ => {}
            }
        }
        for (j, s, v) in flips {
            self.move_nonbasic(j, s, v);
        }
        true
    }

    fn primal(&mut self) -> Result<LpStatus, LpError> {
        let start = self.iterations;
        for _ in 0..MAX_RESTARTS {
            if !self.phase_one(start)? {
                return Ok(LpStatus::Infeasible);
            }
            if let Outcome::Unbounded = self.phase_two(start)? {
                return Ok(LpStatus::Unbounded);
            }
            self.refresh_values();
            self.refresh_duals();
            let dtol = self.tol.optimality * self.cost_scale;
            if self.max_scaled_violation() <= PHASE_ONE_TOL && self.entering(&self.d, dtol, false).is_none() {
                return Ok(LpStatus::Optimal);
            }
        }
        Err(LpError::NumericalFailure { iterations: self.iterations })
    }

    /// Returns `false` when the rows are infeasible.
    fn phase_one(&mut self, start: usize) -> Result<bool, LpError> {
        let mut d1 = vec![0.0; self.w];
        let mut streak = 0;
        loop {
            d1.iter_mut().for_each(|v| *v = 0.0);
            let mut any = false;
            for r in 0..self.m {
                let viol = self.violation(self.basis[r], 1.0);
                if viol != 0.0 {
                    let g = viol.signum();
                    any = true;
                    let line = &self.t[r * self.w..(r + 1) * self.w];
                    for (d, &a) in d1.iter_mut().zip(line) {
                        *d -= g * a;
                    }
                }
            }
            if !any || (streak >= BLAND_STREAK && self.max_scaled_violation() <= PHASE_ONE_TOL) {
                return Ok(true);
            }
            for &b in &self.basis {
                d1[b] = 0.0;
            }
            let bland = streak >= BLAND_STREAK;
            let Some((e, dir)) = self.entering(&d1, self.tol.optimality, bland) else {
                return Ok(self.max_scaled_violation() <= PHASE_ONE_TOL);
            };
            let step = self.ratio_test(e, dir, true, bland);
            let t = match step {
                Step::Flip(t) | Step::Pivot { t, .. } => t,
                Step::Unbounded => return Err(LpError::NumericalFailure { iterations: self.iterations }),
            };
            self.apply(e, dir, step);
            streak = if t <= self.tol.feasibility { streak + 1 } else { 0 };
            self.tick(start)?;
        }
    }

    fn phase_two(&mut self, start: usize) -> Result<Outcome, LpError> {
        self.refresh_duals();
        let dtol = self.tol.optimality * self.cost_scale;
        let mut streak = 0;
        loop {
            let bland = streak >= BLAND_STREAK;
            let Some((e, dir)) = self.entering(&self.d, dtol, bland) else {
                return Ok(Outcome::Optimal);
            };
            let step = self.ratio_test(e, dir, false, bland);
            let t = match step {
                Step::Flip(t) | Step::Pivot { t, .. } => t,
                Step::Unbounded => return Ok(Outcome::Unbounded),
            };
            self.apply(e, dir, step);
            streak = if t <= self.tol.feasibility { streak + 1 } else { 0 };
            self.tick(start)?;
        }
    }

    fn tick(&mut self, start: usize) -> Result<(), LpError> {
        self.iterations += 1;
        if self.iterations - start > self.budget() {
            return Err(LpError::NumericalFailure { iterations: self.iterations });
        }
        if self.iterations.is_multiple_of(REFRESH_EVERY) {
            self.refresh_values();
        }
        Ok(())
    }

    /// Entering column and direction (`+1` increase, `-1` decrease).
    fn entering(&self, d: &[f64], dtol: f64, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.w {
            let dir = match self.state[j] {
                State::Basic => continue,
                _ if self.hi[j] - self.lo[j] <= 0.0 => continue,
                State::Lower if d[j] < -dtol => 1.0,
                State::Upper if d[j] > dtol => -1.0,
                State::Free if d[j].abs() > dtol => -d[j].signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            let score = d[j].abs();
            if score > best_score {
                best_score = score;
                best = Some((j, dir));
            }
        }
        best
    }

    fn ratio_test(&self, e: usize, dir: f64, phase_one: bool, bland: bool) -> Step {
        let range = self.hi[e] - self.lo[e];
        // (row, exact ratio, relaxed ratio, |alpha|, leaving state)
        let mut cands: Vec<(usize, f64, f64, f64, State)> = Vec::new();
        let col_max = (0..self.m).fold(0.0f64, |a, r| a.max(self.t[r * self.w + e].abs()));
        let min_pivot = self.tol.pivot.max(PIVOT_REL * col_max);
        for r in 0..self.m {
            let alpha = self.t[r * self.w + e];
            if alpha.abs() <= min_pivot {
                continue;
            }
            let rate = -alpha * dir;
            let b = self.basis[r];
            let v = self.x[b];
            let (dist, bound, leave) = if rate < 0.0 {
                if phase_one && v > self.hi[b] + self.ftol(self.hi[b]) {
                    (v - self.hi[b], self.hi[b], State::Upper)
                } else if phase_one && v < self.lo[b] - self.ftol(self.lo[b]) {
                    continue;
                } else if self.lo[b].is_finite() {
                    (v - self.lo[b], self.lo[b], State::Lower)
                } else {
                    continue;
                }
            } else if phase_one && v < self.lo[b] - self.ftol(self.lo[b]) {
                (self.lo[b] - v, self.lo[b], State::Lower)
            } else if phase_one && v > self.hi[b] + self.ftol(self.hi[b]) {
                continue;
            } else if self.hi[b].is_finite() {
                (self.hi[b] - v, self.hi[b], State::Upper)
            } else {
                continue;
            };
            let speed = rate.abs();
            let dist = dist.max(0.0);
            cands.push((r, dist / speed, (dist + HARRIS_SHARE * self.ftol(bound)) / speed, alpha.abs(), leave));
        }
        if bland {
            let mut best: Option<(usize, f64, State)> = None;
            for &(r, ratio, _, _, leave) in &cands {
                let better = match best {
                    None => true,
                    Some((br, bv, _)) => {
                        ratio < bv - DROP_TOL * (1.0 + bv)
                            || (ratio <= bv + DROP_TOL * (1.0 + bv) && self.basis[r] < self.basis[br])
                    }
                };
                if better {
                    best = Some((r, ratio, leave));
                }
            }
            return match best {
                Some((_, t, _)) if range <= t => Step::Flip(range),
                Some((row, t, leave)) => Step::Pivot { row, t, leave },
                None if range.is_finite() => Step::Flip(range),
                None => Step::Unbounded,
            };
        }
        let theta = cands.iter().fold(f64::INFINITY, |a, c| a.min(c.2));
        if range <= theta {
            return if range.is_finite() { Step::Flip(range) } else { Step::Unbounded };
        }
        let mut best: Option<(usize, f64, f64, State)> = None;
        for &(r, ratio, _, size, leave) in &cands {
            if ratio <= theta && best.is_none_or(|b| size > b.2) {
                best = Some((r, ratio, size, leave));
            }
        }
        let (row, t, _, leave) = best.expect("theta comes from a candidate");
        Step::Pivot { row, t, leave }
    }

    fn apply(&mut self, e: usize, dir: f64, step: Step) {
        let w = self.w;
        let (t, pivot) = match step {
            Step::Flip(t) => (t, None),
            Step::Pivot { row, t, leave } => (t, Some((row, leave))),
            Step::Unbounded => unreachable!("unbounded steps are not applied"),
        };
        if t != 0.0 {
            for r in 0..self.m {
                let a = self.t[r * w + e];
                if a != 0.0 {
                    self.x[self.basis[r]] -= a * dir * t;
                }
            }
        }
        match pivot {
            None => {
                let (s, v) = if dir > 0.0 { (State::Upper, self.hi[e]) } else { (State::Lower, self.lo[e]) };
                self.state[e] = s;
                self.x[e] = v;
            }
            Some((row, leave)) => {
                self.x[e] += dir * t;
                let b = self.basis[row];
                self.x[b] = if leave == State::Lower { self.lo[b] } else { self.hi[b] };
                self.state[b] = leave;
                self.state[e] = State::Basic;
                self.pivot(row, e);
            }
        }
    }

    /// Dual simplex from a dual feasible basis. `None` means it gave up and
    /// the primal method should take over.
    fn dual(&mut self) -> Result<Option<LpStatus>, LpError> {
        let start = self.iterations;
        let dtol = self.tol.optimality * self.cost_scale;
        let w = self.w;
        let mut streak = 0;
        loop {
            if self.iterations - start > self.budget() {
                return Ok(None);
            }
            let bland = streak >= BLAND_STREAK;
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let b = self.basis[r];
                let viol = self.violation(b, 1.0);
                if viol == 0.0 {
                    continue;
                }
                let better = match leaving {
                    None => true,
                    Some((br, bv)) => {
                        if bland {
                            b < self.basis[br]
                        } else {
                            viol.abs() > bv.abs()
                        }
                    }
                };
                if better {
                    leaving = Some((r, viol));
                }
            }
            let Some((r, viol)) = leaving else {
                return Ok(Some(LpStatus::Optimal));
            };
            let b = self.basis[r];
            // Below its lower bound the basic column must rise.
            let rise = viol < 0.0;
            let line = &self.t[r * w..(r + 1) * w];
            let mut cands: Vec<(usize, f64, f64, f64)> = Vec::new();
            let row_max = line.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let min_pivot = self.tol.pivot.max(PIVOT_REL * row_max);
            for j in 0..w {
                let s = self.state[j];
                if s == State::Basic || self.hi[j] - self.lo[j] <= 0.0 {
                    continue;
                }
                let alpha = line[j];
                if alpha.abs() <= min_pivot {
                    continue;
                }
                let dir = if rise { -alpha.signum() } else { alpha.signum() };
                let dj = match s {
                    State::Lower if dir > 0.0 => self.d[j].max(0.0),
                    State::Upper if dir < 0.0 => (-self.d[j]).max(0.0),
                    State::Free => self.d[j].abs(),
                    _ => continue,
                };
                cands.push((j, dj / alpha.abs(), (dj + dtol) / alpha.abs(), alpha.abs()));
            }
            let chosen = if bland {
                cands.iter().fold(None::<(usize, f64)>, |acc, c| match acc {
                    Some((_, bv)) if c.1 >= bv - DROP_TOL * (1.0 + bv) => acc,
                    _ => Some((c.0, c.1)),
                })
            } else {
                let theta = cands.iter().fold(f64::INFINITY, |a, c| a.min(c.2));
                cands
                    .iter()
                    .filter(|c| c.1 <= theta)
                    .fold(None::<(usize, f64, f64)>, |acc, c| match acc {
                        Some((_, _, size)) if c.3 <= size => acc,
                        _ => Some((c.0, c.1, c.3)),
                    })
                    .map(|(j, ratio, _)| (j, ratio))
            };
            let Some((e, ratio)) = chosen else {
                let bound = if rise { self.lo[b] } else { self.hi[b] };
                if viol.abs() / (1.0 + bound.abs()) <= PHASE_ONE_TOL {
                    return Ok(None);
                }
                return Ok(Some(LpStatus::Infeasible));
            };
            let (target, leave) = if rise { (self.lo[b], State::Lower) } else { (self.hi[b], State::Upper) };
            let alpha = self.t[r * w + e];
            let delta = (self.x[b] - target) / alpha;
            for i in 0..self.m {
                let a = self.t[i * w + e];
                if a != 0.0 {
                    self.x[self.basis[i]] -= a * delta;
                }
            }
            self.x[e] += delta;
            self.x[b] = target;
            self.state[b] = leave;
            self.state[e] = State::Basic;
            self.pivot(r, e);
            streak = if ratio <= dtol { streak + 1 } else { 0 };
            self.iterations += 1;
            if self.iterations.is_multiple_of(REFRESH_EVERY) {
                self.refresh_values();
            }
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.w;
        let mut nz = std::mem::take(&mut self.nz);
        nz.clear();
        let mut prow = std::mem::take(&mut self.prow);
        {
            let line = &mut self.t[r * w..(r + 1) * w];
            let inv = 1.0 / line[e];
            for (c, v) in line.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v *= inv;
                    if v.abs() < DROP_TOL {
                        *v = 0.0;
                    } else {
                        nz.push((c, *v));
                    }
                }
            }
            line[e] = 1.0;
            prow.clear();
            prow.extend_from_slice(line);
        }
        let dense = nz.len() * DENSE_SHARE > w;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + e];
            if f == 0.0 {
                continue;
            }
            let line = &mut self.t[i * w..(i + 1) * w];
            if dense {
                for (a, &b) in line.iter_mut().zip(&prow) {
                    *a -= f * b;
                }
            } else {
                for &(c, v) in &nz {
                    line[c] -= f * v;
                }
            }
            line[e] = 0.0;
        }
        let f = self.d[e];
        if f != 0.0 {
            for &(c, v) in &nz {
                self.d[c] -= f * v;
            }
        }
        self.d[e] = 0.0;
        self.basis[r] = e;
        self.nz = nz;
        self.prow = prow;
        self.pivots += 1;
        if self.pivots.is_multiple_of(FLUSH_EVERY) {
            for v in &mut self.t {
                if v.abs() < DROP_TOL {
                    *v = 0.0;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> LpTolerances {
        LpTolerances::default()
    }

    #[test]
    fn box_maximum() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let a = lp.add_var("a", 0.0, f64::INFINITY, 1.0);
        let b = lp.add_var("b", 0.0, f64::INFINITY, 1.0);
        lp.add_constraint(vec![(a, 1.0)], Relation::Le, 1.0);
        lp.add_constraint(vec![(b, 1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-12);
        assert_eq!(sol.x, vec![1.0, 1.0]);
    }

    #[test]
    fn contradictory_row_is_infeasible() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let a = lp.add_var("a", 0.0, f64::INFINITY, 1.0);
        lp.add_constraint(vec![(a, 1.0)], Relation::Le, -1.0);
        assert_eq!(solve_lp(&lp, &tol()).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let a = lp.add_var("a", 0.0, f64::INFINITY, 1.0);
        let b = lp.add_var("b", 0.0, f64::INFINITY, 0.0);
        lp.add_constraint(vec![(a, 1.0), (b, -1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        assert_eq!(sol.objective, f64::INFINITY);
    }

    #[test]
    fn free_and_upper_bounded_variables() {
        // min a - b  s.t. a + b = 1, a free, b <= 3
        let mut lp = LinearProgram::new(Sense::Minimize);
        let a = lp.add_var("a", f64::NEG_INFINITY, f64::INFINITY, 1.0);
        let b = lp.add_var("b", f64::NEG_INFINITY, 3.0, -1.0);
        lp.add_constraint(vec![(a, 1.0), (b, 1.0)], Relation::Eq, 1.0);
        let sol = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] + 2.0).abs() < 1e-12);
        assert!((sol.x[1] - 3.0).abs() < 1e-12);
        assert!((sol.objective + 5.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities_are_tolerated() {
        // x + y = 1 stated twice, plus 2x + 2y = 2.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", 0.0, f64::INFINITY, 1.0);
        let y = lp.add_var("y", 0.0, f64::INFINITY, 2.0);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Eq, 1.0);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Eq, 1.0);
        lp.add_constraint(vec![(x, 2.0), (y, 2.0)], Relation::Eq, 2.0);
        let sol = solve_lp(&lp, &tol()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_variables_stay_put() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x", 2.0, 2.0, 1.0);
        let y = lp.add_var("y", 0.0, 10.0, 1.0);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Le, 5.0);
        let sol = solve_lp(&lp, &tol()).unwrap();
        assert!((sol.objective - 5.0).abs() < 1e-12);
        assert_eq!(sol.x[0], 2.0);
    }

    #[test]
    fn violated_empty_row() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        lp.add_var("x", 0.0, 1.0, 0.0);
        lp.add_constraint(vec![], Relation::Ge, 2.0);
        assert_eq!(solve_lp(&lp, &tol()).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        lp.add_var("x", 0.0, 1.0, 1.0);
        let sol = solve_lp_with_bounds(&lp, &[1.0], &[0.0], &tol()).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn bound_changes_reoptimize_from_the_last_basis() {
        // max 5a + 4b + 3c  s.t. 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8
        let mut lp = LinearProgram::new(Sense::Maximize);
        let v: Vec<usize> = [5.0, 4.0, 3.0].iter().enumerate().map(|(i, &c)| lp.add_var(format!("v{i}"), 0.0, 10.0, c)).collect();
        lp.add_constraint(vec![(v[0], 2.0), (v[1], 3.0), (v[2], 1.0)], Relation::Le, 5.0);
        lp.add_constraint(vec![(v[0], 4.0), (v[1], 1.0), (v[2], 2.0)], Relation::Le, 11.0);
        lp.add_constraint(vec![(v[0], 3.0), (v[1], 4.0), (v[2], 2.0)], Relation::Le, 8.0);
        let mut s = Simplex::new(&lp, lp.lower(), lp.upper(), tol()).unwrap();
        assert_eq!(s.optimize().unwrap(), LpStatus::Optimal);
        assert!((lp.evaluate(s.x()) - 13.0).abs() < 1e-9);
        for (lo, hi) in [(0.0, 1.0), (1.0, 1.0), (0.0, 0.0), (3.0, 10.0), (0.0, 10.0)] {
            s.set_bounds(v[0], lo, hi);
            let warm = s.optimize().unwrap();
            let mut lower = lp.lower().to_vec();
            let mut upper = lp.upper().to_vec();
            lower[v[0]] = lo;
            upper[v[0]] = hi;
            let cold = solve_lp_with_bounds(&lp, &lower, &upper, &tol()).unwrap();
            assert_eq!(warm, cold.status);
            if warm == LpStatus::Optimal {
                assert!((lp.evaluate(s.x()) - cold.objective).abs() < 1e-9, "bounds [{lo}, {hi}]");
            }
        }
    }
}

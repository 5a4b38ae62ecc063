//! Two-phase bounded-variable primal simplex with a dense basis inverse.

use super::{LinearProgram, LpError, Relation, SolveResult, SolveStatus, SolverOptions};
use crate::Scalar;

/// Solves the continuous relaxation of `lp` (binary flags are ignored, their
/// [0,1] bounds kept).
pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> Result<SolveResult<S>, LpError> {
    solve_lp_with(lp, &SolverOptions::default())
}

pub fn solve_lp_with<S: Scalar>(
    lp: &LinearProgram<S>,
    opts: &SolverOptions,
) -> Result<SolveResult<S>, LpError> {
    lp.validate()?;
    let lower: Vec<S> = lp.vars.iter().map(|v| v.lower).collect();
    let upper: Vec<S> = lp.vars.iter().map(|v| v.upper).collect();
    Ok(solve_bounded(lp, &lower, &upper, false, opts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    Free,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterLimit,
    Singular,
}

struct Simplex<S> {
    m: usize,
    n_struct: usize,
    cols: Vec<Vec<(usize, S)>>,
    lower: Vec<S>,
    upper: Vec<S>,
    b: Vec<S>,
    x: Vec<S>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Row-major `m x m` inverse of the basis matrix.
    binv: Vec<S>,
    pivots: usize,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
    opts: SolverOptions,
}

/// Final basis of an optimal solve, reusable as a starting point after bound
/// changes.
#[derive(Debug, Clone)]
pub(crate) struct Basis {
    basis: Vec<usize>,
    state: Vec<VarState>,
}

/// Core entry point shared with branch-and-bound: solves `lp` with the given
/// variable bounds in place of the program's own.
pub(crate) fn solve_bounded<S: Scalar>(
    lp: &LinearProgram<S>,
    lower: &[S],
    upper: &[S],
    phase1_only: bool,
    opts: &SolverOptions,
) -> SolveResult<S> {
    solve_cold(lp, lower, upper, phase1_only, opts).0
}

/// Like [`solve_bounded`] (phase 2 included) but starts from `warm`, the
/// optimal basis for different bounds on the same program, using the dual
/// simplex to restore feasibility. Falls back to a cold start whenever the
/// warm path is inconclusive.
pub(crate) fn solve_warm<S: Scalar>(
    lp: &LinearProgram<S>,
    lower: &[S],
    upper: &[S],
    warm: Option<&Basis>,
    opts: &SolverOptions,
) -> (SolveResult<S>, Option<Basis>) {
    if lower.iter().zip(upper).any(|(&l, &u)| l > u) {
        return (SolveResult::without_point(SolveStatus::Infeasible, 0), None);
    }
    let Some(warm) = warm else {
        return solve_cold(lp, lower, upper, false, opts);
    };
    let ncols = lower.len() + 2 * lp.constraints.len();
    let cost = phase2_cost(lp, ncols);
    // a warm start that stalls (degenerate cycling) is cheaper to redo cold
    let budget = SolverOptions {
        max_pivots: opts
            .max_pivots
            .min(2 * (ncols + lp.constraints.len()) + 100),
        ..*opts
    };
    let mut spx = Simplex::new(lp, lower, upper, budget);
    let mut spent = 0;
    if spx.restore(warm) {
        let dual = spx.run_dual(&cost);
        spent = spx.pivots;
        if let Outcome::Optimal = dual {
            if let Outcome::Optimal = spx.run(&cost) {
                if spx.refactor() && spx.primal_feasible() {
                    let basis = spx.snapshot();
                    return (spx.finish(lp, lower, upper), Some(basis));
                }
            }
        }
        spent = spx.pivots.max(spent);
    }
    let (mut res, basis) = solve_cold(lp, lower, upper, false, opts);
    res.pivots += spent;
    (res, basis)
}

fn phase2_cost<S: Scalar>(lp: &LinearProgram<S>, ncols: usize) -> Vec<S> {
    let mut cost = vec![S::zero(); ncols];
    for &(j, c) in &lp.objective {
        cost[j] += c;
    }
    cost
}

fn solve_cold<S: Scalar>(
    lp: &LinearProgram<S>,
    lower: &[S],
    upper: &[S],
    phase1_only: bool,
    opts: &SolverOptions,
) -> (SolveResult<S>, Option<Basis>) {
    if lower.iter().zip(upper).any(|(&l, &u)| l > u) {
        return (SolveResult::without_point(SolveStatus::Infeasible, 0), None);
    }
    let mut spx = Simplex::new(lp, lower, upper, *opts);
    let fail = |status, pivots| (SolveResult::without_point(status, pivots), None);

    let phase1_cost = spx.phase1_cost();
    match spx.run(&phase1_cost) {
        Outcome::Optimal => {}
        _ => return fail(SolveStatus::IterLimit, spx.pivots),
    }
    if !spx.refactor() {
        return fail(SolveStatus::IterLimit, spx.pivots);
    }
    let infeasibility: S = spx.artificials().map(|j| spx.x[j].abs()).sum();
    if infeasibility > S::feas_tol() {
        return fail(SolveStatus::Infeasible, spx.pivots);
    }
    spx.retire_artificials();

    if phase1_only {
        return (spx.finish(lp, lower, upper), None);
    }
    let cost = phase2_cost(lp, spx.ncols());
    match spx.run(&cost) {
        Outcome::Optimal => {}
        Outcome::Unbounded => return fail(SolveStatus::Unbounded, spx.pivots),
        _ => return fail(SolveStatus::IterLimit, spx.pivots),
    }
    if !spx.refactor() {
        return fail(SolveStatus::IterLimit, spx.pivots);
    }
    let basis = spx.snapshot();
    (spx.finish(lp, lower, upper), Some(basis))
}

/// Eta update of a row-major inverse after column `alpha` (= B^{-1} a)
/// replaces basis position `r`. Only nonzeros of the pivot row are touched.
fn eliminate<S: Scalar>(binv: &mut [S], m: usize, r: usize, alpha: &[S]) {
    let piv = alpha[r];
    let mut nz = Vec::new();
    for k in 0..m {
        let v = &mut binv[r * m + k];
        if *v != S::zero() {
            *v /= piv;
            nz.push(k);
        }
    }
    for (i, &f) in alpha.iter().enumerate() {
        if i == r || f == S::zero() {
            continue;
        }
        for &k in &nz {
            let v = binv[r * m + k];
            binv[i * m + k] -= f * v;
        }
    }
}

impl<S: Scalar> Simplex<S> {
    fn new(lp: &LinearProgram<S>, lower: &[S], upper: &[S], opts: SolverOptions) -> Self {
        let m = lp.constraints.len();
        let n = lp.vars.len();
        let ncols = n + 2 * m;
        let mut cols: Vec<Vec<(usize, S)>> = vec![Vec::new(); ncols];
        for (i, c) in lp.constraints.iter().enumerate() {
            for &(j, a) in &c.coeffs {
                if a != S::zero() {
                    cols[j].push((i, a));
                }
            }
        }
        // merge duplicate entries of a column in the same row
        for col in cols.iter_mut().take(n) {
            col.sort_by_key(|&(i, _)| i);
            col.dedup_by(|next, prev| {
                if next.0 == prev.0 {
                    prev.1 += next.1;
                    true
                } else {
                    false
                }
            });
        }

        let mut lo = Vec::with_capacity(ncols);
        let mut up = Vec::with_capacity(ncols);
        lo.extend_from_slice(lower);
        up.extend_from_slice(upper);
        for c in &lp.constraints {
            let (l, u) = match c.relation {
                Relation::Le => (S::zero(), S::infinity()),
                Relation::Ge => (S::neg_infinity(), S::zero()),
                Relation::Eq => (S::zero(), S::zero()),
            };
            lo.push(l);
            up.push(u);
        }
        for _ in 0..m {
            lo.push(S::zero());
            up.push(S::infinity());
        }

        let mut x = vec![S::zero(); ncols];
        let mut state = vec![VarState::AtLower; ncols];
        for j in 0..n {
            let (v, st) = if lo[j].is_finite() {
                (lo[j], VarState::AtLower)
            } else if up[j].is_finite() {
                (up[j], VarState::AtUpper)
            } else {
                (S::zero(), VarState::Free)
            };
            x[j] = v;
            state[j] = st;
        }

        let b: Vec<S> = lp.constraints.iter().map(|c| c.rhs).collect();
        let mut residual = b.clone();
        for j in 0..n {
            if x[j] != S::zero() {
                for &(i, a) in &cols[j] {
                    residual[i] -= a * x[j];
                }
            }
        }

        let mut basis = vec![0; m];
        let mut binv = vec![S::zero(); m * m];
        for i in 0..m {
            let slack = n + i;
            let art = n + m + i;
            cols[slack].push((i, S::one()));
            let r = residual[i];
            if r >= lo[slack] && r <= up[slack] {
                basis[i] = slack;
                state[slack] = VarState::Basic;
                x[slack] = r;
                binv[i * m + i] = S::one();
                cols[art].push((i, S::one()));
                up[art] = S::zero();
                state[art] = VarState::AtLower;
            } else {
                state[slack] = if lo[slack].is_finite() {
                    VarState::AtLower
                } else {
                    VarState::AtUpper
                };
                let sign = if r >= S::zero() { S::one() } else { -S::one() };
                cols[art].push((i, sign));
                basis[i] = art;
                state[art] = VarState::Basic;
                x[art] = r.abs();
                binv[i * m + i] = sign;
            }
        }

        Self {
            m,
            n_struct: n,
            cols,
            lower: lo,
            upper: up,
            b,
            x,
            state,
            basis,
            binv,
            pivots: 0,
            since_refactor: 0,
            degenerate_run: 0,
            bland: false,
            opts,
        }
    }

    fn ncols(&self) -> usize {
        self.cols.len()
    }

    fn artificials(&self) -> impl Iterator<Item = usize> {
        let start = self.n_struct + self.m;
        start..start + self.m
    }

    fn phase1_cost(&self) -> Vec<S> {
        let mut cost = vec![S::zero(); self.ncols()];
        for j in self.artificials() {
            if self.upper[j] > S::zero() {
                cost[j] = S::one();
            }
        }
        cost
    }

    /// Fixes every artificial at zero and pivots basic ones out where a
    /// replacement column exists. Rows left with a basic artificial are
    /// redundant.
    fn retire_artificials(&mut self) {
        for j in self.artificials() {
            self.upper[j] = S::zero();
            if self.state[j] != VarState::Basic {
                self.x[j] = S::zero();
                self.state[j] = VarState::AtLower;
            }
        }
        let first_art = self.n_struct + self.m;
        for r in 0..self.m {
            if self.basis[r] < first_art {
                continue;
            }
            let mut best: Option<(usize, S)> = None;
            for j in 0..first_art {
                if self.state[j] == VarState::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let rho = self.cols[j].iter().fold(S::zero(), |acc, &(k, a)| {
                    acc + self.binv[r * self.m + k] * a
                });
                if rho.abs() > S::lit(1e-7) && best.is_none_or(|(_, v)| rho.abs() > v) {
                    best = Some((j, rho.abs()));
                }
            }
            if let Some((j, _)) = best {
                let alpha = self.column(j);
                let leaving = self.basis[r];
                self.pivot(r, j, &alpha);
                self.x[leaving] = S::zero();
                self.state[leaving] = VarState::AtLower;
            }
        }
        for j in self.artificials() {
            if self.state[j] == VarState::Basic {
                self.lower[j] = S::zero();
            }
        }
        // cannot fail: the basis changed only by well-conditioned pivots
        if !self.refactor() {
            self.recompute_basic();
        }
    }

    /// alpha = B^{-1} A_j
    fn column(&self, j: usize) -> Vec<S> {
        let m = self.m;
        let mut alpha = vec![S::zero(); m];
        for &(k, a) in &self.cols[j] {
            for (i, slot) in alpha.iter_mut().enumerate() {
                let v = self.binv[i * m + k];
                if v != S::zero() {
                    *slot += v * a;
                }
            }
        }
        alpha
    }

    fn duals(&self, cost: &[S]) -> Vec<S> {
        let m = self.m;
        let mut y = vec![S::zero(); m];
        for i in 0..m {
            let cb = cost[self.basis[i]];
            if cb == S::zero() {
                continue;
            }
            let row = &self.binv[i * m..(i + 1) * m];
            for (yk, &bk) in y.iter_mut().zip(row) {
                *yk += cb * bk;
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[S], y: &[S]) -> S {
        self.cols[j]
            .iter()
            .fold(cost[j], |acc, &(i, a)| acc - y[i] * a)
    }

    /// Entering column and direction (+1 increase, -1 decrease).
    fn choose_entering(&self, cost: &[S], y: &[S]) -> Option<(usize, S)> {
        let tol = S::opt_tol();
        let mut best: Option<(usize, S, S)> = None;
        for j in 0..self.ncols() {
            let dir = match self.state[j] {
                VarState::Basic => continue,
                _ if self.lower[j] == self.upper[j] => continue,
                VarState::AtLower => {
                    let d = self.reduced_cost(j, cost, y);
                    if d < -tol {
                        Some((S::one(), d))
                    } else {
                        None
                    }
                }
                VarState::AtUpper => {
                    let d = self.reduced_cost(j, cost, y);
                    if d > tol {
                        Some((-S::one(), d))
                    } else {
                        None
                    }
                }
                VarState::Free => {
                    let d = self.reduced_cost(j, cost, y);
                    if d.abs() > tol {
                        Some((if d < S::zero() { S::one() } else { -S::one() }, d))
                    } else {
                        None
                    }
                }
            };
            if let Some((dir, d)) = dir {
                if self.bland {
                    return Some((j, dir));
                }
                if best.is_none_or(|(_, _, bd)| d.abs() > bd) {
                    best = Some((j, dir, d.abs()));
                }
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Returns `(step, leaving row)`; `None` row means a bound flip of the
    /// entering variable, `None` overall means unbounded.
    fn ratio_test(&self, entering: usize, dir: S, alpha: &[S]) -> Option<(S, Option<usize>)> {
        let ptol = S::pivot_tol();
        let harris = S::opt_tol();
        let limit = |i: usize, slack: S| -> Option<(S, S)> {
            let delta = -dir * alpha[i];
            let var = self.basis[i];
            if delta < -ptol && self.lower[var].is_finite() {
                let room = (self.x[var] - self.lower[var] + slack).max(S::zero());
                Some((room / -delta, delta.abs()))
            } else if delta > ptol && self.upper[var].is_finite() {
                let room = (self.upper[var] - self.x[var] + slack).max(S::zero());
                Some((room / delta, delta.abs()))
            } else {
                None
            }
        };

        let range = self.upper[entering] - self.lower[entering];

        let row = if self.bland {
            let mut best: Option<(S, usize)> = None;
            for i in 0..self.m {
                if let Some((t, _)) = limit(i, S::zero()) {
                    let better = match best {
                        None => true,
                        Some((bt, bi)) => {
                            t < bt - S::lit(1e-12)
                                || (t <= bt + S::lit(1e-12) && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        best = Some((t, i));
                    }
                }
            }
            best
        } else {
            let mut theta_max = S::infinity();
            for i in 0..self.m {
                if let Some((t, _)) = limit(i, harris) {
                    theta_max = theta_max.min(t);
                }
            }
            if theta_max.is_finite() {
                let mut best: Option<(S, usize, S)> = None;
                for i in 0..self.m {
                    if let Some((t, mag)) = limit(i, S::zero()) {
                        if t <= theta_max && best.is_none_or(|(_, _, bm)| mag > bm) {
                            best = Some((t, i, mag));
                        }
                    }
                }
                best.map(|(t, i, _)| (t, i))
            } else {
                None
            }
        };

        match row {
            Some((t, _)) if range.is_finite() && range <= t => Some((range, None)),
            Some((t, i)) => Some((t.max(S::zero()), Some(i))),
            None if range.is_finite() => Some((range, None)),
            None => None,
        }
    }

    fn pivot(&mut self, r: usize, entering: usize, alpha: &[S]) {
        eliminate(&mut self.binv, self.m, r, alpha);
        self.state[self.basis[r]] = VarState::AtLower;
        self.basis[r] = entering;
        self.state[entering] = VarState::Basic;
        self.pivots += 1;
        self.since_refactor += 1;
    }

    fn run(&mut self, cost: &[S]) -> Outcome {
        let degenerate_limit = 10 * (self.m + self.ncols());
        self.degenerate_run = 0;
        self.bland = false;
        loop {
            if self.pivots >= self.opts.max_pivots {
                return Outcome::IterLimit;
            }
            if self.since_refactor >= self.opts.refactor_every && !self.refactor() {
                return Outcome::Singular;
            }
            let y = self.duals(cost);
            let Some((j, dir)) = self.choose_entering(cost, &y) else {
                return Outcome::Optimal;
            };
            let alpha = self.column(j);
            let Some((theta, leaving_row)) = self.ratio_test(j, dir, &alpha) else {
                return Outcome::Unbounded;
            };

            if theta != S::zero() {
                self.x[j] += dir * theta;
                for i in 0..self.m {
                    if alpha[i] != S::zero() {
                        let var = self.basis[i];
                        self.x[var] -= dir * theta * alpha[i];
                    }
                }
            }

            match leaving_row {
                None => {
                    if dir > S::zero() {
                        self.x[j] = self.upper[j];
                        self.state[j] = VarState::AtUpper;
                    } else {
                        self.x[j] = self.lower[j];
                        self.state[j] = VarState::AtLower;
                    }
                    self.pivots += 1;
                }
                Some(r) => {
                    let leaving = self.basis[r];
                    let moving_down = -dir * alpha[r] < S::zero();
                    self.pivot(r, j, &alpha);
                    if moving_down {
                        self.x[leaving] = self.lower[leaving];
                        self.state[leaving] = VarState::AtLower;
                    } else {
                        self.x[leaving] = self.upper[leaving];
                        self.state[leaving] = VarState::AtUpper;
                    }
                }
            }

            if theta <= S::lit(1e-12) {
                self.degenerate_run += 1;
                if self.degenerate_run > degenerate_limit {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
                self.bland = false;
            }
        }
    }

    /// Rebuilds B^{-1} from scratch in product form: starting from the
    /// identity, unit columns (slacks, artificials) drop into their own row
    /// and every other basic column is pivoted in on the open row with the
    /// largest entry. Basis positions may be permuted. Recomputes the basic
    /// values; returns false if the basis is singular.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return true;
        }
        self.binv.iter_mut().for_each(|v| *v = S::zero());
        for i in 0..m {
            self.binv[i * m + i] = S::one();
        }
        let mut placed: Vec<Option<usize>> = vec![None; m];
        let mut rest = Vec::new();
        for &var in &self.basis {
            match self.cols[var].as_slice() {
                &[(i, a)] if var >= self.n_struct && placed[i].is_none() => {
                    placed[i] = Some(var);
                    self.binv[i * m + i] = S::one() / a;
                }
                _ => rest.push(var),
            }
        }
        rest.sort_by_key(|&v| self.cols[v].len());
        for var in rest {
            let alpha = self.column(var);
            let mut best: Option<(usize, S)> = None;
            for (i, &a) in alpha.iter().enumerate() {
                if placed[i].is_none() && best.is_none_or(|(_, b)| a.abs() > b) {
                    best = Some((i, a.abs()));
                }
            }
            match best {
                Some((r, mag)) if mag > S::lit(1e-11) => {
                    eliminate(&mut self.binv, m, r, &alpha);
                    placed[r] = Some(var);
                }
                _ => return false,
            }
        }
        self.basis = placed
            .into_iter()
            .map(|v| v.expect("square basis"))
            .collect();
        self.recompute_basic();
        true
    }

    fn finish(&self, lp: &LinearProgram<S>, lower: &[S], upper: &[S]) -> SolveResult<S> {
        let x: Vec<S> = (0..self.n_struct)
            .map(|j| self.x[j].max(lower[j]).min(upper[j]))
            .collect();
        SolveResult {
            status: SolveStatus::Optimal,
            objective: lp.objective_value(&x),
            x,
            gap: S::zero(),
            pivots: self.pivots,
            nodes: 0,
        }
    }

    fn snapshot(&self) -> Basis {
        Basis {
            basis: self.basis.clone(),
            state: self.state.clone(),
        }
    }

    /// Installs a saved basis with artificials retired. Nonbasic variables
    /// sit at the bound their state names under the current bounds.
    fn restore(&mut self, warm: &Basis) -> bool {
        if warm.basis.len() != self.m || warm.state.len() != self.ncols() {
            return false;
        }
        for j in self.artificials() {
            self.lower[j] = S::zero();
            self.upper[j] = S::zero();
        }
        self.basis.clone_from(&warm.basis);
        self.state.clone_from(&warm.state);
        for j in 0..self.ncols() {
            let (lo, up) = (self.lower[j], self.upper[j]);
            let (value, state) = match self.state[j] {
                VarState::Basic => continue,
                VarState::AtLower if lo.is_finite() => (lo, VarState::AtLower),
                VarState::AtUpper if up.is_finite() => (up, VarState::AtUpper),
                _ if lo.is_finite() => (lo, VarState::AtLower),
                _ if up.is_finite() => (up, VarState::AtUpper),
                _ => (S::zero(), VarState::Free),
            };
            self.x[j] = value;
            self.state[j] = state;
        }
        self.refactor()
    }

    fn primal_feasible(&self) -> bool {
        let tol = S::feas_tol();
        self.basis
            .iter()
            .all(|&v| self.x[v] >= self.lower[v] - tol && self.x[v] <= self.upper[v] + tol)
    }

    /// Bounded dual simplex from a dual feasible basis: drives every basic
    /// variable into its bounds while keeping reduced costs of the right
    /// sign. `Unbounded` here means the primal is infeasible.
    fn run_dual(&mut self, cost: &[S]) -> Outcome {
        let m = self.m;
        let ptol = S::pivot_tol();
        let tol = S::feas_tol();
        loop {
            if self.pivots >= self.opts.max_pivots {
                return Outcome::IterLimit;
            }
            if self.since_refactor >= self.opts.refactor_every && !self.refactor() {
                return Outcome::Singular;
            }
            // leaving row: largest bound violation
            let mut leave: Option<(usize, S)> = None;
            for (i, &var) in self.basis.iter().enumerate() {
                let v = self.x[var];
                let viol = if v < self.lower[var] - tol {
                    self.lower[var] - v
                } else if v > self.upper[var] + tol {
                    v - self.upper[var]
                } else {
                    continue;
                };
                if leave.is_none_or(|(_, best)| viol > best) {
                    leave = Some((i, viol));
                }
            }
            let Some((r, _)) = leave else {
                return Outcome::Optimal;
            };
            let leaving = self.basis[r];
            let increase = self.x[leaving] < self.lower[leaving];
            let target = if increase {
                self.lower[leaving]
            } else {
                self.upper[leaving]
            };

            let y = self.duals(cost);
            let rho = &self.binv[r * m..(r + 1) * m];
            // entering candidates: (column, |d_j|, |alpha_rj|)
            let mut cands: Vec<(usize, S, S)> = Vec::new();
            for j in 0..self.ncols() {
                let st = self.state[j];
                if st == VarState::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let a = self.cols[j]
                    .iter()
                    .fold(S::zero(), |acc, &(i, v)| acc + rho[i] * v);
                if a.abs() <= ptol {
                    continue;
                }
                // x_r moves by -a per unit of x_j
                let usable = match st {
                    VarState::AtLower => (a < S::zero()) == increase,
                    VarState::AtUpper => (a > S::zero()) == increase,
                    _ => true,
                };
                if usable {
                    let d = self.reduced_cost(j, cost, &y).abs();
                    cands.push((j, d, a.abs()));
                }
            }
            if cands.is_empty() {
                return Outcome::Unbounded;
            }
            // two-pass ratio test on |d_j| / |alpha_rj|
            let slack = S::opt_tol();
            let bound = cands
                .iter()
                .map(|&(_, d, a)| (d + slack) / a)
                .fold(S::infinity(), S::min);
            let (q, _, _) = cands
                .iter()
                .copied()
                .filter(|&(_, d, a)| d / a <= bound)
                .fold(None::<(usize, S, S)>, |best, c| match best {
                    Some(b) if b.2 >= c.2 => Some(b),
                    _ => Some(c),
                })
                .expect("the minimiser passes its own bound");

            let alpha = self.column(q);
            if alpha[r].abs() <= ptol {
                return Outcome::Singular;
            }
            let delta = (self.x[leaving] - target) / alpha[r];
            self.x[q] += delta;
            for i in 0..m {
                if alpha[i] != S::zero() {
                    let var = self.basis[i];
                    self.x[var] -= alpha[i] * delta;
                }
            }
            self.pivot(r, q, &alpha);
            self.x[leaving] = target;
            self.state[leaving] = if increase {
                VarState::AtLower
            } else {
                VarState::AtUpper
            };
        }
    }

    fn recompute_basic(&mut self) {
        let m = self.m;
        let mut rhs = self.b.clone();
        for j in 0..self.ncols() {
            if self.state[j] == VarState::Basic || self.x[j] == S::zero() {
                continue;
            }
            for &(i, a) in &self.cols[j] {
                rhs[i] -= a * self.x[j];
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            let v = row
                .iter()
                .zip(&rhs)
                .fold(S::zero(), |acc, (&p, &q)| acc + p * q);
            self.x[self.basis[i]] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp1() -> LinearProgram<f64> {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, x,y >= 0  -> (1.6, 1.2)
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, f64::INFINITY);
        let y = lp.add_var("y", 0.0, f64::INFINITY);
        lp.add_constraint("a", vec![(x, 1.0), (y, 2.0)], Relation::Le, 4.0);
        lp.add_constraint("b", vec![(x, 3.0), (y, 1.0)], Relation::Le, 6.0);
        lp.set_objective(vec![(x, -1.0), (y, -1.0)], 0.0);
        lp
    }

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_var("x", 0.0, 10.0);
        lp.add_constraint("c", vec![(x, 1.0)], Relation::Ge, 3.0);
        lp.set_objective(vec![(x, 1.0)], 0.0);
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.x[0] - 3.0).abs() < 1e-9);
        assert!((r.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn two_dim_vertex() {
        let r = solve_lp(&lp1()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.x[0] - 1.6).abs() < 1e-9);
        assert!((r.x[1] - 1.2).abs() < 1e-9);
        assert!((r.objective + 2.8).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_var("x", 0.0, 1.0);
        lp.add_constraint("c", vec![(x, 1.0)], Relation::Ge, 2.0);
        assert_eq!(solve_lp(&lp).unwrap().status, SolveStatus::Infeasible);

        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_var("x", 0.0, f64::INFINITY);
        let y = lp.add_var("y", f64::NEG_INFINITY, f64::INFINITY);
        lp.add_constraint("c", vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        lp.set_objective(vec![(x, -1.0)], 0.0);
        assert_eq!(solve_lp(&lp).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn equality_and_free_variable() {
        // min y  s.t. x - y = 2, x + y >= 0, y free, x in [0, 5]  -> y = -1, x = 1
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_var("x", 0.0, 5.0);
        let y = lp.add_var("y", f64::NEG_INFINITY, f64::INFINITY);
        lp.add_constraint("e", vec![(x, 1.0), (y, -1.0)], Relation::Eq, 2.0);
        lp.add_constraint("g", vec![(x, 1.0), (y, 1.0)], Relation::Ge, 0.0);
        lp.set_objective(vec![(y, 1.0)], 0.0);
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective + 1.0).abs() < 1e-9, "{:?}", r);
    }

    #[test]
    fn empty_program() {
        let lp = LinearProgram::<f64>::new();
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!(r.x.is_empty());
    }

    #[test]
    fn redundant_equalities() {
        // duplicate equality rows leave an artificial in the basis
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_var("x", 0.0, 10.0);
        let y = lp.add_var("y", 0.0, 10.0);
        lp.add_constraint("a", vec![(x, 1.0), (y, 1.0)], Relation::Eq, 4.0);
        lp.add_constraint("b", vec![(x, 2.0), (y, 2.0)], Relation::Eq, 8.0);
        lp.set_objective(vec![(x, 1.0), (y, 3.0)], 1.0);
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - 5.0).abs() < 1e-9);
        assert!(lp.max_violation(&r.x) < 1e-9);
    }

    #[test]
    fn f32_instantiation() {
        let mut lp = LinearProgram::<f32>::new();
        let x = lp.add_var("x", 0.0, f32::INFINITY);
        let y = lp.add_var("y", 0.0, f32::INFINITY);
        lp.add_constraint("a", vec![(x, 1.0), (y, 2.0)], Relation::Le, 4.0);
        lp.add_constraint("b", vec![(x, 3.0), (y, 1.0)], Relation::Le, 6.0);
        lp.set_objective(vec![(x, -1.0), (y, -1.0)], 0.0);
        let r = solve_lp(&lp).unwrap();
        assert!((r.objective + 2.8).abs() < 1e-4);
    }

    #[test]
    fn frequent_refactor_gives_same_answer() {
        let opts = SolverOptions {
            refactor_every: 1,
            ..SolverOptions::default()
        };
        let r = solve_lp_with(&lp1(), &opts).unwrap();
        assert!((r.objective + 2.8).abs() < 1e-9);
    }

    #[test]
    fn pivot_limit_is_reported() {
        let opts = SolverOptions {
            max_pivots: 0,
            ..SolverOptions::default()
        };
        let r = solve_lp_with(&lp1(), &opts).unwrap();
        assert_eq!(r.status, SolveStatus::IterLimit);
    }
}

//! Bounded-variable primal revised simplex.
//!
//! Each row gets a logical `r_i` with `A x - r = 0` and the row bounds on
//! `r_i`, and the search works on `n + m` variables. Infeasible starts use a
//! composite phase 1 (minimize the sum of bound violations of the basic
//! variables). Pricing is Dantzig with a switch to Bland's rule after a run
//! of degenerate pivots; the ratio test is Harris's two-pass test with bound
//! flips.

use log::trace;

use super::lu::LuFactor;
use super::{Basis, LpError, LpSolution, LpStatus, Problem, VarStatus};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Bound violations up to `primal_tolerance * (1 + |bound|)` are feasible.
    pub primal_tolerance: f64,
    /// Optimality tolerance on reduced costs, scaled by the largest cost.
    pub dual_tolerance: f64,
    /// Defaults to `50 * (rows + cols) + 1000`.
    pub max_iterations: Option<usize>,
    pub refactor_interval: usize,
    pub warm_start: Option<Basis>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            primal_tolerance: 1e-9,
            dual_tolerance: 1e-9,
            max_iterations: None,
            refactor_interval: 64,
            warm_start: None,
        }
    }
}

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;
const NOT_BASIC: usize = usize::MAX;

pub(super) struct Simplex<'a> {
    p: &'a Problem,
    m: usize,
    n: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    status: Vec<VarStatus>,
    head: Vec<usize>,
    pos_of: Vec<usize>,
    lu: Option<LuFactor>,
    ptol: f64,
    dtol: f64,
    refactor_interval: usize,
    max_iter: usize,
    iterations: usize,
}

enum Step {
    Optimal,
    Infeasible,
    Unbounded,
    Continue,
}

fn default_status(lo: f64, hi: f64) -> VarStatus {
    if lo <= 0.0 && 0.0 <= hi {
        if lo == 0.0 {
            VarStatus::AtLower
        } else if hi == 0.0 {
            VarStatus::AtUpper
        } else {
            VarStatus::Zero
        }
    } else if lo > 0.0 {
        VarStatus::AtLower
    } else {
        VarStatus::AtUpper
    }
}

impl<'a> Simplex<'a> {
    pub fn new(p: &'a Problem, opts: &SolveOptions) -> Result<Self, LpError> {
        let (m, n) = (p.num_rows(), p.num_cols());
        let dims_ok = p.col_lower.len() == n
            && p.col_upper.len() == n
            && p.row_upper.len() == m
            && p.matrix.num_rows == m
            && p.matrix.num_cols == n;
        if !dims_ok {
            return Err(LpError::InvalidProblem("inconsistent dimensions".into()));
        }
        let mut lo = p.col_lower.clone();
        lo.extend_from_slice(&p.row_lower);
        let mut hi = p.col_upper.clone();
        hi.extend_from_slice(&p.row_upper);
        for j in 0..n + m {
            if lo[j].is_nan() || hi[j].is_nan() || lo[j] > hi[j] || lo[j] == f64::INFINITY || hi[j] == f64::NEG_INFINITY {
                let what = if j < n { format!("column {j}") } else { format!("row {}", j - n) };
                return Err(LpError::InvalidProblem(format!("{what} has bounds [{}, {}]", lo[j], hi[j])));
            }
        }
        if p.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::InvalidProblem("objective has a non-finite coefficient".into()));
        }
        let mut cost = p.objective.clone();
        cost.resize(n + m, 0.0);
        let cmax = cost.iter().fold(1.0f64, |a, c| a.max(c.abs()));

        let mut status: Vec<VarStatus> = match &opts.warm_start {
            Some(b) if b.cols.len() == n && b.rows.len() == m => {
                let nb = b.cols.iter().chain(&b.rows).filter(|s| **s == VarStatus::Basic).count();
                if nb == m {
                    b.cols.iter().chain(&b.rows).copied().collect()
                } else {
                    Self::slack_status(&lo, &hi, n, m)
                }
            }
            _ => Self::slack_status(&lo, &hi, n, m),
        };
        for j in 0..n + m {
            status[j] = match status[j] {
                VarStatus::AtLower if !lo[j].is_finite() => default_status(lo[j], hi[j]),
                VarStatus::AtUpper if !hi[j].is_finite() => default_status(lo[j], hi[j]),
                VarStatus::Zero if lo[j] > 0.0 || hi[j] < 0.0 => default_status(lo[j], hi[j]),
                s => s,
            };
        }
        let mut head = Vec::with_capacity(m);
        let mut pos_of = vec![NOT_BASIC; n + m];
        for j in 0..n + m {
            if status[j] == VarStatus::Basic {
                pos_of[j] = head.len();
                head.push(j);
            }
        }
        let max_iter = opts.max_iterations.unwrap_or(50 * (n + m) + 1000);
        let mut s = Simplex {
            p,
            m,
            n,
            lo,
            hi,
            cost,
            x: vec![0.0; n + m],
            status,
            head,
            pos_of,
            lu: None,
            ptol: opts.primal_tolerance,
            dtol: opts.dual_tolerance * cmax,
            refactor_interval: opts.refactor_interval.max(1),
            max_iter,
            iterations: 0,
        };
        for j in 0..n + m {
            s.x[j] = s.nonbasic_value(j);
        }
        Ok(s)
    }

    fn slack_status(lo: &[f64], hi: &[f64], n: usize, m: usize) -> Vec<VarStatus> {
        let mut st: Vec<VarStatus> = (0..n).map(|j| default_status(lo[j], hi[j])).collect();
        st.extend(std::iter::repeat(VarStatus::Basic).take(m));
        st
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            VarStatus::AtLower => self.lo[j],
            VarStatus::AtUpper => self.hi[j],
            VarStatus::Zero | VarStatus::Basic => 0.0,
        }
    }

    fn tol(&self, bound: f64) -> f64 {
        self.ptol * (1.0 + bound.abs())
    }

    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.p.matrix.col(j).collect()
        } else {
            vec![(j - self.n, -1.0)]
        }
    }

    /// Factors the current basis, swapping in logicals for dependent columns.
    fn refactor(&mut self) -> Result<(), LpError> {
        for _ in 0..self.m + 2 {
            let cols: Vec<Vec<(usize, f64)>> = self.head.iter().map(|&j| self.column(j)).collect();
            match LuFactor::factor(self.m, &cols) {
                Ok(lu) => {
                    self.lu = Some(lu);
                    self.recompute_basics();
                    return Ok(());
                }
                Err(sing) => {
                    for (pos, row) in sing.pairs {
                        let out = self.head[pos];
                        let logical = self.n + row;
                        self.status[out] = default_status(self.lo[out], self.hi[out]);
                        self.pos_of[out] = NOT_BASIC;
                        self.x[out] = self.nonbasic_value(out);
                        if self.pos_of[logical] != NOT_BASIC {
                            return Err(LpError::Numerical("basis repair found a basic logical".into()));
                        }
                        self.status[logical] = VarStatus::Basic;
                        self.pos_of[logical] = pos;
                        self.head[pos] = logical;
                    }
                    trace!("basis repaired");
                }
            }
        }
        Err(LpError::Numerical("basis repair did not converge".into()))
    }

    fn recompute_basics(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.n + self.m {
            if self.pos_of[j] != NOT_BASIC {
                continue;
            }
            let v = self.x[j];
            if v == 0.0 {
                continue;
            }
            if j < self.n {
                for (i, a) in self.p.matrix.col(j) {
                    rhs[i] -= a * v;
                }
            } else {
                rhs[j - self.n] += v;
            }
        }
        self.lu.as_ref().expect("factored").ftran(&mut rhs);
        for (pos, &j) in self.head.iter().enumerate() {
            self.x[j] = rhs[pos];
        }
    }

    /// -1 below the lower bound, +1 above the upper, 0 when feasible.
    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lo[j] - self.tol(self.lo[j]) {
            -1.0
        } else if v > self.hi[j] + self.tol(self.hi[j]) {
            1.0
        } else {
            0.0
        }
    }

    fn duals(&self, phase_one: bool) -> Vec<f64> {
        let mut y: Vec<f64> = self
            .head
            .iter()
            .map(|&j| if phase_one { self.infeasibility(j) } else { self.cost[j] })
            .collect();
        self.lu.as_ref().expect("factored").btran(&mut y);
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64], phase_one: bool) -> f64 {
        let c = if phase_one { 0.0 } else { self.cost[j] };
        if j < self.n {
            c - self.p.matrix.col(j).map(|(i, a)| a * y[i]).sum::<f64>()
        } else {
            c + y[j - self.n]
        }
    }

    /// Entering variable and direction (+1 increase, -1 decrease).
    fn price(&self, y: &[f64], phase_one: bool, bland: bool) -> Option<(usize, f64)> {
        let dtol = if phase_one { self.ptol.max(1e-12) } else { self.dtol };
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n + self.m {
            if self.pos_of[j] != NOT_BASIC || self.lo[j] == self.hi[j] {
                continue;
            }
            let d = self.reduced_cost(j, y, phase_one);
            let dir = match self.status[j] {
                VarStatus::AtLower if d < -dtol => 1.0,
                VarStatus::AtUpper if d > dtol => -1.0,
                VarStatus::Zero if d.abs() > dtol => -d.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if best.map_or(true, |(_, _, b)| d.abs() > b) {
                best = Some((j, dir, d.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Distance the entering variable can move before reaching its own bound.
    fn own_range(&self, q: usize, dir: f64) -> f64 {
        if dir > 0.0 {
            self.hi[q] - self.x[q]
        } else {
            self.x[q] - self.lo[q]
        }
    }

    /// For basic position `i` moving at rate `delta`, the bound it heads to
    /// (if any) and the relaxed bound tolerance.
    fn target(&self, j: usize, delta: f64, phase_one: bool) -> Option<(f64, f64)> {
        let v = self.x[j];
        let (lo, hi) = (self.lo[j], self.hi[j]);
        let below = v < lo - self.tol(lo);
        let above = v > hi + self.tol(hi);
        if phase_one && below {
            return (delta > 0.0).then_some((lo, self.tol(lo)));
        }
        if phase_one && above {
            return (delta < 0.0).then_some((hi, self.tol(hi)));
        }
        if delta < 0.0 && lo.is_finite() {
            Some((lo, self.tol(lo)))
        } else if delta > 0.0 && hi.is_finite() {
            Some((hi, self.tol(hi)))
        } else {
            None
        }
    }

    /// Returns the leaving position and step length, if a basic variable
    /// limits the move.
    fn ratio_test(&self, alpha: &[f64], dir: f64, phase_one: bool, bland: bool) -> Option<(usize, f64, f64)> {
        let amax = alpha.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let ptol = PIVOT_TOL * amax.max(1.0);
        let mut cands: Vec<(usize, f64, f64, f64)> = Vec::new();
        let mut theta_max = f64::INFINITY;
        for (i, &a) in alpha.iter().enumerate() {
            if a.abs() <= ptol {
                continue;
            }
            let j = self.head[i];
            let delta = -dir * a;
            if let Some((bound, tol)) = self.target(j, delta, phase_one) {
                let dist = ((bound - self.x[j]) / delta).max(0.0);
                let relaxed = ((bound - self.x[j]) + tol * delta.signum()) / delta;
                theta_max = theta_max.min(relaxed.max(0.0));
                cands.push((i, dist, a.abs(), bound));
            }
        }
        if cands.is_empty() {
            return None;
        }
        let chosen = if bland {
            let min = cands.iter().fold(f64::INFINITY, |a, c| a.min(c.1));
            cands
                .iter()
                .filter(|c| c.1 <= min + 1e-12 * (1.0 + min))
                .min_by_key(|c| self.head[c.0])
                .copied()
        } else {
            cands
                .iter()
                .filter(|c| c.1 <= theta_max)
                .fold(None::<(usize, f64, f64, f64)>, |b, c| match b {
                    Some(b) if b.2 >= c.2 => Some(b),
                    _ => Some(*c),
                })
        };
        chosen.map(|(i, dist, _, bound)| (i, dist, bound))
    }

    fn iterate(&mut self, bland: bool, fresh: bool) -> Result<(Step, f64), LpError> {
        let phase_one = self.head.iter().any(|&j| self.infeasibility(j) != 0.0);
        let y = self.duals(phase_one);
        let Some((q, dir)) = self.price(&y, phase_one, bland) else {
            if !fresh {
                self.refactor()?;
                return Ok((Step::Continue, 1.0));
            }
            return Ok((if phase_one { Step::Infeasible } else { Step::Optimal }, 0.0));
        };

        let mut alpha = vec![0.0; self.m];
        for (i, a) in self.column(q) {
            alpha[i] = a;
        }
        self.lu.as_ref().expect("factored").ftran(&mut alpha);

        let own = self.own_range(q, dir);
        let leave = self.ratio_test(&alpha, dir, phase_one, bland);
        let theta = match leave {
            Some((_, t, _)) if t < own => t,
            _ if own.is_finite() => {
                self.shift(q, dir, own, &alpha);
                self.status[q] = if dir > 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                return Ok((Step::Continue, own));
            }
            _ => {
                if phase_one {
                    return Err(LpError::Numerical("phase one direction without a limit".into()));
                }
                return Ok((Step::Unbounded, f64::INFINITY));
            }
        };
        let (r, _, bound) = leave.expect("limited step");
        self.shift(q, dir, theta, &alpha);
        let out = self.head[r];
        self.x[out] = bound;
        self.status[out] = if bound == self.lo[out] { VarStatus::AtLower } else { VarStatus::AtUpper };
        self.pos_of[out] = NOT_BASIC;
        self.status[q] = VarStatus::Basic;
        self.pos_of[q] = r;
        self.head[r] = q;
        let lu = self.lu.as_mut().expect("factored");
        lu.update(r, &alpha);
        if lu.num_etas() >= self.refactor_interval || lu.fill() > 4 * (self.p.matrix.nnz() + self.m) + 10_000 {
            self.refactor()?;
        }
        Ok((Step::Continue, theta))
    }

    fn shift(&mut self, q: usize, dir: f64, theta: f64, alpha: &[f64]) {
        if theta == 0.0 {
            return;
        }
        self.x[q] += dir * theta;
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                let j = self.head[i];
                self.x[j] -= dir * a * theta;
            }
        }
    }

    pub fn run(mut self) -> Result<LpSolution, LpError> {
        self.refactor()?;
        let mut degenerate = 0usize;
        let status = loop {
            let fresh = self.lu.as_ref().is_some_and(|lu| lu.num_etas() == 0);
            let (step, theta) = self.iterate(degenerate > DEGENERATE_RUN, fresh)?;
            match step {
                Step::Optimal => break LpStatus::Optimal,
                Step::Infeasible => break LpStatus::Infeasible,
                Step::Unbounded => break LpStatus::Unbounded,
                Step::Continue => {}
            }
            self.iterations += 1;
            degenerate = if theta.abs() <= 1e-12 { degenerate + 1 } else { 0 };
            if self.iterations >= self.max_iter {
                return Err(LpError::IterationLimit(self.max_iter));
            }
        };
        Ok(self.finish(status))
    }

    fn finish(self, status: LpStatus) -> LpSolution {
        let (n, m) = (self.n, self.m);
        let y = self.duals(false);
        let x: Vec<f64> = self.x[..n].to_vec();
        let reduced_costs: Vec<f64> = (0..n).map(|j| self.reduced_cost(j, &y, false)).collect();
        let row_activity = self.p.activities(&x);
        let objective = self.p.evaluate(&x);
        let dual: f64 = self.p.objective_offset
            + (0..n).map(|j| reduced_costs[j] * x[j]).sum::<f64>()
            + (0..m).map(|i| y[i] * row_activity[i]).sum::<f64>();
        let duality_gap = (objective - dual).abs() / (1.0 + objective.abs());
        let primal_infeasibility = self.p.max_infeasibility(&x);
        let basis = Basis { cols: self.status[..n].to_vec(), rows: self.status[n..].to_vec() };
        LpSolution {
            status,
            x,
            row_activity,
            row_duals: y,
            reduced_costs,
            objective,
            iterations: self.iterations,
            basis,
            primal_infeasibility,
            duality_gap,
        }
    }
}

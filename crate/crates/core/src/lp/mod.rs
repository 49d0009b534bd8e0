//! Linear programs and a self-contained sparse revised simplex solver.
//!
//! Problems are stated as
//!
//! ```text
//! minimize    c'x + offset
//! subject to  row_lower <= A x <= row_upper
//!             col_lower <=  x  <= col_upper
//! ```
//!
//! where any bound may be infinite and equality rows have equal bounds. The
//! solver returns primal values, row duals (the change in objective per unit
//! increase of the row activity) and reduced costs, all read from the final
//! basis.

mod export;
mod lu;
mod simplex;
mod sparse;

pub use export::write_lp_format;
pub use simplex::SolveOptions;
pub use sparse::CscMatrix;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Numeric content of a linear program.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub col_lower: Vec<f64>,
    pub col_upper: Vec<f64>,
    pub row_lower: Vec<f64>,
    pub row_upper: Vec<f64>,
    pub matrix: CscMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Equal,
    LessEqual,
    GreaterEqual,
    Range,
    Free,
}

impl Problem {
    pub fn num_rows(&self) -> usize {
        self.row_lower.len()
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn row_sense(&self, row: usize) -> RowSense {
        let (lo, hi) = (self.row_lower[row], self.row_upper[row]);
        match (lo.is_finite(), hi.is_finite()) {
            _ if lo == hi => RowSense::Equal,
            (true, true) => RowSense::Range,
            (true, false) => RowSense::GreaterEqual,
            (false, true) => RowSense::LessEqual,
            (false, false) => RowSense::Free,
        }
    }

    /// Row activities `A x`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_rows()];
        for j in 0..self.num_cols() {
            for (i, a) in self.matrix.col(j) {
                out[i] += a * x[j];
            }
        }
        out
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective_offset + self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Largest bound violation of `x` over rows and columns, each scaled by
    /// `1 + |bound|`.
    pub fn max_infeasibility(&self, x: &[f64]) -> f64 {
        let act = self.activities(x);
        let viol = |v: f64, lo: f64, hi: f64| {
            let below = if lo.is_finite() { (lo - v) / (1.0 + lo.abs()) } else { 0.0 };
            let above = if hi.is_finite() { (v - hi) / (1.0 + hi.abs()) } else { 0.0 };
            below.max(above).max(0.0)
        };
        let rows = (0..self.num_rows()).map(|i| viol(act[i], self.row_lower[i], self.row_upper[i]));
        let cols = (0..self.num_cols()).map(|j| viol(x[j], self.col_lower[j], self.col_upper[j]));
        rows.chain(cols).fold(0.0, f64::max)
    }
}

/// Incremental construction of a [`Problem`].
#[derive(Clone, Debug, Default)]
pub struct ProblemBuilder {
    objective: Vec<f64>,
    col_lower: Vec<f64>,
    col_upper: Vec<f64>,
    row_lower: Vec<f64>,
    row_upper: Vec<f64>,
    triplets: Vec<(usize, usize, f64)>,
    offset: f64,
}

impl ProblemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_col(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.col_lower.push(lower);
        self.col_upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, lower: f64, upper: f64, coeffs: &[(usize, f64)]) -> usize {
        let row = self.row_lower.len();
        self.row_lower.push(lower);
        self.row_upper.push(upper);
        for &(col, v) in coeffs {
            assert!(col < self.objective.len(), "row references unknown column {col}");
            if v != 0.0 {
                self.triplets.push((row, col, v));
            }
        }
        row
    }

    pub fn add_offset(&mut self, value: f64) {
        self.offset += value;
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.row_lower.len()
    }

    pub fn build(self) -> Problem {
        let matrix = CscMatrix::from_triplets(self.row_lower.len(), self.objective.len(), self.triplets);
        Problem {
            objective: self.objective,
            objective_offset: self.offset,
            col_lower: self.col_lower,
            col_upper: self.col_upper,
            row_lower: self.row_lower,
            row_upper: self.row_upper,
            matrix,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Position of one variable (structural or row logical) in a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic at zero: free variables, and boxed variables whose interval
    /// contains zero in a crash basis.
    Zero,
}

/// Statuses of the structural columns followed by the row logicals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basis {
    pub cols: Vec<VarStatus>,
    pub rows: Vec<VarStatus>,
}

impl Basis {
    /// The basis made of all row logicals.
    pub fn slack(num_rows: usize, num_cols: usize) -> Basis {
        Basis { cols: vec![VarStatus::AtLower; num_cols], rows: vec![VarStatus::Basic; num_rows] }
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub row_activity: Vec<f64>,
    /// d(objective) / d(row activity) at the final basis.
    pub row_duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub basis: Basis,
    /// Scaled max bound violation of the returned point.
    pub primal_infeasibility: f64,
    /// |primal - dual| / (1 + |primal|).
    pub duality_gap: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

/// Solves `problem` from a slack basis, or from `options.warm_start`.
pub fn solve(problem: &Problem, options: &SolveOptions) -> Result<LpSolution, LpError> {
    simplex::Simplex::new(problem, options)?.run()
}

#[cfg(test)]
mod tests;

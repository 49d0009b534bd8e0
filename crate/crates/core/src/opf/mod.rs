//! Rolling-horizon DC optimal power flow.
//!
//! The horizon is cut into windows (24 hours by default) solved in order;
//! each window is one multi-period LP and the last hour's dispatch of a
//! window seeds the ramp limits of the next.

mod build;
mod result;
mod simulate;

use std::path::PathBuf;

use thiserror::Error;

use crate::grid::{GenId, Network};
use crate::lp::{LpError, LpStatus};

pub use build::{build_window_lp, solve_lp, ColumnKey, ColumnKind, LinearProgram, RowKey, RowKind};
pub use result::{curtailment_series, extract_lmps, Curtailment, SimulationResult, WindowLog};
pub use simulate::{simulate_horizon, Simulator};

#[derive(Clone, Debug, PartialEq)]
pub struct WindowOptions {
    pub window_hours: usize,
    /// $/MWh charged on unserved demand.
    pub shed_penalty: f64,
    /// $/MWh charged on solar and wind energy left unused.
    pub curtailment_cost: f64,
    pub lp_tolerance: f64,
}

impl Default for WindowOptions {
    fn default() -> Self {
        WindowOptions { window_hours: 24, shed_penalty: 10_000.0, curtailment_cost: 0.0, lp_tolerance: 1e-9 }
    }
}

impl WindowOptions {
    pub fn validate(&self, net: &Network) -> Result<(), OpfError> {
        if self.window_hours == 0 {
            return Err(OpfError::InvalidOptions("window_hours must be at least 1".into()));
        }
        let max_cost = net.max_marginal_cost();
        if !(self.shed_penalty > max_cost) {
            return Err(OpfError::InvalidOptions(format!(
                "shed_penalty {} must exceed the largest marginal cost {max_cost}",
                self.shed_penalty
            )));
        }
        if !(self.curtailment_cost >= 0.0) || !self.curtailment_cost.is_finite() {
            return Err(OpfError::InvalidOptions("curtailment_cost must be finite and non-negative".into()));
        }
        if !(self.lp_tolerance > 0.0 && self.lp_tolerance < 1e-3) {
            return Err(OpfError::InvalidOptions("lp_tolerance must lie in (0, 1e-3)".into()));
        }
        Ok(())
    }

    pub fn window_count(&self, horizon_hours: usize) -> usize {
        horizon_hours.div_ceil(self.window_hours.max(1))
    }
}

#[derive(Debug, Error)]
pub enum OpfError {
    #[error("invalid options: {0}")]
    InvalidOptions(String),
    #[error("window {window} out of range ({windows} windows)")]
    WindowOutOfRange { window: usize, windows: usize },
    #[error("initial dispatch has no entry for generator {0}")]
    MissingInitialDispatch(GenId),
    #[error("profiles do not match the network: {0}")]
    Profiles(String),
    #[error("window {window}: {source}")]
    Solver {
        window: usize,
        #[source]
        source: LpError,
    },
    #[error("window {window}: LP is {status:?}")]
    NotOptimal { window: usize, status: LpStatus },
    #[error("writing {path}: {source}")]
    Export {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

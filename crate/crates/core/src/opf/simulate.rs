use std::collections::BTreeMap;
use std::path::PathBuf;

use log::{debug, info};

use super::build::{build_window_lp, solve_lp, LinearProgram};
use super::result::{SimulationResult, WindowLog};
use super::{OpfError, WindowOptions};
use crate::grid::{GenId, Network, ProfileSet};
use crate::lp::{Basis, LpSolution, LpStatus};

/// Runs rolling-horizon simulations, keeping each window's final basis to
/// warm-start later runs on networks of the same shape.
#[derive(Clone, Debug, Default)]
pub struct Simulator {
    pub opts: WindowOptions,
    /// When set, every window LP is written here as `window_NNNN.lp`.
    pub export_dir: Option<PathBuf>,
    bases: Vec<Option<Basis>>,
}

impl Simulator {
    pub fn new(opts: WindowOptions) -> Self {
        Simulator { opts, export_dir: None, bases: Vec::new() }
    }

    pub fn with_export_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.export_dir = Some(dir.into());
        self
    }

    pub fn simulate(&mut self, net: &Network, profiles: &ProfileSet) -> Result<SimulationResult, OpfError> {
        self.opts.validate(net)?;
        let bad = profiles.validate(net);
        if !bad.is_empty() {
            let msg = bad.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
            return Err(OpfError::Profiles(msg));
        }
        let windows = self.opts.window_count(profiles.horizon_hours);
        self.bases.resize(windows, None);
        let mut result = SimulationResult::empty(net, profiles.horizon_hours);
        let mut initial: Option<BTreeMap<GenId, f64>> = None;
        let mut previous: Option<Basis> = None;

        for k in 0..windows {
            let lp = build_window_lp(net, profiles, k, initial.as_ref(), &self.opts)?;
            if let Some(dir) = &self.export_dir {
                let path = dir.join(format!("window_{k:04}.lp"));
                std::fs::create_dir_all(dir)
                    .and_then(|_| crate::util::write_atomic(&path, lp.to_lp_format().as_bytes()))
                    .map_err(|source| OpfError::Export { path, source })?;
            }
            let fits = |b: &Basis| b.cols.len() == lp.problem.num_cols() && b.rows.len() == lp.problem.num_rows();
            let warm = self.bases[k].take().filter(fits).or_else(|| previous.take().filter(fits));
            let warm_start = warm.is_some();
            let sol = solve_lp(&lp, self.opts.lp_tolerance, warm).map_err(|source| OpfError::Solver { window: k, source })?;
            if sol.status != LpStatus::Optimal {
                return Err(OpfError::NotOptimal { window: k, status: sol.status });
            }
            debug!(
                "window {k}: {} rows, {} cols, {} iterations, objective {}",
                lp.problem.num_rows(),
                lp.problem.num_cols(),
                sol.iterations,
                sol.objective
            );
            append_window(&mut result, net, profiles, &lp, &sol, warm_start, self.opts.lp_tolerance * self.opts.shed_penalty);
            let last = lp.hours - 1;
            initial = Some(net.generators.iter().enumerate().map(|(gi, g)| (g.id, sol.x[lp.dispatch_col(last, gi)])).collect());
            previous = Some(sol.basis.clone());
            self.bases[k] = Some(sol.basis);
        }
        info!(
            "simulated {} hours in {} windows: fuel cost {:.6e}, shed {:.3} MWh",
            result.horizon_hours,
            windows,
            result.fuel_cost,
            result.total_shed_energy()
        );
        Ok(result)
    }
}

fn append_window(
    result: &mut SimulationResult,
    net: &Network,
    profiles: &ProfileSet,
    lp: &LinearProgram,
    sol: &LpSolution,
    warm_start: bool,
    dual_floor: f64,
) {
    let x = &sol.x;
    // Reduced costs of flows are only meaningful at a bound.
    let mu = |j: usize| {
        let d = sol.reduced_costs[j].abs();
        if d > dual_floor {
            d
        } else {
            0.0
        }
    };
    for t in 0..lp.hours {
        let dispatch: Vec<f64> = (0..net.generators.len()).map(|g| x[lp.dispatch_col(t, g)]).collect();
        result.fuel_cost += net.generators.iter().zip(&dispatch).map(|(g, p)| g.marginal_cost * p).sum::<f64>();
        let h = lp.first_hour + t;
        result.available.push(net.generators.iter().map(|g| profiles.available_capacity(g, h)).collect());
        result.dispatch.push(dispatch);
        result.angle.push((0..net.buses.len()).map(|b| x[lp.angle_col(t, b)]).collect());
        result.flow.push((0..net.branches.len()).map(|l| x[lp.flow_col(t, l)]).collect());
        result.dc_flow.push((0..net.dc_elements.len()).map(|d| x[lp.dc_col(t, d)]).collect());
        result.shed.push((0..net.buses.len()).map(|b| x[lp.shed_col(t, b)]).collect());
        result.demand.push((0..net.buses.len()).map(|b| lp.problem.row_lower[lp.balance_row(t, b)]).collect());
        result.lmp.push((0..net.buses.len()).map(|b| sol.row_duals[lp.balance_row(t, b)]).collect());
        result.branch_dual.push((0..net.branches.len()).map(|l| mu(lp.flow_col(t, l))).collect());
        result.dc_dual.push((0..net.dc_elements.len()).map(|d| mu(lp.dc_col(t, d))).collect());
    }
    result.objective += sol.objective;
    result.log.push(WindowLog {
        window: lp.window,
        first_hour: lp.first_hour,
        hours: lp.hours,
        rows: lp.problem.num_rows(),
        cols: lp.problem.num_cols(),
        iterations: sol.iterations,
        objective: sol.objective,
        warm_start,
    });
}

/// Simulates the whole horizon with fresh solver state.
pub fn simulate_horizon(net: &Network, profiles: &ProfileSet, opts: &WindowOptions) -> Result<SimulationResult, OpfError> {
    Simulator::new(opts.clone()).simulate(net, profiles)
}

use serde::{Deserialize, Serialize};

use crate::grid::{BranchId, BusId, DcId, Fuel, GenId, Network, ProfileSet};

/// Per-window solver statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowLog {
    pub window: usize,
    pub first_hour: usize,
    pub hours: usize,
    pub rows: usize,
    pub cols: usize,
    pub iterations: usize,
    pub objective: f64,
    pub warm_start: bool,
}

/// Hourly primal and dual values of a full-horizon simulation.
///
/// Every hourly table is indexed `[hour][entity]` with entities in the
/// order of the id lists, which follow network table order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub horizon_hours: usize,
    pub generator_ids: Vec<GenId>,
    pub bus_ids: Vec<BusId>,
    pub branch_ids: Vec<BranchId>,
    pub dc_ids: Vec<DcId>,
    /// MW.
    pub dispatch: Vec<Vec<f64>>,
    /// Effective upper bound of each generator, MW.
    pub available: Vec<Vec<f64>>,
    /// MW, positive from `from_bus` to `to_bus`.
    pub flow: Vec<Vec<f64>>,
    pub dc_flow: Vec<Vec<f64>>,
    /// Radians.
    pub angle: Vec<Vec<f64>>,
    /// Bus demand, MW.
    pub demand: Vec<Vec<f64>>,
    pub shed: Vec<Vec<f64>>,
    /// $/MWh.
    pub lmp: Vec<Vec<f64>>,
    /// Non-negative value of one more MW of branch capacity, $/MWh.
    pub branch_dual: Vec<Vec<f64>>,
    pub dc_dual: Vec<Vec<f64>>,
    /// Sum of marginal cost times dispatch, $.
    pub fuel_cost: f64,
    /// Sum of the window objectives, including penalty terms, $.
    pub objective: f64,
    pub log: Vec<WindowLog>,
}

impl SimulationResult {
    pub(crate) fn empty(net: &Network, horizon_hours: usize) -> SimulationResult {
        SimulationResult {
            horizon_hours,
            generator_ids: net.generators.iter().map(|g| g.id).collect(),
            bus_ids: net.buses.iter().map(|b| b.id).collect(),
            branch_ids: net.branches.iter().map(|b| b.id).collect(),
            dc_ids: net.dc_elements.iter().map(|d| d.id).collect(),
            dispatch: Vec::with_capacity(horizon_hours),
            available: Vec::with_capacity(horizon_hours),
            flow: Vec::with_capacity(horizon_hours),
            dc_flow: Vec::with_capacity(horizon_hours),
            angle: Vec::with_capacity(horizon_hours),
            demand: Vec::with_capacity(horizon_hours),
            shed: Vec::with_capacity(horizon_hours),
            lmp: Vec::with_capacity(horizon_hours),
            branch_dual: Vec::with_capacity(horizon_hours),
            dc_dual: Vec::with_capacity(horizon_hours),
            fuel_cost: 0.0,
            objective: 0.0,
            log: Vec::new(),
        }
    }

    /// Whether the result's entity lists line up with `net`.
    pub fn matches(&self, net: &Network) -> bool {
        self.generator_ids.iter().copied().eq(net.generators.iter().map(|g| g.id))
            && self.bus_ids.iter().copied().eq(net.buses.iter().map(|b| b.id))
            && self.branch_ids.iter().copied().eq(net.branches.iter().map(|b| b.id))
            && self.dc_ids.iter().copied().eq(net.dc_elements.iter().map(|d| d.id))
    }

    pub fn total_dispatch(&self, hour: usize) -> f64 {
        self.dispatch[hour].iter().sum()
    }

    pub fn total_shed(&self, hour: usize) -> f64 {
        self.shed[hour].iter().sum()
    }

    pub fn total_demand(&self, hour: usize) -> f64 {
        self.demand[hour].iter().sum()
    }

    pub fn total_shed_energy(&self) -> f64 {
        (0..self.horizon_hours).map(|t| self.total_shed(t)).sum()
    }
}

/// LMP per `[hour][bus]`, $/MWh.
pub fn extract_lmps(result: &SimulationResult) -> Vec<Vec<f64>> {
    result.lmp.clone()
}

/// Unused available energy of profiled plants, `[hour][plant]` in MW.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curtailment {
    /// Solar and wind plants.
    pub plants: Vec<GenId>,
    pub hourly: Vec<Vec<f64>>,
    /// Hydro plants, reported apart from solar and wind.
    pub hydro_plants: Vec<GenId>,
    pub hydro_hourly: Vec<Vec<f64>>,
}

impl Curtailment {
    pub fn total(&self, hour: usize) -> f64 {
        self.hourly[hour].iter().sum()
    }
}

pub fn curtailment_series(result: &SimulationResult, net: &Network, profiles: &ProfileSet) -> Curtailment {
    let pick = |want: &dyn Fn(Fuel) -> bool| -> Vec<usize> {
        net.generators.iter().enumerate().filter(|(_, g)| g.profiled && want(g.fuel)).map(|(i, _)| i).collect()
    };
    let vre = pick(&|f| f.is_variable_renewable());
    let hydro = pick(&|f| f == Fuel::Hydro);
    let series = |idx: &[usize]| -> Vec<Vec<f64>> {
        (0..result.horizon_hours)
            .map(|t| {
                idx.iter()
                    .map(|&gi| profiles.available_capacity(&net.generators[gi], t) - result.dispatch[t][gi])
                    .collect()
            })
            .collect()
    };
    Curtailment {
        plants: vre.iter().map(|&i| net.generators[i].id).collect(),
        hourly: series(&vre),
        hydro_plants: hydro.iter().map(|&i| net.generators[i].id).collect(),
        hydro_hourly: series(&hydro),
    }
}

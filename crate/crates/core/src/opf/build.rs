use std::collections::BTreeMap;
use std::fmt;

use super::{OpfError, WindowOptions};
use crate::grid::{BranchId, BusId, DcId, GenId, Network, ProfileSet};
use crate::lp::{self, Basis, LpError, LpSolution, Problem, ProblemBuilder, SolveOptions, VarStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColumnKind {
    Dispatch(GenId),
    Angle(BusId),
    Flow(BranchId),
    DcFlow(DcId),
    Shed(BusId),
}

/// A column's model entity and absolute hour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColumnKey {
    pub kind: ColumnKind,
    pub hour: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowKind {
    Balance(BusId),
    FlowDefinition(BranchId),
    Ramp(GenId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowKey {
    pub kind: RowKind,
    pub hour: usize,
}

impl fmt::Display for ColumnKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.hour;
        match self.kind {
            ColumnKind::Dispatch(g) => write!(f, "p_g{g}_h{h}"),
            ColumnKind::Angle(b) => write!(f, "theta_b{b}_h{h}"),
            ColumnKind::Flow(l) => write!(f, "f_l{l}_h{h}"),
            ColumnKind::DcFlow(d) => write!(f, "fdc_d{d}_h{h}"),
            ColumnKind::Shed(b) => write!(f, "shed_b{b}_h{h}"),
        }
    }
}

impl fmt::Display for RowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.hour;
        match self.kind {
            RowKind::Balance(b) => write!(f, "bal_b{b}_h{h}"),
            RowKind::FlowDefinition(l) => write!(f, "flow_l{l}_h{h}"),
            RowKind::Ramp(g) => write!(f, "ramp_g{g}_h{h}"),
        }
    }
}

/// One window's LP together with the model meaning of every row and column.
///
/// Columns are hour-major: for each hour, dispatch (network generator
/// order), angles, AC flows, DC flows, then shed. Rows are hour-major
/// balance then flow-definition rows, followed by all ramp rows.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub problem: Problem,
    pub columns: Vec<ColumnKey>,
    pub rows: Vec<RowKey>,
    pub window: usize,
    pub first_hour: usize,
    pub hours: usize,
    /// Starting basis: shed basic in balance rows, flow basic in flow rows.
    pub crash_basis: Basis,
    layout: Layout,
}

#[derive(Clone, Copy, Debug)]
struct Layout {
    gens: usize,
    buses: usize,
    branches: usize,
    dcs: usize,
}

impl Layout {
    fn stride(&self) -> usize {
        self.gens + 2 * self.buses + self.branches + self.dcs
    }
    fn row_stride(&self) -> usize {
        self.buses + self.branches
    }
    fn dispatch(&self, t: usize, gen: usize) -> usize {
        t * self.stride() + gen
    }
    fn angle(&self, t: usize, bus: usize) -> usize {
        t * self.stride() + self.gens + bus
    }
    fn flow(&self, t: usize, branch: usize) -> usize {
        t * self.stride() + self.gens + self.buses + branch
    }
    fn dc(&self, t: usize, dc: usize) -> usize {
        t * self.stride() + self.gens + self.buses + self.branches + dc
    }
    fn shed(&self, t: usize, bus: usize) -> usize {
        t * self.stride() + self.gens + self.buses + self.branches + self.dcs + bus
    }
    fn balance_row(&self, t: usize, bus: usize) -> usize {
        t * self.row_stride() + bus
    }
    fn flow_row(&self, t: usize, branch: usize) -> usize {
        t * self.row_stride() + self.buses + branch
    }
}

impl LinearProgram {
    pub fn dispatch_col(&self, t: usize, gen: usize) -> usize {
        self.layout.dispatch(t, gen)
    }

    pub fn angle_col(&self, t: usize, bus: usize) -> usize {
        self.layout.angle(t, bus)
    }

    pub fn flow_col(&self, t: usize, branch: usize) -> usize {
        self.layout.flow(t, branch)
    }

    pub fn dc_col(&self, t: usize, dc: usize) -> usize {
        self.layout.dc(t, dc)
    }

    pub fn shed_col(&self, t: usize, bus: usize) -> usize {
        self.layout.shed(t, bus)
    }

    pub fn balance_row(&self, t: usize, bus: usize) -> usize {
        self.layout.balance_row(t, bus)
    }

    pub fn flow_row(&self, t: usize, branch: usize) -> usize {
        self.layout.flow_row(t, branch)
    }

    pub fn num_ramp_rows(&self) -> usize {
        self.rows.len() - self.hours * self.layout.row_stride()
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.to_string()).collect()
    }

    pub fn row_names(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.to_string()).collect()
    }

    pub fn to_lp_format(&self) -> String {
        let title = format!("window {} hours {}..{}", self.window, self.first_hour, self.first_hour + self.hours);
        lp::write_lp_format(&self.problem, &title, &self.column_names(), &self.row_names())
    }
}

/// Whether a ramp limit can ever bind for this generator. Profiled units
/// follow their availability and are not ramp-constrained.
pub(crate) fn ramp_applies(g: &crate::grid::Generator) -> bool {
    !g.profiled && g.ramp_limit.is_finite() && g.ramp_limit < g.capacity
}

/// Builds the LP of window `window`. `initial_dispatch`, when non-empty,
/// gives every generator's output in the hour before the window.
pub fn build_window_lp(
    net: &Network,
    profiles: &ProfileSet,
    window: usize,
    initial_dispatch: Option<&BTreeMap<GenId, f64>>,
    opts: &WindowOptions,
) -> Result<LinearProgram, OpfError> {
    opts.validate(net)?;
    let windows = opts.window_count(profiles.horizon_hours);
    if window >= windows {
        return Err(OpfError::WindowOutOfRange { window, windows });
    }
    let initial = initial_dispatch.filter(|m| !m.is_empty());
    if let Some(init) = initial {
        if let Some(g) = net.generators.iter().find(|g| !init.contains_key(&g.id)) {
            return Err(OpfError::MissingInitialDispatch(g.id));
        }
    }
    let first_hour = window * opts.window_hours;
    let hours = opts.window_hours.min(profiles.horizon_hours - first_hour);
    let layout = Layout {
        gens: net.generators.len(),
        buses: net.buses.len(),
        branches: net.branches.len(),
        dcs: net.dc_elements.len(),
    };

    let bus_pos = |id: BusId| net.bus_index(id).expect("validated network");
    let mut gens_at: Vec<Vec<usize>> = vec![Vec::new(); layout.buses];
    for (gi, g) in net.generators.iter().enumerate() {
        gens_at[bus_pos(g.bus)].push(gi);
    }
    let mut inflow: Vec<Vec<(usize, f64)>> = vec![Vec::new(); layout.buses];
    let mut dc_inflow: Vec<Vec<(usize, f64)>> = vec![Vec::new(); layout.buses];
    for (li, br) in net.branches.iter().enumerate() {
        inflow[bus_pos(br.from_bus)].push((li, -1.0));
        inflow[bus_pos(br.to_bus)].push((li, 1.0));
    }
    for (di, dc) in net.dc_elements.iter().enumerate() {
        dc_inflow[bus_pos(dc.from_bus)].push((di, -1.0));
        dc_inflow[bus_pos(dc.to_bus)].push((di, 1.0));
    }

    let mut b = ProblemBuilder::new();
    let mut columns = Vec::with_capacity(hours * layout.stride());
    for t in 0..hours {
        let h = first_hour + t;
        for g in &net.generators {
            let avail = profiles.available_capacity(g, h);
            let (mut lo, mut hi) = (0.0, avail);
            if t == 0 && ramp_applies(g) {
                if let Some(init) = initial {
                    let p0 = init[&g.id];
                    lo = (p0 - g.ramp_limit).max(0.0);
                    hi = (p0 + g.ramp_limit).min(avail).max(lo);
                }
            }
            let mut cost = g.marginal_cost;
            if g.fuel.is_variable_renewable() && opts.curtailment_cost > 0.0 {
                cost -= opts.curtailment_cost;
                b.add_offset(opts.curtailment_cost * avail);
            }
            b.add_col(cost, lo, hi);
            columns.push(ColumnKey { kind: ColumnKind::Dispatch(g.id), hour: h });
        }
        for (bi, bus) in net.buses.iter().enumerate() {
            if net.is_reference_bus(bi) {
                b.add_col(0.0, 0.0, 0.0);
            } else {
                b.add_col(0.0, f64::NEG_INFINITY, f64::INFINITY);
            }
            columns.push(ColumnKey { kind: ColumnKind::Angle(bus.id), hour: h });
        }
        for br in &net.branches {
            b.add_col(0.0, -br.capacity, br.capacity);
            columns.push(ColumnKey { kind: ColumnKind::Flow(br.id), hour: h });
        }
        for dc in &net.dc_elements {
            b.add_col(0.0, -dc.capacity, dc.capacity);
            columns.push(ColumnKey { kind: ColumnKind::DcFlow(dc.id), hour: h });
        }
        for bus in &net.buses {
            b.add_col(opts.shed_penalty, 0.0, f64::INFINITY);
            columns.push(ColumnKey { kind: ColumnKind::Shed(bus.id), hour: h });
        }
    }

    let l = layout;
    let mut rows = Vec::new();
    let mut coeffs = Vec::new();
    for t in 0..hours {
        let h = first_hour + t;
        let demand = profiles.bus_demand(net, h);
        for (bi, bus) in net.buses.iter().enumerate() {
            coeffs.clear();
            coeffs.extend(gens_at[bi].iter().map(|&gi| (l.dispatch(t, gi), 1.0)));
            coeffs.extend(inflow[bi].iter().map(|&(li, s)| (l.flow(t, li), s)));
            coeffs.extend(dc_inflow[bi].iter().map(|&(di, s)| (l.dc(t, di), s)));
            coeffs.push((l.shed(t, bi), 1.0));
            b.add_row(demand[bi], demand[bi], &coeffs);
            rows.push(RowKey { kind: RowKind::Balance(bus.id), hour: h });
        }
        for (li, br) in net.branches.iter().enumerate() {
            let k = net.base_mva * br.susceptance;
            let row = [
                (l.flow(t, li), 1.0),
                (l.angle(t, bus_pos(br.from_bus)), -k),
                (l.angle(t, bus_pos(br.to_bus)), k),
            ];
            b.add_row(0.0, 0.0, &row);
            rows.push(RowKey { kind: RowKind::FlowDefinition(br.id), hour: h });
        }
    }
    for (gi, g) in net.generators.iter().enumerate() {
        if !ramp_applies(g) {
            continue;
        }
        for t in 1..hours {
            let row = [(l.dispatch(t, gi), 1.0), (l.dispatch(t - 1, gi), -1.0)];
            b.add_row(-g.ramp_limit, g.ramp_limit, &row);
            rows.push(RowKey { kind: RowKind::Ramp(g.id), hour: first_hour + t });
        }
    }

    let problem = b.build();
    let crash_basis = crash_basis(&problem, &layout, hours);
    Ok(LinearProgram { problem, columns, rows, window, first_hour, hours, crash_basis, layout })
}

/// Shed columns carry the balance rows and flow columns the flow rows, so
/// the start is primal feasible except for ramp rows at window edges.
fn crash_basis(p: &Problem, l: &Layout, hours: usize) -> Basis {
    let mut cols: Vec<VarStatus> = (0..p.num_cols())
        .map(|j| {
            let (lo, hi) = (p.col_lower[j], p.col_upper[j]);
            if lo == 0.0 || (lo > 0.0 && lo.is_finite()) {
                VarStatus::AtLower
            } else if hi == 0.0 || hi < 0.0 {
                VarStatus::AtUpper
            } else {
                VarStatus::Zero
            }
        })
        .collect();
    let mut rows = vec![VarStatus::Basic; p.num_rows()];
    for t in 0..hours {
        for bi in 0..l.buses {
            cols[l.shed(t, bi)] = VarStatus::Basic;
            rows[l.balance_row(t, bi)] = VarStatus::AtLower;
        }
        for li in 0..l.branches {
            cols[l.flow(t, li)] = VarStatus::Basic;
            rows[l.flow_row(t, li)] = VarStatus::AtLower;
        }
    }
    Basis { cols, rows }
}

/// Solves a window LP from its crash basis, or from `warm_start`.
pub fn solve_lp(lp: &LinearProgram, tolerance: f64, warm_start: Option<Basis>) -> Result<LpSolution, LpError> {
    let opts = SolveOptions {
        primal_tolerance: tolerance,
        dual_tolerance: tolerance,
        warm_start: Some(warm_start.unwrap_or_else(|| lp.crash_basis.clone())),
        ..SolveOptions::default()
    };
    lp::solve(&lp.problem, &opts)
}

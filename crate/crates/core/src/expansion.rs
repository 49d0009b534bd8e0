//! Congestion-guided AC upgrade loop: simulate, check goals, widen the
//! corridors with the highest congestion rent per MW-mile, repeat.

use std::path::Path;

use log::info;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{BranchId, Network, ProfileSet};
use crate::opf::{OpfError, SimulationResult, Simulator, WindowOptions};
use crate::scenario::{goal_accounting, GoalSpec, PoolOutcome, ScenarioError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchCongestion {
    pub branch: BranchId,
    /// Share of hours with |f| >= (1 - eps) cap.
    pub binding_frequency: f64,
    /// Sum over hours of flow-limit dual times capacity, $.
    pub congestion_rent: f64,
    pub benefit_per_mw_mile: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CongestionStats {
    pub branches: Vec<BranchCongestion>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionParams {
    pub epsilon: f64,
    pub min_binding_frequency: f64,
    pub top_k: usize,
    pub alpha: f64,
    pub max_iterations: usize,
}

impl Default for ExpansionParams {
    fn default() -> Self {
        ExpansionParams { epsilon: 0.01, min_binding_frequency: 0.05, top_k: 10, alpha: 0.5, max_iterations: 50 }
    }
}

impl ExpansionParams {
    pub fn validate(&self) -> Result<(), ExpansionError> {
        let bad = |m: &str| Err(ExpansionError::InvalidParams(m.into()));
        if !(self.epsilon > 0.0 && self.epsilon <= 0.1) {
            return bad("epsilon must lie in (0, 0.1]");
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return bad("alpha must be positive");
        }
        if self.top_k == 0 {
            return bad("top_k must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.min_binding_frequency) {
            return bad("min_binding_frequency must lie in [0, 1]");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpgradeRecord {
    pub iteration: usize,
    pub branch: BranchId,
    pub old_capacity_mw: f64,
    pub new_capacity_mw: f64,
    pub added_mw_miles: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub pools: Vec<PoolOutcome>,
    pub all_met: bool,
    /// Cumulative upgrades before this iteration's simulation.
    pub upgrade_tw_miles: f64,
    pub objective: f64,
    pub fuel_cost: f64,
    pub upgraded: Vec<BranchId>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpansionPlan {
    pub upgrades: Vec<UpgradeRecord>,
    pub iterations: Vec<IterationLog>,
}

impl ExpansionPlan {
    pub fn met(&self) -> bool {
        self.iterations.last().is_some_and(|l| l.all_met)
    }

    pub fn total_mw_miles(&self) -> f64 {
        self.upgrades.iter().fold(0.0, |acc, u| acc + u.added_mw_miles)
    }

    pub fn upgrades_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["iteration", "branch_id", "old_capacity_mw", "new_capacity_mw", "added_mw_miles"])
            .expect("in-memory");
        for u in &self.upgrades {
            w.write_record([
                u.iteration.to_string(),
                u.branch.to_string(),
                crate::util::sig6(u.old_capacity_mw),
                crate::util::sig6(u.new_capacity_mw),
                crate::util::sig6(u.added_mw_miles),
            ])
            .expect("in-memory");
        }
        String::from_utf8(w.into_inner().expect("in-memory")).expect("utf8")
    }

    /// `upgrades.csv` and `expansion_log.json` in `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        crate::util::write_atomic(&dir.join("upgrades.csv"), self.upgrades_csv().as_bytes())?;
        let log = serde_json::to_string_pretty(&self.iterations).expect("serializable");
        crate::util::write_atomic(&dir.join("expansion_log.json"), log.as_bytes())
    }
}

#[derive(Debug, Error)]
pub enum ExpansionError {
    #[error("invalid expansion parameters: {0}")]
    InvalidParams(String),
    #[error("unknown branch {0}")]
    UnknownBranch(BranchId),
    #[error(
        "expansion stalled at iteration {iteration}: goals unmet and no branch is congested often enough to upgrade; \
         renewable capacity rather than transmission is binding"
    )]
    Stalled { iteration: usize, plan: Box<ExpansionPlan> },
    #[error(transparent)]
    Simulation(#[from] OpfError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

pub fn congestion_stats(result: &SimulationResult, net: &Network, epsilon: f64) -> CongestionStats {
    let hours = result.horizon_hours;
    let branches = net
        .branches
        .iter()
        .enumerate()
        .map(|(li, b)| {
            let mut binding = 0usize;
            let mut rent = 0.0;
            for t in 0..hours {
                if result.flow[t][li].abs() >= (1.0 - epsilon) * b.capacity {
                    binding += 1;
                }
                rent += result.branch_dual[t][li].max(0.0) * b.capacity;
            }
            let freq = if hours == 0 { 0.0 } else { binding as f64 / hours as f64 };
            let denom = b.capacity * b.length.max(1.0);
            BranchCongestion {
                branch: b.id,
                binding_frequency: freq,
                congestion_rent: rent,
                benefit_per_mw_mile: if denom > 0.0 { rent / denom } else { 0.0 },
            }
        })
        .collect();
    CongestionStats { branches }
}

pub fn rank_upgrades(stats: &CongestionStats, params: &ExpansionParams) -> Vec<BranchId> {
    let mut cand: Vec<&BranchCongestion> =
        stats.branches.iter().filter(|b| b.binding_frequency > 0.0 && b.binding_frequency >= params.min_binding_frequency).collect();
    cand.sort_by(|a, b| b.benefit_per_mw_mile.total_cmp(&a.benefit_per_mw_mile).then(a.branch.cmp(&b.branch)));
    cand.into_iter().take(params.top_k).map(|b| b.branch).collect()
}

/// Scales each listed branch by (1 + alpha); susceptances are unchanged.
pub fn apply_upgrades(
    net: &Network,
    ids: &[BranchId],
    alpha: f64,
    iteration: usize,
) -> Result<(Network, Vec<UpgradeRecord>), ExpansionError> {
    let mut branches = net.branches.clone();
    let mut records = Vec::with_capacity(ids.len());
    for &id in ids {
        let i = net.branch_index(id).ok_or(ExpansionError::UnknownBranch(id))?;
        let b = &mut branches[i];
        let old = b.capacity;
        b.capacity = old * (1.0 + alpha);
        records.push(UpgradeRecord {
            iteration,
            branch: id,
            old_capacity_mw: old,
            new_capacity_mw: b.capacity,
            added_mw_miles: alpha * old * b.length,
        });
    }
    if records.is_empty() {
        return Ok((net.clone(), records));
    }
    let out = net.with_tables(branches, net.dc_elements.clone(), net.generators.clone()).map_err(ScenarioError::from)?;
    Ok((out, records))
}

pub struct ExpansionOutcome {
    pub network: Network,
    pub plan: ExpansionPlan,
    /// Simulation of the final network.
    pub result: SimulationResult,
}

/// Runs the loop on a network that already carries the scenario's
/// renewables and Macro Grid design. Stops once every pool is met or after
/// `max_iterations` simulations.
pub fn expand_until_goal(
    net: &Network,
    profiles: &ProfileSet,
    goals: &GoalSpec,
    params: &ExpansionParams,
    opts: &WindowOptions,
) -> Result<ExpansionOutcome, ExpansionError> {
    params.validate()?;
    goals.validate(net)?;
    let mut sim = Simulator::new(opts.clone());
    let mut network = net.clone();
    let mut plan = ExpansionPlan::default();
    let mut iteration = 0;
    loop {
        let result = sim.simulate(&network, profiles)?;
        let pools = goal_accounting(&result, &network, goals);
        let all_met = pools.iter().all(|p| p.met);
        let mut log = IterationLog {
            iteration,
            pools,
            all_met,
            upgrade_tw_miles: plan.total_mw_miles() / 1e6,
            objective: result.objective,
            fuel_cost: result.fuel_cost,
            upgraded: Vec::new(),
        };
        info!(
            "expansion iteration {iteration}: objective {:.6e}, {} of {} pools met",
            result.objective,
            log.pools.iter().filter(|p| p.met).count(),
            log.pools.len()
        );
        if all_met || iteration + 1 >= params.max_iterations {
            plan.iterations.push(log);
            return Ok(ExpansionOutcome { network, plan, result });
        }
        let ids = rank_upgrades(&congestion_stats(&result, &network, params.epsilon), params);
        if ids.is_empty() {
            plan.iterations.push(log);
            return Err(ExpansionError::Stalled { iteration, plan: Box::new(plan) });
        }
        let (next, records) = apply_upgrades(&network, &ids, params.alpha, iteration)?;
        log.upgraded = ids;
        plan.iterations.push(log);
        plan.upgrades.extend(records);
        network = next;
        iteration += 1;
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::grid::testnet::*;
    use crate::grid::{Fuel, Interconnection};

    fn result_with(flows: Vec<Vec<f64>>, duals: Vec<Vec<f64>>) -> SimulationResult {
        let net = two_bus_congested();
        let mut r = crate::opf::simulate_horizon(&net, &constant_profiles(&net, flows.len(), &[(1, 1.0)], 1.0), &WindowOptions::default())
            .unwrap();
        r.flow = flows;
        r.branch_dual = duals;
        r
    }

    #[test]
    fn stats_hand_cases() {
        let net = two_bus_congested();
        let cap = net.branches[0].capacity;
        let len = net.branches[0].length;
        let r = result_with(vec![vec![0.5 * cap]; 24], vec![vec![0.0]; 24]);
        let s = congestion_stats(&r, &net, 0.01);
        assert_eq!(s.branches[0].binding_frequency, 0.0);
        assert_eq!(s.branches[0].congestion_rent, 0.0);

        let flows = (0..24).map(|t| vec![if t < 12 { -cap } else { 0.2 * cap }]).collect();
        let duals = (0..24).map(|t| vec![if t < 12 { 5.0 } else { 0.0 }]).collect();
        let s = congestion_stats(&result_with(flows, duals), &net, 0.01);
        assert_eq!(s.branches[0].binding_frequency, 0.5);
        assert!((s.branches[0].congestion_rent - 12.0 * 5.0 * cap).abs() < 1e-9);
        assert!((s.branches[0].benefit_per_mw_mile - 60.0 / len.max(1.0)).abs() < 1e-9);

        let s = congestion_stats(&result_with(vec![vec![cap]; 24], vec![vec![1.0]; 24]), &net, 0.0);
        assert_eq!(s.branches[0].binding_frequency, 1.0);
    }

    fn entry(id: u32, freq: f64, benefit: f64) -> BranchCongestion {
        BranchCongestion { branch: BranchId(id), binding_frequency: freq, congestion_rent: benefit, benefit_per_mw_mile: benefit }
    }

    #[test]
    fn ranking() {
        let p = ExpansionParams::default();
        let zero = CongestionStats { branches: vec![entry(1, 0.0, 0.0), entry(2, 0.0, 0.0)] };
        assert!(rank_upgrades(&zero, &p).is_empty());
        let two = CongestionStats { branches: vec![entry(1, 0.5, 7.0), entry(2, 0.5, 9.0), entry(3, 0.01, 100.0)] };
        assert_eq!(rank_upgrades(&two, &p), vec![BranchId(2), BranchId(1)]);
        let tie = CongestionStats { branches: vec![entry(4, 0.5, 3.0), entry(2, 0.5, 3.0)] };
        assert_eq!(rank_upgrades(&tie, &p), vec![BranchId(2), BranchId(4)]);
        let one = ExpansionParams { top_k: 1, ..p };
        assert_eq!(rank_upgrades(&two, &one), vec![BranchId(2)]);
    }

    #[test]
    fn upgrade_arithmetic() {
        let ic = Interconnection::Eastern;
        let net = Network::new(
            "u",
            100.0,
            vec![bus(1, 1, "AA", ic, 0.5), bus(2, 1, "AA", ic, 0.5), bus(3, 1, "AA", ic, 0.0)],
            vec![line(1, 1, 2, 100.0, 10.0), line(2, 2, 3, 200.0, 50.0)],
            vec![],
            vec![],
            vec![zone(1, "AA", ic)],
        )
        .unwrap();
        let (out, rec) = apply_upgrades(&net, &[BranchId(1), BranchId(2)], 0.5, 0).unwrap();
        assert_eq!(out.branches[0].capacity, 150.0);
        assert_eq!(out.branches[1].susceptance, net.branches[1].susceptance);
        assert_eq!(rec[1].added_mw_miles, 5000.0);
        let (same, none) = apply_upgrades(&net, &[], 0.5, 0).unwrap();
        assert_eq!(same, net);
        assert!(none.is_empty());
        assert!(matches!(apply_upgrades(&net, &[BranchId(9)], 0.5, 0), Err(ExpansionError::UnknownBranch(_))));
    }

    /// 60 MW of free wind in state WW behind a 10 MW line to a 50 MW load in
    /// LL, with gas one hop further. The pool needs 60% of 50 MW each hour.
    fn behind_the_bottleneck() -> Network {
        let ic = Interconnection::Western;
        Network::new(
            "b",
            100.0,
            vec![bus(1, 1, "WW", ic, 1.0), bus(2, 2, "LL", ic, 1.0), bus(3, 2, "LL", ic, 0.0)],
            vec![line(1, 1, 2, 10.0, 100.0), line(2, 3, 2, 1000.0, 20.0)],
            vec![],
            vec![gen(1, 1, Fuel::Wind, 60.0, 0.0), gen(2, 3, Fuel::Ng, 200.0, 40.0)],
            vec![zone(1, "WW", ic), zone(2, "LL", ic)],
        )
        .unwrap()
    }

    fn pool_goal(frac: f64) -> GoalSpec {
        GoalSpec {
            states: BTreeMap::from([("WW".into(), frac), ("LL".into(), frac)]),
            pools: vec![vec!["WW".into(), "LL".into()]],
            ..Default::default()
        }
    }

    #[test]
    fn loop_widens_the_bottleneck_until_met() {
        let net = behind_the_bottleneck();
        let prof = constant_profiles(&net, 24, &[(1, 0.0), (2, 50.0)], 1.0);
        let out = expand_until_goal(&net, &prof, &pool_goal(0.6), &ExpansionParams::default(), &WindowOptions::default()).unwrap();
        // 10 -> 15 -> 22.5 -> 33.75 MW; delivery first reaches 30 MW/h at 33.75.
        let caps: Vec<f64> = out.plan.upgrades.iter().map(|u| u.new_capacity_mw).collect();
        assert_eq!(caps, vec![15.0, 22.5, 33.75]);
        assert!(out.plan.upgrades.iter().all(|u| u.branch == BranchId(1)));
        assert_eq!(out.plan.iterations.len(), 4);
        assert!(out.plan.met());
        let added: f64 = (33.75 - 10.0) * 100.0;
        assert!((out.plan.total_mw_miles() - added).abs() < 1e-9);
        let delivered = &out.plan.iterations.iter().map(|l| l.pools[0].delivered_twh * 1e6 / 24.0).collect::<Vec<_>>();
        for (d, want) in delivered.iter().zip([10.0, 15.0, 22.5, 33.75]) {
            assert!((d - want).abs() < 1e-6, "{delivered:?}");
        }
        let costs: Vec<f64> = out.plan.iterations.iter().map(|l| l.objective).collect();
        assert!(costs.windows(2).all(|w| w[1] <= w[0] + 1e-6));
        assert_eq!(out.network.branches[0].capacity, 33.75);
    }

    #[test]
    fn met_goal_needs_no_upgrades_and_limits_terminate() {
        let net = behind_the_bottleneck();
        let prof = constant_profiles(&net, 24, &[(1, 0.0), (2, 50.0)], 1.0);
        let out = expand_until_goal(&net, &prof, &pool_goal(0.1), &ExpansionParams::default(), &WindowOptions::default()).unwrap();
        assert!(out.plan.upgrades.is_empty() && out.plan.met());
        assert_eq!(out.plan.iterations.len(), 1);

        let one = ExpansionParams { max_iterations: 1, ..Default::default() };
        let out = expand_until_goal(&net, &prof, &pool_goal(1.0), &one, &WindowOptions::default()).unwrap();
        assert!(!out.plan.met());
        assert_eq!(out.plan.iterations.len(), 1);
    }

    #[test]
    fn unreachable_goal_stalls() {
        // 60 MW of wind cannot supply 100% of 50 MW plus nothing congests
        // once the line exceeds 60 MW.
        let net = behind_the_bottleneck();
        let prof = constant_profiles(&net, 24, &[(1, 0.0), (2, 50.0)], 0.5);
        let err = expand_until_goal(&net, &prof, &pool_goal(1.0), &ExpansionParams::default(), &WindowOptions::default());
        match err {
            Err(ExpansionError::Stalled { plan, .. }) => {
                assert!(!plan.met());
                assert!(plan.upgrades.iter().all(|u| u.branch == BranchId(1)));
                assert!(plan.iterations.len() <= 50);
            }
            other => panic!("expected stall, got {:?}", other.map(|o| o.plan)),
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::grid::{Fuel, Interconnection, Network};
use crate::opf::SimulationResult;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GoalKind {
    /// Solar, wind and geothermal.
    #[default]
    Renewable,
    /// Renewable plus hydro and nuclear.
    Clean,
}

impl GoalKind {
    pub fn qualifies(self, fuel: Fuel) -> bool {
        match self {
            GoalKind::Renewable => fuel.is_renewable(),
            GoalKind::Clean => fuel.is_clean(),
        }
    }
}

/// State energy goals and the pools allowed to meet them jointly. States
/// with a goal outside every listed pool form a pool of their own.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    #[serde(default)]
    pub kind: GoalKind,
    /// State -> fraction of its demand.
    #[serde(default)]
    pub states: BTreeMap<String, f64>,
    #[serde(default)]
    pub pools: Vec<Vec<String>>,
    #[serde(default)]
    pub cross_seam_pooling: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolOutcome {
    pub states: Vec<String>,
    pub target_twh: f64,
    pub delivered_twh: f64,
    pub met: bool,
}

fn state_interconnections(net: &Network, state: &str) -> BTreeSet<Interconnection> {
    net.buses.iter().filter(|b| b.state == state).map(|b| b.interconnection).collect()
}

impl GoalSpec {
    pub fn validate(&self, net: &Network) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::InvalidGoals(m));
        for (s, f) in &self.states {
            if !(0.0..=1.0).contains(f) {
                return bad(format!("goal for {s} is {f}, outside [0, 1]"));
            }
            if state_interconnections(net, s).is_empty() {
                return Err(ScenarioError::UnknownState(s.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for pool in &self.pools {
            let mut ics = BTreeSet::new();
            for s in pool {
                if !self.states.contains_key(s) {
                    return bad(format!("pooled state {s} has no goal"));
                }
                if !seen.insert(s.as_str()) {
                    return bad(format!("state {s} appears in more than one pool"));
                }
                ics.extend(state_interconnections(net, s));
            }
            if !self.cross_seam_pooling && ics.len() > 1 {
                return bad(format!("pool {} spans interconnections without cross-seam pooling", pool.join("+")));
            }
        }
        Ok(())
    }

    /// Explicit pools followed by singleton pools for the remaining goal
    /// states, each sorted by state code.
    pub fn resolved_pools(&self) -> Vec<Vec<String>> {
        let pooled: BTreeSet<&String> = self.pools.iter().flatten().collect();
        let mut out: Vec<Vec<String>> = self
            .pools
            .iter()
            .map(|p| {
                let mut p = p.clone();
                p.sort();
                p
            })
            .collect();
        out.extend(self.states.keys().filter(|s| !pooled.contains(s)).map(|s| vec![s.clone()]));
        out
    }
}

const MWH_PER_TWH: f64 = 1e6;

/// Target and delivered qualifying energy per pool over the simulated
/// horizon. Energy counts toward the state where the plant sits.
pub fn goal_accounting(result: &SimulationResult, net: &Network, goals: &GoalSpec) -> Vec<PoolOutcome> {
    let mut demand_by_state: BTreeMap<&str, f64> = BTreeMap::new();
    for t in 0..result.horizon_hours {
        for (bi, b) in net.buses.iter().enumerate() {
            *demand_by_state.entry(b.state.as_str()).or_default() += result.demand[t][bi];
        }
    }
    let mut delivered_by_state: BTreeMap<&str, f64> = BTreeMap::new();
    for (gi, g) in net.generators.iter().enumerate() {
        if !goals.kind.qualifies(g.fuel) {
            continue;
        }
        let e: f64 = (0..result.horizon_hours).map(|t| result.dispatch[t][gi]).sum();
        *delivered_by_state.entry(net.generator_state(gi)).or_default() += e;
    }
    goals
        .resolved_pools()
        .into_iter()
        .map(|states| {
            let target: f64 = states
                .iter()
                .map(|s| goals.states[s] * demand_by_state.get(s.as_str()).copied().unwrap_or(0.0))
                .sum::<f64>()
                / MWH_PER_TWH;
            let delivered: f64 =
                states.iter().map(|s| delivered_by_state.get(s.as_str()).copied().unwrap_or(0.0)).sum::<f64>() / MWH_PER_TWH;
            // Solver round-off must not flip an exactly met goal.
            let met = delivered >= target * (1.0 - 1e-9) - 1e-12;
            PoolOutcome { states, target_twh: target, delivered_twh: delivered, met }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::testnet::*;
    use crate::opf::{simulate_horizon, WindowOptions};

    fn three_state() -> Network {
        let (w, e) = (Interconnection::Western, Interconnection::Eastern);
        Network::new(
            "g",
            100.0,
            vec![bus(1, 1, "CA", w, 1.0), bus(2, 2, "NV", w, 1.0), bus(3, 3, "NY", e, 1.0)],
            vec![line(1, 1, 2, 1000.0, 10.0)],
            vec![],
            vec![
                gen(1, 1, Fuel::Solar, 40.0, 0.0),
                gen(2, 2, Fuel::Wind, 30.0, 0.0),
                gen(3, 2, Fuel::Nuclear, 20.0, 5.0),
                gen(4, 1, Fuel::Ng, 500.0, 30.0),
                gen(5, 3, Fuel::Hydro, 50.0, 1.0),
                gen(6, 3, Fuel::Ng, 500.0, 30.0),
            ],
            vec![zone(1, "CA", w), zone(2, "NV", w), zone(3, "NY", e)],
        )
        .unwrap()
    }

    #[test]
    fn continental_scale_target() {
        // A single state whose horizon demand is 339 TWh.
        let net = three_state();
        let mut r = simulate_horizon(&net, &constant_profiles(&net, 3, &[(1, 1.0), (2, 1.0), (3, 1.0)], 1.0), &WindowOptions::default()).unwrap();
        for h in &mut r.demand {
            h[0] = 339e6 / 3.0;
        }
        let goals = GoalSpec { states: BTreeMap::from([("CA".into(), 0.6)]), ..Default::default() };
        let out = goal_accounting(&r, &net, &goals);
        assert!((out[0].target_twh - 203.4).abs() < 1e-9);
        assert!(!out[0].met);
    }

    #[test]
    fn pool_sums_and_zero_goal() {
        let net = three_state();
        let prof = constant_profiles(&net, 4, &[(1, 60.0), (2, 40.0), (3, 80.0)], 0.5);
        let r = simulate_horizon(&net, &prof, &WindowOptions::default()).unwrap();
        let goals = GoalSpec {
            kind: GoalKind::Clean,
            states: BTreeMap::from([("CA".into(), 0.3), ("NV".into(), 0.5), ("NY".into(), 0.0)]),
            pools: vec![vec!["NV".into(), "CA".into()]],
            cross_seam_pooling: false,
        };
        goals.validate(&net).unwrap();
        let out = goal_accounting(&r, &net, &goals);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].states, vec!["CA".to_string(), "NV".to_string()]);
        let hand: f64 = (0..4).map(|t| r.dispatch[t][0] + r.dispatch[t][1] + r.dispatch[t][2]).sum::<f64>() / 1e6;
        assert!((out[0].delivered_twh - hand).abs() < 1e-15);
        assert!((out[0].target_twh - (0.3 * 240.0 + 0.5 * 160.0) / 1e6).abs() < 1e-15);
        assert!(out[1].met && out[1].target_twh == 0.0);
        // Hydro counts toward a clean goal at its dispatched energy.
        let hydro: f64 = (0..4).map(|t| r.dispatch[t][4]).sum::<f64>() / 1e6;
        assert!((out[1].delivered_twh - hydro).abs() < 1e-15);
    }

    #[test]
    fn pooling_rules() {
        let net = three_state();
        let mut g = GoalSpec {
            states: BTreeMap::from([("CA".into(), 0.5), ("NY".into(), 0.5)]),
            pools: vec![vec!["CA".into(), "NY".into()]],
            ..Default::default()
        };
        assert!(matches!(g.validate(&net), Err(ScenarioError::InvalidGoals(_))));
        g.cross_seam_pooling = true;
        g.validate(&net).unwrap();
        g.pools = vec![vec!["CA".into()], vec!["CA".into()]];
        assert!(g.validate(&net).is_err());
        g.pools = vec![vec!["NV".into()]];
        assert!(g.validate(&net).is_err());
        g.pools.clear();
        g.states.insert("ZZ".into(), 0.1);
        assert!(matches!(g.validate(&net), Err(ScenarioError::UnknownState(_))));
    }
}

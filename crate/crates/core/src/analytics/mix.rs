use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MWH_PER_TWH;
use crate::grid::Network;
use crate::opf::SimulationResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    Fuel,
    State,
    Interconnection,
}

impl GroupBy {
    pub const ALL: [GroupBy; 3] = [GroupBy::Fuel, GroupBy::State, GroupBy::Interconnection];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupBy::Fuel => "fuel",
            GroupBy::State => "state",
            GroupBy::Interconnection => "interconnection",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixRow {
    pub group: String,
    pub generation_twh: f64,
    /// Solar and wind only.
    pub available_twh: f64,
    pub curtailment_twh: f64,
}

/// Energy by group over the horizon, sorted by group key.
pub fn generation_mix(result: &SimulationResult, net: &Network, group_by: GroupBy) -> Vec<MixRow> {
    let mut rows: BTreeMap<String, MixRow> = BTreeMap::new();
    for (gi, g) in net.generators.iter().enumerate() {
        let key = match group_by {
            GroupBy::Fuel => g.fuel.as_str().to_string(),
            GroupBy::State => net.generator_state(gi).to_string(),
            GroupBy::Interconnection => net.generator_interconnection(gi).as_str().to_string(),
        };
        let row = rows.entry(key.clone()).or_insert_with(|| MixRow {
            group: key,
            generation_twh: 0.0,
            available_twh: 0.0,
            curtailment_twh: 0.0,
        });
        let mut p = 0.0;
        let mut avail = 0.0;
        for t in 0..result.horizon_hours {
            p += result.dispatch[t][gi];
            avail += result.available[t][gi];
        }
        row.generation_twh += p / MWH_PER_TWH;
        if g.fuel.is_variable_renewable() {
            row.available_twh += avail / MWH_PER_TWH;
            row.curtailment_twh += (avail - p).max(0.0) / MWH_PER_TWH;
        }
    }
    rows.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::testnet::*;
    use crate::grid::{Fuel, Interconnection};
    use crate::opf::{simulate_horizon, WindowOptions};

    #[test]
    fn single_gas_plant() {
        let ic = Interconnection::Eastern;
        let net = Network::new(
            "g",
            100.0,
            vec![bus(1, 1, "AA", ic, 1.0)],
            vec![],
            vec![],
            vec![gen(1, 1, Fuel::Ng, 80.0, 30.0)],
            vec![zone(1, "AA", ic)],
        )
        .unwrap();
        let r = simulate_horizon(&net, &constant_profiles(&net, 24, &[(1, 50.0)], 1.0), &WindowOptions::default()).unwrap();
        let mix = generation_mix(&r, &net, GroupBy::Fuel);
        assert_eq!(mix.len(), 1);
        assert_eq!(mix[0].group, "ng");
        assert!((mix[0].generation_twh - 1.2e-3).abs() < 1e-15);
        assert_eq!(mix[0].curtailment_twh, 0.0);
    }

    #[test]
    fn hand_summed_groups() {
        let (w, e) = (Interconnection::Western, Interconnection::Eastern);
        let net = Network::new(
            "m",
            100.0,
            vec![bus(1, 1, "CA", w, 1.0), bus(2, 2, "NY", e, 1.0)],
            vec![],
            vec![],
            vec![
                gen(1, 1, Fuel::Solar, 100.0, 0.0),
                gen(2, 1, Fuel::Ng, 100.0, 30.0),
                gen(3, 2, Fuel::Wind, 10.0, 0.0),
                gen(4, 2, Fuel::Coal, 100.0, 20.0),
            ],
            vec![zone(1, "CA", w), zone(2, "NY", e)],
        )
        .unwrap();
        let r = simulate_horizon(&net, &constant_profiles(&net, 5, &[(1, 30.0), (2, 40.0)], 0.5), &WindowOptions::default()).unwrap();
        // CA: solar 30 of 50 available; NY: wind 5 + coal 35.
        let fuel = generation_mix(&r, &net, GroupBy::Fuel);
        let get = |rows: &[MixRow], k: &str| rows.iter().find(|m| m.group == k).unwrap().clone();
        assert!((get(&fuel, "solar").generation_twh - 150.0 / 1e6).abs() < 1e-12);
        assert!((get(&fuel, "solar").curtailment_twh - 100.0 / 1e6).abs() < 1e-12);
        assert!((get(&fuel, "coal").generation_twh - 175.0 / 1e6).abs() < 1e-12);
        assert!(get(&fuel, "ng").generation_twh.abs() < 1e-12);
        let state = generation_mix(&r, &net, GroupBy::State);
        assert_eq!(state.iter().map(|m| m.group.as_str()).collect::<Vec<_>>(), ["CA", "NY"]);
        assert!((get(&state, "NY").generation_twh - 200.0 / 1e6).abs() < 1e-12);
        let ic = generation_mix(&r, &net, GroupBy::Interconnection);
        let total: f64 = ic.iter().map(|m| m.generation_twh).sum();
        assert!((total - 350.0 / 1e6).abs() < 1e-12);
    }
}

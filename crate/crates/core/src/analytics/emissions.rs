use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AnalyticsError, TONS_PER_MMT};
use crate::grid::{Fuel, Network};
use crate::opf::SimulationResult;

/// Million metric tons.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Pollutants {
    pub co2: f64,
    pub nox: f64,
    pub so2: f64,
}

impl Pollutants {
    fn add(&mut self, o: Pollutants) {
        self.co2 += o.co2;
        self.nox += o.nox;
        self.so2 += o.so2;
    }

    pub fn minus(self, o: Pollutants) -> Pollutants {
        Pollutants { co2: self.co2 - o.co2, nox: self.nox - o.nox, so2: self.so2 - o.so2 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EmissionTotals {
    pub total: Pollutants,
    pub by_state: BTreeMap<String, Pollutants>,
    pub by_fuel: BTreeMap<Fuel, Pollutants>,
}

pub fn emissions(result: &SimulationResult, net: &Network) -> EmissionTotals {
    let mut out = EmissionTotals::default();
    for state in net.buses.iter().map(|b| b.state.clone()) {
        out.by_state.entry(state).or_default();
    }
    for (gi, g) in net.generators.iter().enumerate() {
        let energy: f64 = (0..result.horizon_hours).map(|t| result.dispatch[t][gi]).sum();
        let e = Pollutants {
            co2: energy * g.co2_rate / TONS_PER_MMT,
            nox: energy * g.nox_rate / TONS_PER_MMT,
            so2: energy * g.so2_rate / TONS_PER_MMT,
        };
        out.total.add(e);
        out.by_state.entry(net.generator_state(gi).to_string()).or_default().add(e);
        out.by_fuel.entry(g.fuel).or_default().add(e);
    }
    out
}

/// Scenario minus baseline per state.
pub fn emissions_delta_map(
    baseline: &EmissionTotals,
    scenario: &EmissionTotals,
) -> Result<BTreeMap<String, Pollutants>, AnalyticsError> {
    if !baseline.by_state.keys().eq(scenario.by_state.keys()) {
        let differ: Vec<&String> = baseline
            .by_state
            .keys()
            .filter(|k| !scenario.by_state.contains_key(*k))
            .chain(scenario.by_state.keys().filter(|k| !baseline.by_state.contains_key(*k)))
            .collect();
        return Err(AnalyticsError::MismatchedStates(
            differ.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "),
        ));
    }
    Ok(scenario.by_state.iter().map(|(s, v)| (s.clone(), v.minus(baseline.by_state[s]))).collect())
}

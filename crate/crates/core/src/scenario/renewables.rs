use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::grid::{Fuel, Network};

/// MW of new solar and wind for one state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StateTarget {
    #[serde(default)]
    pub solar_mw: f64,
    #[serde(default)]
    pub wind_mw: f64,
}

/// Grows every existing solar and wind plant in a state by the same factor
/// so the state's fleet gains the targeted MW. Availability series are
/// fractions of capacity and carry over unchanged.
pub fn add_renewables_proportional(
    net: &Network,
    targets: &BTreeMap<String, StateTarget>,
) -> Result<Network, ScenarioError> {
    let mut gens = net.generators.clone();
    for (state, t) in targets {
        if !net.buses.iter().any(|b| &b.state == state) {
            return Err(ScenarioError::UnknownState(state.clone()));
        }
        for (fuel, add) in [(Fuel::Solar, t.solar_mw), (Fuel::Wind, t.wind_mw)] {
            if !(add >= 0.0) || !add.is_finite() {
                return Err(ScenarioError::InvalidTarget { state: state.clone(), fuel, mw: add });
            }
            if add == 0.0 {
                continue;
            }
            let members: Vec<usize> =
                (0..gens.len()).filter(|&i| gens[i].fuel == fuel && net.generator_state(i) == state).collect();
            let existing: f64 = members.iter().map(|&i| gens[i].capacity).sum();
            if existing <= 0.0 {
                return Err(ScenarioError::NoExistingCapacity { state: state.clone(), fuel });
            }
            let factor = (existing + add) / existing;
            for i in members {
                gens[i].capacity *= factor;
            }
        }
    }
    Ok(net.with_tables(net.branches.clone(), net.dc_elements.clone(), gens)?)
}

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::grid::{BusId, Fuel, GenId, Generator, Network, ProfileSet};

/// A new generator. Profiled additions take the hourly availability of
/// `profile_source`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorAddition {
    pub id: GenId,
    pub bus: BusId,
    pub fuel: Fuel,
    pub capacity_mw: f64,
    #[serde(default)]
    pub marginal_cost: f64,
    /// MW/h; omitted means unconstrained.
    #[serde(default)]
    pub ramp_mw_h: Option<f64>,
    #[serde(default)]
    pub co2_t_mwh: f64,
    #[serde(default)]
    pub nox_t_mwh: f64,
    #[serde(default)]
    pub so2_t_mwh: f64,
    #[serde(default)]
    pub profile_source: Option<GenId>,
}

impl GeneratorAddition {
    pub fn to_generator(&self) -> Generator {
        Generator {
            id: self.id,
            bus: self.bus,
            fuel: self.fuel,
            capacity: self.capacity_mw,
            marginal_cost: self.marginal_cost,
            ramp_limit: self.ramp_mw_h.unwrap_or(f64::INFINITY),
            co2_rate: self.co2_t_mwh,
            nox_rate: self.nox_t_mwh,
            so2_rate: self.so2_t_mwh,
            profiled: self.fuel.is_profiled(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapacityScale {
    pub state: String,
    pub fuel: Fuel,
    pub factor: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FleetChangeSet {
    #[serde(default)]
    pub retirements: Vec<GenId>,
    #[serde(default)]
    pub additions: Vec<GeneratorAddition>,
    #[serde(default)]
    pub scale: Vec<CapacityScale>,
}

impl FleetChangeSet {
    pub fn is_empty(&self) -> bool {
        self.retirements.is_empty() && self.additions.is_empty() && self.scale.is_empty()
    }
}

/// Removes retirements, scales the remaining capacity per (state, fuel) and
/// appends additions. Nothing else about existing generators changes.
pub fn apply_fleet_changes(net: &Network, changes: &FleetChangeSet) -> Result<Network, ScenarioError> {
    if changes.is_empty() {
        return Ok(net.clone());
    }
    let mut factors: BTreeMap<(&str, Fuel), f64> = BTreeMap::new();
    for s in &changes.scale {
        if !(s.factor >= 0.0) || !s.factor.is_finite() {
            return Err(ScenarioError::InvalidScale { state: s.state.clone(), fuel: s.fuel, factor: s.factor });
        }
        if !net.buses.iter().any(|b| b.state == s.state) {
            return Err(ScenarioError::UnknownState(s.state.clone()));
        }
        *factors.entry((s.state.as_str(), s.fuel)).or_insert(1.0) *= s.factor;
    }
    let retired: BTreeSet<GenId> = changes.retirements.iter().copied().collect();
    if let Some(id) = retired.iter().find(|id| net.generator_index(**id).is_none()) {
        return Err(ScenarioError::UnknownGenerator(*id));
    }

    let mut gens = Vec::with_capacity(net.generators.len() + changes.additions.len());
    for (gi, g) in net.generators.iter().enumerate() {
        if retired.contains(&g.id) {
            continue;
        }
        let mut g = g.clone();
        if let Some(f) = factors.get(&(net.generator_state(gi), g.fuel)) {
            g.capacity *= f;
        }
        gens.push(g);
    }
    for a in &changes.additions {
        if net.bus_index(a.bus).is_none() {
            return Err(ScenarioError::UnknownBus(a.bus));
        }
        gens.push(a.to_generator());
    }
    Ok(net.with_tables(net.branches.clone(), net.dc_elements.clone(), gens)?)
}

/// Availability series for network generators after fleet changes: retired
/// units dropped, profiled additions copying their source's series.
pub fn fleet_profiles(profiles: &ProfileSet, net: &Network, changes: &FleetChangeSet) -> Result<ProfileSet, ScenarioError> {
    let mut out = profiles.clone();
    for a in changes.additions.iter().filter(|a| a.fuel.is_profiled()) {
        let src = a.profile_source.ok_or(ScenarioError::MissingProfileSource(a.id))?;
        out = out.with_cloned_availability(a.id, src).ok_or(ScenarioError::MissingProfileSource(a.id))?;
    }
    out.availability.retain(|id, _| net.generator_index(*id).is_some());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::testnet::*;
    use crate::grid::Interconnection;

    fn coal_net() -> Network {
        let ic = Interconnection::Eastern;
        Network::new(
            "coal",
            100.0,
            vec![bus(1, 1, "AA", ic, 0.5), bus(2, 1, "AA", ic, 0.5)],
            vec![line(1, 1, 2, 100.0, 10.0)],
            vec![],
            vec![
                gen(1, 1, Fuel::Coal, 60_000.0, 20.0),
                gen(2, 2, Fuel::Coal, 40_000.0, 25.0),
                gen(3, 2, Fuel::Ng, 5_000.0, 40.0),
                gen(4, 1, Fuel::Wind, 100.0, 0.0),
            ],
            vec![zone(1, "AA", ic)],
        )
        .unwrap()
    }

    #[test]
    fn scaling_coal_by_state() {
        let net = coal_net();
        let ch = FleetChangeSet {
            scale: vec![CapacityScale { state: "AA".into(), fuel: Fuel::Coal, factor: 0.65 }],
            ..Default::default()
        };
        let out = apply_fleet_changes(&net, &ch).unwrap();
        let coal: f64 = out.generators.iter().filter(|g| g.fuel == Fuel::Coal).map(|g| g.capacity).sum();
        assert!((coal - 65_000.0).abs() < 1e-9);
        assert_eq!(out.generators[2], net.generators[2]);
        assert_eq!(out.generators[0].marginal_cost, 20.0);
    }

    #[test]
    fn empty_changes_are_identity() {
        let net = coal_net();
        assert_eq!(apply_fleet_changes(&net, &FleetChangeSet::default()).unwrap(), net);
        let unit = FleetChangeSet {
            scale: vec![CapacityScale { state: "AA".into(), fuel: Fuel::Ng, factor: 1.0 }],
            ..Default::default()
        };
        assert_eq!(apply_fleet_changes(&net, &unit).unwrap(), net);
    }

    #[test]
    fn additions_and_retirements() {
        let net = coal_net();
        let add = GeneratorAddition {
            id: GenId(10),
            bus: BusId(2),
            fuel: Fuel::Wind,
            capacity_mw: 10.0,
            marginal_cost: 0.0,
            ramp_mw_h: None,
            co2_t_mwh: 0.0,
            nox_t_mwh: 0.0,
            so2_t_mwh: 0.0,
            profile_source: Some(GenId(4)),
        };
        let ch = FleetChangeSet { additions: vec![add.clone()], retirements: vec![GenId(3)], ..Default::default() };
        let out = apply_fleet_changes(&net, &ch).unwrap();
        assert_eq!(out.generators.len(), net.generators.len());
        let g = out.generators.last().unwrap();
        assert!(g.profiled);
        assert_eq!(g.capacity, 10.0);
        assert!(out.generator_index(GenId(3)).is_none());

        let prof = constant_profiles(&net, 3, &[(1, 10.0)], 0.4);
        let p = fleet_profiles(&prof, &out, &ch).unwrap();
        assert_eq!(p.availability[&GenId(10)], vec![0.4; 3]);
        assert!(p.validate(&out).is_empty());

        let bad = FleetChangeSet { retirements: vec![GenId(99)], ..Default::default() };
        assert!(matches!(apply_fleet_changes(&net, &bad), Err(ScenarioError::UnknownGenerator(GenId(99)))));
        let nowhere = FleetChangeSet { additions: vec![GeneratorAddition { bus: BusId(9), ..add }], ..Default::default() };
        assert!(matches!(apply_fleet_changes(&net, &nowhere), Err(ScenarioError::UnknownBus(BusId(9)))));
        let neg = FleetChangeSet {
            scale: vec![CapacityScale { state: "AA".into(), fuel: Fuel::Coal, factor: -1.0 }],
            ..Default::default()
        };
        assert!(matches!(apply_fleet_changes(&net, &neg), Err(ScenarioError::InvalidScale { .. })));
    }
}

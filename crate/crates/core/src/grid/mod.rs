//! Static network and hourly profile data model.
//!
//! A [`Network`] is immutable once loaded; every cross reference has been
//! resolved and indexed, so the solver and the analytics can address buses,
//! branches and generators by dense position as well as by id.

mod io;
mod topology;
mod validate;

pub use io::{load_dataset, load_network, load_profiles, save_dataset, save_network, save_profiles, Manifest};
pub use topology::{aggregate_mw_miles, interconnection_partition, TransmissionMiles};
pub use validate::{Violation, ViolationKind};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GridError;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

id_type!(BusId);
id_type!(BranchId);
id_type!(DcId);
id_type!(GenId);
id_type!(ZoneId);

/// One of the three asynchronous U.S. interconnections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Interconnection {
    Western,
    Eastern,
    #[serde(rename = "ERCOT")]
    Ercot,
}

impl Interconnection {
    pub const ALL: [Interconnection; 3] = [Self::Western, Self::Eastern, Self::Ercot];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Western => "Western",
            Self::Eastern => "Eastern",
            Self::Ercot => "ERCOT",
        }
    }
}

impl fmt::Display for Interconnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Interconnection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Western" => Ok(Self::Western),
            "Eastern" => Ok(Self::Eastern),
            "ERCOT" => Ok(Self::Ercot),
            other => Err(format!("unknown interconnection '{other}'")),
        }
    }
}

/// Boundary crossed by a DC element. The canonical (forward) direction of
/// each cross-seam variant is the order of its name: East to West, East to
/// ERCOT, West to ERCOT.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Seam {
    #[serde(rename = "East-West")]
    EastWest,
    #[serde(rename = "East-ERCOT")]
    EastErcot,
    #[serde(rename = "West-ERCOT")]
    WestErcot,
    #[serde(rename = "intra")]
    Intra,
}

impl Seam {
    pub const CROSSING: [Seam; 3] = [Self::EastWest, Self::EastErcot, Self::WestErcot];

    /// Seam between the interconnections of two endpoints.
    pub fn between(a: Interconnection, b: Interconnection) -> Seam {
        use Interconnection::*;
        match (a, b) {
            (x, y) if x == y => Seam::Intra,
            (Eastern, Western) | (Western, Eastern) => Seam::EastWest,
            (Eastern, Ercot) | (Ercot, Eastern) => Seam::EastErcot,
            _ => Seam::WestErcot,
        }
    }

    /// The interconnection on the sending side of the forward direction.
    pub fn forward_source(self) -> Option<Interconnection> {
        match self {
            Seam::EastWest | Seam::EastErcot => Some(Interconnection::Eastern),
            Seam::WestErcot => Some(Interconnection::Western),
            Seam::Intra => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Seam::EastWest => "East-West",
            Seam::EastErcot => "East-ERCOT",
            Seam::WestErcot => "West-ERCOT",
            Seam::Intra => "intra",
        }
    }
}

impl fmt::Display for Seam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchKind {
    Line,
    Transformer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DcKind {
    B2b,
    Line,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fuel {
    Coal,
    Ng,
    Nuclear,
    Hydro,
    Solar,
    Wind,
    Geothermal,
    Oil,
    Other,
}

impl Fuel {
    pub const ALL: [Fuel; 9] = [
        Fuel::Coal,
        Fuel::Ng,
        Fuel::Nuclear,
        Fuel::Hydro,
        Fuel::Solar,
        Fuel::Wind,
        Fuel::Geothermal,
        Fuel::Oil,
        Fuel::Other,
    ];

    /// Fuels whose hourly availability comes from a profile.
    pub fn is_profiled(self) -> bool {
        matches!(self, Fuel::Solar | Fuel::Wind | Fuel::Hydro)
    }

    /// Solar and wind: the resources whose unused availability is curtailment.
    pub fn is_variable_renewable(self) -> bool {
        matches!(self, Fuel::Solar | Fuel::Wind)
    }

    pub fn is_renewable(self) -> bool {
        matches!(self, Fuel::Solar | Fuel::Wind | Fuel::Geothermal)
    }

    pub fn is_clean(self) -> bool {
        self.is_renewable() || matches!(self, Fuel::Hydro | Fuel::Nuclear)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Fuel::Coal => "coal",
            Fuel::Ng => "ng",
            Fuel::Nuclear => "nuclear",
            Fuel::Hydro => "hydro",
            Fuel::Solar => "solar",
            Fuel::Wind => "wind",
            Fuel::Geothermal => "geothermal",
            Fuel::Oil => "oil",
            Fuel::Other => "other",
        }
    }
}

impl fmt::Display for Fuel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: BusId,
    pub zone_id: ZoneId,
    pub state: String,
    pub interconnection: Interconnection,
    /// Fraction of the zone's hourly demand served at this bus.
    pub demand_share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcBranch {
    pub id: BranchId,
    pub from_bus: BusId,
    pub to_bus: BusId,
    /// Per-unit susceptance on the network base.
    pub susceptance: f64,
    pub capacity: f64,
    pub length: f64,
    pub kind: BranchKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DcElement {
    pub id: DcId,
    pub from_bus: BusId,
    pub to_bus: BusId,
    pub capacity: f64,
    pub kind: DcKind,
    pub length: f64,
    /// Inferred from the endpoint interconnections when the network is built.
    pub seam: Seam,
    /// Station or corridor label, e.g. "Eddy".
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: GenId,
    pub bus: BusId,
    pub fuel: Fuel,
    pub capacity: f64,
    /// $/MWh.
    pub marginal_cost: f64,
    /// MW/h, may be infinite.
    pub ramp_limit: f64,
    /// Emission rates in metric tons per MWh.
    pub co2_rate: f64,
    pub nox_rate: f64,
    pub so2_rate: f64,
    pub profiled: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub id: ZoneId,
    pub name: String,
    pub state: String,
    pub interconnection: Interconnection,
    /// Compound annual demand growth rate.
    pub demand_growth: f64,
}

/// The static grid: buses, AC branches, DC elements, generators and zones,
/// with id lookup tables and one reference bus per interconnection.
#[derive(Clone, Debug)]
pub struct Network {
    pub name: String,
    pub base_mva: f64,
    pub buses: Vec<Bus>,
    pub branches: Vec<AcBranch>,
    pub dc_elements: Vec<DcElement>,
    pub generators: Vec<Generator>,
    pub zones: Vec<Zone>,
    index: NetworkIndex,
}

#[derive(Clone, Debug, Default)]
struct NetworkIndex {
    bus: HashMap<BusId, usize>,
    branch: HashMap<BranchId, usize>,
    dc: HashMap<DcId, usize>,
    generator: HashMap<GenId, usize>,
    zone: HashMap<ZoneId, usize>,
    reference_buses: BTreeMap<Interconnection, usize>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.base_mva == other.base_mva
            && self.buses == other.buses
            && self.branches == other.branches
            && self.dc_elements == other.dc_elements
            && self.generators == other.generators
            && self.zones == other.zones
    }
}

impl Network {
    /// Validates the tables and builds the index. DC seam labels are
    /// recomputed from the endpoint interconnections.
    pub fn new(
        name: impl Into<String>,
        base_mva: f64,
        buses: Vec<Bus>,
        branches: Vec<AcBranch>,
        mut dc_elements: Vec<DcElement>,
        generators: Vec<Generator>,
        zones: Vec<Zone>,
    ) -> Result<Network, GridError> {
        let bus_ic: HashMap<BusId, Interconnection> =
            buses.iter().map(|b| (b.id, b.interconnection)).collect();
        for dc in &mut dc_elements {
            if let (Some(&a), Some(&b)) = (bus_ic.get(&dc.from_bus), bus_ic.get(&dc.to_bus)) {
                dc.seam = Seam::between(a, b);
            }
        }
        let mut net = Network {
            name: name.into(),
            base_mva,
            buses,
            branches,
            dc_elements,
            generators,
            zones,
            index: NetworkIndex::default(),
        };
        let violations = validate::validate_network(&net);
        if !violations.is_empty() {
            return Err(GridError::Invalid(violations));
        }
        net.rebuild_index();
        Ok(net)
    }

    fn rebuild_index(&mut self) {
        let mut index = NetworkIndex {
            bus: self.buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect(),
            branch: self.branches.iter().enumerate().map(|(i, b)| (b.id, i)).collect(),
            dc: self.dc_elements.iter().enumerate().map(|(i, d)| (d.id, i)).collect(),
            generator: self.generators.iter().enumerate().map(|(i, g)| (g.id, i)).collect(),
            zone: self.zones.iter().enumerate().map(|(i, z)| (z.id, i)).collect(),
            reference_buses: BTreeMap::new(),
        };
        // Lowest bus id in each interconnection is its angle reference.
        for (i, bus) in self.buses.iter().enumerate() {
            index
                .reference_buses
                .entry(bus.interconnection)
                .and_modify(|r| {
                    if self.buses[*r].id > bus.id {
                        *r = i;
                    }
                })
                .or_insert(i);
        }
        self.index = index;
    }

    pub fn bus_index(&self, id: BusId) -> Option<usize> {
        self.index.bus.get(&id).copied()
    }

    pub fn branch_index(&self, id: BranchId) -> Option<usize> {
        self.index.branch.get(&id).copied()
    }

    pub fn dc_index(&self, id: DcId) -> Option<usize> {
        self.index.dc.get(&id).copied()
    }

    pub fn generator_index(&self, id: GenId) -> Option<usize> {
        self.index.generator.get(&id).copied()
    }

    pub fn zone_index(&self, id: ZoneId) -> Option<usize> {
        self.index.zone.get(&id).copied()
    }

    pub fn bus(&self, id: BusId) -> Option<&Bus> {
        self.bus_index(id).map(|i| &self.buses[i])
    }

    /// Position of the angle-reference bus of each interconnection present.
    pub fn reference_buses(&self) -> &BTreeMap<Interconnection, usize> {
        &self.index.reference_buses
    }

    pub fn is_reference_bus(&self, bus_idx: usize) -> bool {
        self.index.reference_buses.values().any(|&r| r == bus_idx)
    }

    /// State of the bus a generator sits at.
    pub fn generator_state(&self, gen_idx: usize) -> &str {
        let bus = self.bus_index(self.generators[gen_idx].bus).expect("validated");
        &self.buses[bus].state
    }

    pub fn generator_interconnection(&self, gen_idx: usize) -> Interconnection {
        let bus = self.bus_index(self.generators[gen_idx].bus).expect("validated");
        self.buses[bus].interconnection
    }

    pub fn max_marginal_cost(&self) -> f64 {
        self.generators.iter().map(|g| g.marginal_cost).fold(0.0, f64::max)
    }

    /// Copy of the network with the given tables swapped in (re-validated).
    pub fn with_tables(
        &self,
        branches: Vec<AcBranch>,
        dc_elements: Vec<DcElement>,
        generators: Vec<Generator>,
    ) -> Result<Network, GridError> {
        Network::new(
            self.name.clone(),
            self.base_mva,
            self.buses.clone(),
            branches,
            dc_elements,
            generators,
            self.zones.clone(),
        )
    }

    /// Like [`Network::with_tables`] but also replacing zones.
    pub fn with_zones(&self, zones: Vec<Zone>) -> Result<Network, GridError> {
        Network::new(
            self.name.clone(),
            self.base_mva,
            self.buses.clone(),
            self.branches.clone(),
            self.dc_elements.clone(),
            self.generators.clone(),
            zones,
        )
    }
}

/// Hourly demand per zone and hourly availability per profiled generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSet {
    pub horizon_hours: usize,
    /// Zone id -> hourly MW.
    pub demand: BTreeMap<ZoneId, Vec<f64>>,
    /// Profiled generator id -> hourly fraction of capacity.
    pub availability: BTreeMap<GenId, Vec<f64>>,
}

impl ProfileSet {
    /// Demand at every bus for one hour, in network bus order.
    pub fn bus_demand(&self, net: &Network, hour: usize) -> Vec<f64> {
        net.buses
            .iter()
            .map(|b| self.demand.get(&b.zone_id).map_or(0.0, |d| d[hour] * b.demand_share))
            .collect()
    }

    /// Effective hourly upper bound of a generator (MW).
    pub fn available_capacity(&self, gen: &Generator, hour: usize) -> f64 {
        if gen.profiled {
            self.availability.get(&gen.id).map_or(0.0, |a| a[hour] * gen.capacity)
        } else {
            gen.capacity
        }
    }

    /// Checks lengths, ranges and coverage of every profiled generator.
    pub fn validate(&self, net: &Network) -> Vec<Violation> {
        validate::validate_profiles(self, net)
    }

    /// A copy carrying `source`'s availability series under `target` as well.
    pub fn with_cloned_availability(&self, target: GenId, source: GenId) -> Option<ProfileSet> {
        let series = self.availability.get(&source)?.clone();
        let mut out = self.clone();
        out.availability.insert(target, series);
        Some(out)
    }
}


#[cfg(test)]
mod tests {
    use super::testnet::*;
    use super::*;

    #[test]
    fn reference_bus_is_lowest_id_per_interconnection() {
        let net = Network::new(
            "t",
            100.0,
            vec![
                bus(7, 1, "AA", Interconnection::Eastern, 0.5),
                bus(3, 1, "AA", Interconnection::Eastern, 0.5),
                bus(9, 2, "TX", Interconnection::Ercot, 1.0),
            ],
            vec![line(1, 7, 3, 10.0, 1.0)],
            vec![dc(1, 3, 9, 10.0, DcKind::B2b, 0.0)],
            vec![],
            vec![zone(1, "AA", Interconnection::Eastern), zone(2, "TX", Interconnection::Ercot)],
        )
        .unwrap();
        let refs = net.reference_buses();
        assert_eq!(net.buses[refs[&Interconnection::Eastern]].id, BusId(3));
        assert_eq!(net.buses[refs[&Interconnection::Ercot]].id, BusId(9));
        assert_eq!(net.dc_elements[0].seam, Seam::EastErcot);
    }

    #[test]
    fn fuel_classes() {
        assert!(Fuel::Geothermal.is_renewable());
        assert!(!Fuel::Hydro.is_renewable());
        assert!(Fuel::Hydro.is_clean() && Fuel::Nuclear.is_clean());
        assert!(!Fuel::Ng.is_clean());
        assert!(Fuel::Hydro.is_profiled() && !Fuel::Hydro.is_variable_renewable());
    }

    #[test]
    fn seam_inference() {
        use Interconnection::*;
        assert_eq!(Seam::between(Western, Eastern), Seam::EastWest);
        assert_eq!(Seam::between(Ercot, Western), Seam::WestErcot);
        assert_eq!(Seam::between(Ercot, Ercot), Seam::Intra);
    }
}

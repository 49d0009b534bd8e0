use std::collections::{BTreeMap, HashMap};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::validate::{Violation, ViolationKind};
use super::{BusId, DcKind, Interconnection, Network};
use crate::error::GridError;

/// Connected components of the AC-branch graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    /// Component label of each component, in order of their lowest bus.
    pub components: Vec<Interconnection>,
    bus_component: HashMap<BusId, usize>,
}

impl Partition {
    pub fn component_of(&self, bus: BusId) -> usize {
        self.bus_component[&bus]
    }

    pub fn interconnection_of(&self, bus: BusId) -> Interconnection {
        self.components[self.component_of(bus)]
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Every bus with the interconnection of its component.
    pub fn to_map(&self) -> BTreeMap<BusId, Interconnection> {
        self.bus_component.iter().map(|(b, &c)| (*b, self.components[c])).collect()
    }
}

/// Splits the buses into AC-connected components and labels each component
/// with the interconnection its buses declare. DC elements never join
/// components.
pub fn interconnection_partition(net: &Network) -> Result<Partition, GridError> {
    partition(net).map_err(|v| GridError::Invalid(vec![v]))
}

pub(super) fn partition(net: &Network) -> Result<Partition, Violation> {
    // Sorting by id makes component numbering independent of table order.
    let mut order: Vec<usize> = (0..net.buses.len()).collect();
    order.sort_by_key(|&i| net.buses[i].id);
    let pos: HashMap<BusId, usize> = order.iter().enumerate().map(|(p, &i)| (net.buses[i].id, p)).collect();

    let mut uf = UnionFind::<usize>::new(order.len());
    for br in &net.branches {
        if let (Some(&a), Some(&b)) = (pos.get(&br.from_bus), pos.get(&br.to_bus)) {
            uf.union(a, b);
        }
    }

    let mut root_component: HashMap<usize, usize> = HashMap::new();
    let mut components = Vec::new();
    let mut bus_component = HashMap::new();
    for (p, &i) in order.iter().enumerate() {
        let bus = &net.buses[i];
        let root = uf.find(p);
        let c = *root_component.entry(root).or_insert_with(|| {
            components.push(bus.interconnection);
            components.len() - 1
        });
        if components[c] != bus.interconnection {
            return Err(Violation::new(
                "buses.csv",
                bus.id,
                ViolationKind::InterconnectionMismatch {
                    message: format!(
                        "AC component labeled {} also contains this {} bus",
                        components[c], bus.interconnection
                    ),
                },
            ));
        }
        bus_component.insert(bus.id, c);
    }
    Ok(Partition { components, bus_component })
}

/// Aggregate capacity-distance product of the transmission system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct TransmissionMiles {
    /// AC lines and transformers; transformers carry zero length.
    pub ac_tw_miles: f64,
    /// DC lines; back-to-back converters have zero length.
    pub dc_tw_miles: f64,
}

const MW_MILES_PER_TW_MILE: f64 = 1e6;

pub fn aggregate_mw_miles(net: &Network) -> TransmissionMiles {
    let ac: f64 = net.branches.iter().map(|b| b.capacity * b.length).sum();
    let dc: f64 = net
        .dc_elements
        .iter()
        .filter(|d| d.kind == DcKind::Line)
        .map(|d| d.capacity * d.length)
        .sum();
    TransmissionMiles { ac_tw_miles: ac / MW_MILES_PER_TW_MILE, dc_tw_miles: dc / MW_MILES_PER_TW_MILE }
}

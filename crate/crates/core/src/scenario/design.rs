use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::grid::{BusId, DcElement, DcId, DcKind, Network, Seam};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignName {
    #[serde(rename = "design1")]
    Design1,
    #[serde(rename = "design2a")]
    Design2a,
    #[serde(rename = "design2b")]
    Design2b,
    #[serde(rename = "design3")]
    Design3,
    #[default]
    #[serde(rename = "custom")]
    Custom,
}

/// A DC element named by id or by station name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DcRef {
    Id(DcId),
    Name(String),
}

impl std::fmt::Display for DcRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DcRef::Id(id) => write!(f, "#{id}"),
            DcRef::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct B2bUpgrade {
    pub element: DcRef,
    pub capacity_mw: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewDcLine {
    pub from_bus: BusId,
    pub to_bus: BusId,
    pub capacity_mw: f64,
    pub length_mi: f64,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MacroGridDesign {
    #[serde(default)]
    pub name: DesignName,
    #[serde(default)]
    pub b2b_upgrades: Vec<B2bUpgrade>,
    #[serde(default)]
    pub new_dc_lines: Vec<NewDcLine>,
}

/// Quantities a design adds to a network, for costing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DesignAdditions {
    /// Sum of capacity increases over upgraded converter stations.
    pub b2b_upgrade_mw: f64,
    pub dc_line_mw: f64,
    pub dc_line_mw_miles: f64,
    pub dc_line_count: usize,
}

fn resolve(net: &Network, r: &DcRef) -> Result<usize, ScenarioError> {
    let found = match r {
        DcRef::Id(id) => net.dc_index(*id),
        DcRef::Name(n) => net.dc_elements.iter().position(|d| d.name.eq_ignore_ascii_case(n)),
    };
    found.ok_or_else(|| ScenarioError::UnknownDcElement(r.to_string()))
}

impl MacroGridDesign {
    /// Capacity-increase totals this design would add to `net`.
    pub fn additions(&self, net: &Network) -> Result<DesignAdditions, ScenarioError> {
        let mut out = DesignAdditions::default();
        for u in &self.b2b_upgrades {
            let d = &net.dc_elements[resolve(net, &u.element)?];
            out.b2b_upgrade_mw += (u.capacity_mw - d.capacity).max(0.0);
        }
        for l in &self.new_dc_lines {
            out.dc_line_mw += l.capacity_mw;
            out.dc_line_mw_miles += l.capacity_mw * l.length_mi;
            out.dc_line_count += 1;
        }
        Ok(out)
    }
}

/// Raises converter capacities and appends new DC lines; seams of new
/// lines come from their endpoints.
pub fn apply_macrogrid_design(net: &Network, design: &MacroGridDesign) -> Result<Network, ScenarioError> {
    let mut dcs = net.dc_elements.clone();
    for u in &design.b2b_upgrades {
        let i = resolve(net, &u.element)?;
        let old = dcs[i].capacity;
        if !(u.capacity_mw >= old) {
            return Err(ScenarioError::Downgrade { element: dcs[i].name.clone(), old, new: u.capacity_mw });
        }
        dcs[i].capacity = u.capacity_mw;
    }
    let mut next_id = dcs.iter().map(|d| d.id.0).max().map_or(1, |m| m + 1);
    for l in &design.new_dc_lines {
        for b in [l.from_bus, l.to_bus] {
            if net.bus_index(b).is_none() {
                return Err(ScenarioError::UnknownBus(b));
            }
        }
        if !(l.capacity_mw > 0.0) || !(l.length_mi > 0.0) {
            return Err(ScenarioError::InvalidDesign(format!(
                "new line {}-{} needs positive capacity and length",
                l.from_bus, l.to_bus
            )));
        }
        dcs.push(DcElement {
            id: DcId(next_id),
            from_bus: l.from_bus,
            to_bus: l.to_bus,
            capacity: l.capacity_mw,
            kind: DcKind::Line,
            length: l.length_mi,
            seam: Seam::Intra,
            name: l.name.clone().unwrap_or_else(|| format!("{}-{}", l.from_bus, l.to_bus)),
        });
        next_id += 1;
    }
    Ok(net.with_tables(net.branches.clone(), dcs, net.generators.clone())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::testnet::*;
    use crate::grid::Interconnection;

    fn seam_net() -> Network {
        let (e, w, t) = (Interconnection::Eastern, Interconnection::Western, Interconnection::Ercot);
        let mut eddy = dc(1, 1, 3, 200.0, DcKind::B2b, 0.0);
        eddy.name = "Eddy".into();
        Network::new(
            "s",
            100.0,
            vec![bus(1, 1, "EE", e, 0.5), bus(2, 1, "EE", e, 0.5), bus(3, 2, "WW", w, 1.0), bus(4, 3, "TX", t, 1.0)],
            vec![line(1, 1, 2, 100.0, 10.0)],
            vec![eddy],
            vec![],
            vec![zone(1, "EE", e), zone(2, "WW", w), zone(3, "TX", t)],
        )
        .unwrap()
    }

    #[test]
    fn upgrade_by_name_and_new_lines() {
        let net = seam_net();
        let d = MacroGridDesign {
            name: DesignName::Design2a,
            b2b_upgrades: vec![B2bUpgrade { element: DcRef::Name("Eddy".into()), capacity_mw: 2895.0 }],
            new_dc_lines: vec![
                NewDcLine { from_bus: BusId(2), to_bus: BusId(4), capacity_mw: 8000.0, length_mi: 300.0, name: None },
                NewDcLine { from_bus: BusId(3), to_bus: BusId(4), capacity_mw: 8000.0, length_mi: 500.0, name: None },
            ],
        };
        let add = d.additions(&net).unwrap();
        assert_eq!(add.b2b_upgrade_mw, 2695.0);
        assert_eq!(add.dc_line_mw_miles, 8000.0 * 800.0);
        let out = apply_macrogrid_design(&net, &d).unwrap();
        assert_eq!(out.dc_elements[0].capacity, 2895.0);
        assert_eq!(out.dc_elements.len(), 3);
        assert_eq!(out.dc_elements[1].seam, Seam::EastErcot);
        assert_eq!(out.dc_elements[2].seam, Seam::WestErcot);
        assert_eq!(out.dc_elements[2].id, DcId(3));
        assert_eq!(out.branches, net.branches);
    }

    #[test]
    fn downgrade_and_unknown_references_fail() {
        let net = seam_net();
        let down = MacroGridDesign {
            b2b_upgrades: vec![B2bUpgrade { element: DcRef::Id(DcId(1)), capacity_mw: 100.0 }],
            ..Default::default()
        };
        assert!(matches!(apply_macrogrid_design(&net, &down), Err(ScenarioError::Downgrade { .. })));
        let unknown = MacroGridDesign {
            b2b_upgrades: vec![B2bUpgrade { element: DcRef::Name("Nowhere".into()), capacity_mw: 100.0 }],
            ..Default::default()
        };
        assert!(matches!(apply_macrogrid_design(&net, &unknown), Err(ScenarioError::UnknownDcElement(_))));
        let bad_bus = MacroGridDesign {
            new_dc_lines: vec![NewDcLine { from_bus: BusId(1), to_bus: BusId(99), capacity_mw: 1.0, length_mi: 1.0, name: None }],
            ..Default::default()
        };
        assert!(matches!(apply_macrogrid_design(&net, &bad_bus), Err(ScenarioError::UnknownBus(BusId(99)))));
        assert_eq!(apply_macrogrid_design(&net, &MacroGridDesign::default()).unwrap(), net);
    }

    #[test]
    fn design_json_round_trip() {
        let text = r#"{"name": "design2b", "b2b_upgrades": [{"element": "Eddy", "capacity_mw": 338}, {"element": 1, "capacity_mw": 400}],
            "new_dc_lines": [{"from_bus": 2, "to_bus": 3, "capacity_mw": 9500, "length_mi": 1200, "name": "Washington-Iowa"}]}"#;
        let d: MacroGridDesign = serde_json::from_str(text).unwrap();
        assert_eq!(d.name, DesignName::Design2b);
        assert_eq!(d.b2b_upgrades[1].element, DcRef::Id(DcId(1)));
        let back: MacroGridDesign = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }
}

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{topology, DcKind, Network, ProfileSet, Seam};

/// One itemized data problem, with enough row context to find it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub table: String,
    /// Id of the offending record (or the series/column name).
    pub record: String,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationKind {
    DuplicateId,
    DanglingReference { field: String, target: String },
    InvalidValue { field: String, message: String },
    DemandShareSum { sum: f64 },
    InterconnectionMismatch { message: String },
    DisconnectedInterconnection { interconnection: String, components: usize },
    LengthMismatch { expected: usize, actual: usize },
    OutOfRange { hour: usize, value: f64 },
    MissingProfile,
}

impl Violation {
    pub(crate) fn new(table: &str, record: impl ToString, kind: ViolationKind) -> Self {
        Violation { table: table.to_string(), record: record.to_string(), kind }
    }

    fn invalid(table: &str, record: impl ToString, field: &str, message: impl Into<String>) -> Self {
        Self::new(table, record, ViolationKind::InvalidValue { field: field.into(), message: message.into() })
    }

    fn dangling(table: &str, record: impl ToString, field: &str, target: impl ToString) -> Self {
        Self::new(table, record, ViolationKind::DanglingReference { field: field.into(), target: target.to_string() })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (table, rec) = (&self.table, &self.record);
        match &self.kind {
            ViolationKind::DuplicateId => write!(f, "{table}: duplicate id {rec}"),
            ViolationKind::DanglingReference { field, target } => {
                write!(f, "{table}: dangling reference in row {rec}: {field} = {target} does not exist")
            }
            ViolationKind::InvalidValue { field, message } => write!(f, "{table}: row {rec}: {field} {message}"),
            ViolationKind::DemandShareSum { sum } => {
                write!(f, "{table}: demand shares of zone {rec} sum to {sum}, expected 1")
            }
            ViolationKind::InterconnectionMismatch { message } => write!(f, "{table}: row {rec}: {message}"),
            ViolationKind::DisconnectedInterconnection { interconnection, components } => write!(
                f,
                "{table}: disconnected interconnection {interconnection} ({components} AC components)"
            ),
            ViolationKind::LengthMismatch { expected, actual } => {
                write!(f, "{table}: series {rec} has {actual} hours, expected {expected}")
            }
            ViolationKind::OutOfRange { hour, value } => {
                write!(f, "{table}: generator {rec} hour {hour}: value {value} outside [0, 1]")
            }
            ViolationKind::MissingProfile => write!(f, "{table}: profiled generator {rec} has no column"),
        }
    }
}

fn duplicates<K: std::hash::Hash + Eq + fmt::Display + Copy>(
    table: &str,
    ids: impl Iterator<Item = K>,
    out: &mut Vec<Violation>,
) {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            out.push(Violation::new(table, id, ViolationKind::DuplicateId));
        }
    }
}

fn is_state_code(s: &str) -> bool {
    s.len() == 2 && s.bytes().all(|b| b.is_ascii_uppercase())
}

pub(crate) fn validate_network(net: &Network) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(net.base_mva > 0.0) {
        out.push(Violation::invalid("manifest.json", "base_mva", "base_mva", "must be positive"));
    }
    duplicates("buses.csv", net.buses.iter().map(|b| b.id), &mut out);
    duplicates("branches.csv", net.branches.iter().map(|b| b.id), &mut out);
    duplicates("dclines.csv", net.dc_elements.iter().map(|d| d.id), &mut out);
    duplicates("generators.csv", net.generators.iter().map(|g| g.id), &mut out);
    duplicates("zones.csv", net.zones.iter().map(|z| z.id), &mut out);

    let zones: HashMap<_, _> = net.zones.iter().map(|z| (z.id, z)).collect();
    let buses: HashMap<_, _> = net.buses.iter().map(|b| (b.id, b)).collect();

    for z in &net.zones {
        if !is_state_code(&z.state) {
            out.push(Violation::invalid("zones.csv", z.id, "state", "must be a two-letter code"));
        }
        if !(-0.05..=0.10).contains(&z.demand_growth) {
            out.push(Violation::invalid("zones.csv", z.id, "demand_growth", "outside [-0.05, 0.10]"));
        }
    }

    let mut share_sum: BTreeMap<_, f64> = net.zones.iter().map(|z| (z.id, 0.0)).collect();
    for b in &net.buses {
        if !is_state_code(&b.state) {
            out.push(Violation::invalid("buses.csv", b.id, "state", "must be a two-letter code"));
        }
        if !(0.0..=1.0).contains(&b.demand_share) {
            out.push(Violation::invalid("buses.csv", b.id, "demand_share", "outside [0, 1]"));
        }
        match zones.get(&b.zone_id) {
            None => out.push(Violation::dangling("buses.csv", b.id, "zone_id", b.zone_id)),
            Some(z) => {
                *share_sum.entry(b.zone_id).or_default() += b.demand_share;
                if z.interconnection != b.interconnection {
                    out.push(Violation::new(
                        "buses.csv",
                        b.id,
                        ViolationKind::InterconnectionMismatch {
                            message: format!(
                                "bus labeled {} but zone {} is {}",
                                b.interconnection, z.id, z.interconnection
                            ),
                        },
                    ));
                }
            }
        }
    }
    for (zone, sum) in share_sum {
        if (sum - 1.0).abs() > 1e-9 {
            out.push(Violation::new("buses.csv", zone, ViolationKind::DemandShareSum { sum }));
        }
    }

    let mut ac_ok = true;
    for br in &net.branches {
        let from = buses.get(&br.from_bus);
        let to = buses.get(&br.to_bus);
        if from.is_none() {
            out.push(Violation::dangling("branches.csv", br.id, "from", br.from_bus));
            ac_ok = false;
        }
        if to.is_none() {
            out.push(Violation::dangling("branches.csv", br.id, "to", br.to_bus));
            ac_ok = false;
        }
        if br.from_bus == br.to_bus {
            out.push(Violation::invalid("branches.csv", br.id, "to", "equals from"));
        }
        if !(br.capacity > 0.0) {
            out.push(Violation::invalid("branches.csv", br.id, "capacity_mw", "must be positive"));
        }
        if !(br.susceptance > 0.0) {
            out.push(Violation::invalid("branches.csv", br.id, "susceptance", "must be positive"));
        }
        if !(br.length >= 0.0) {
            out.push(Violation::invalid("branches.csv", br.id, "length_mi", "must be non-negative"));
        }
        if let (Some(a), Some(b)) = (from, to) {
            if a.interconnection != b.interconnection {
                ac_ok = false;
                out.push(Violation::new(
                    "branches.csv",
                    br.id,
                    ViolationKind::InterconnectionMismatch {
                        message: format!(
                            "AC branch joins {} bus {} and {} bus {}",
                            a.interconnection, a.id, b.interconnection, b.id
                        ),
                    },
                ));
            }
        }
    }

    for dc in &net.dc_elements {
        let from = buses.get(&dc.from_bus);
        let to = buses.get(&dc.to_bus);
        if from.is_none() {
            out.push(Violation::dangling("dclines.csv", dc.id, "from", dc.from_bus));
        }
        if to.is_none() {
            out.push(Violation::dangling("dclines.csv", dc.id, "to", dc.to_bus));
        }
        if dc.from_bus == dc.to_bus {
            out.push(Violation::invalid("dclines.csv", dc.id, "to", "equals from"));
        }
        if !(dc.capacity > 0.0) {
            out.push(Violation::invalid("dclines.csv", dc.id, "capacity_mw", "must be positive"));
        }
        if dc.kind == DcKind::B2b && dc.length != 0.0 {
            out.push(Violation::invalid("dclines.csv", dc.id, "length_mi", "must be 0 for b2b"));
        }
        if !(dc.length >= 0.0) {
            out.push(Violation::invalid("dclines.csv", dc.id, "length_mi", "must be non-negative"));
        }
        if let (Some(a), Some(b)) = (from, to) {
            let inferred = Seam::between(a.interconnection, b.interconnection);
            if inferred != dc.seam {
                out.push(Violation::new(
                    "dclines.csv",
                    dc.id,
                    ViolationKind::InterconnectionMismatch {
                        message: format!("seam {} does not match endpoints ({inferred})", dc.seam),
                    },
                ));
            }
        }
    }

    for g in &net.generators {
        if !buses.contains_key(&g.bus) {
            out.push(Violation::dangling("generators.csv", g.id, "bus", g.bus));
        }
        for (field, v) in [
            ("capacity_mw", g.capacity),
            ("ramp_mw_h", g.ramp_limit),
            ("co2_t_mwh", g.co2_rate),
            ("nox_t_mwh", g.nox_rate),
            ("so2_t_mwh", g.so2_rate),
        ] {
            if !(v >= 0.0) {
                out.push(Violation::invalid("generators.csv", g.id, field, "must be non-negative"));
            }
        }
        if !g.capacity.is_finite() {
            out.push(Violation::invalid("generators.csv", g.id, "capacity_mw", "must be finite"));
        }
        if !g.marginal_cost.is_finite() {
            out.push(Violation::invalid("generators.csv", g.id, "marginal_cost", "must be finite"));
        }
        if g.profiled != g.fuel.is_profiled() {
            out.push(Violation::invalid(
                "generators.csv",
                g.id,
                "profiled",
                format!("must be {} for fuel {}", g.fuel.is_profiled(), g.fuel),
            ));
        }
    }

    // Connectivity is only meaningful once every AC endpoint resolves and no
    // branch straddles two interconnections.
    if ac_ok {
        match topology::partition(net) {
            Ok(part) => {
                let mut components: BTreeMap<_, HashSet<usize>> = BTreeMap::new();
                for (bus, ic) in &net.buses.iter().map(|b| (b.id, b.interconnection)).collect::<Vec<_>>() {
                    components.entry(*ic).or_default().insert(part.component_of(*bus));
                }
                for (ic, comps) in components {
                    if comps.len() > 1 {
                        out.push(Violation::new(
                            "branches.csv",
                            ic,
                            ViolationKind::DisconnectedInterconnection {
                                interconnection: ic.to_string(),
                                components: comps.len(),
                            },
                        ));
                    }
                }
            }
            Err(v) => out.push(v),
        }
    }
    out
}

pub(crate) fn validate_profiles(profiles: &ProfileSet, net: &Network) -> Vec<Violation> {
    let mut out = Vec::new();
    let h = profiles.horizon_hours;
    for (zone, series) in &profiles.demand {
        if series.len() != h {
            out.push(Violation::new(
                "demand.csv",
                zone,
                ViolationKind::LengthMismatch { expected: h, actual: series.len() },
            ));
        }
        if let Some((hour, v)) = series.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
            out.push(Violation::invalid("demand.csv", zone, "demand", format!("hour {hour} value {v} is negative")));
        }
    }
    for z in &net.zones {
        if !profiles.demand.contains_key(&z.id) {
            out.push(Violation::new("demand.csv", z.id, ViolationKind::MissingProfile));
        }
    }
    for (gen, series) in &profiles.availability {
        if series.len() != h {
            out.push(Violation::new(
                "availability.csv",
                gen,
                ViolationKind::LengthMismatch { expected: h, actual: series.len() },
            ));
        }
        if let Some((hour, v)) = series.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            out.push(Violation::new("availability.csv", gen, ViolationKind::OutOfRange { hour, value: *v }));
        }
    }
    for g in net.generators.iter().filter(|g| g.profiled) {
        if !profiles.availability.contains_key(&g.id) {
            out.push(Violation::new("availability.csv", g.id, ViolationKind::MissingProfile));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::testnet::*;
    use super::super::*;
    use super::*;

    fn kinds(err: GridError) -> Vec<ViolationKind> {
        match err {
            GridError::Invalid(v) => v.into_iter().map(|v| v.kind).collect(),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn two_buses_without_branches_are_disconnected() {
        let ic = Interconnection::Western;
        let err = Network::new(
            "t",
            100.0,
            vec![bus(1, 1, "AA", ic, 0.5), bus(2, 1, "AA", ic, 0.5)],
            vec![],
            vec![],
            vec![],
            vec![zone(1, "AA", ic)],
        )
        .unwrap_err();
        assert!(err.to_string().contains("disconnected interconnection"), "{err}");
    }

    #[test]
    fn dangling_branch_names_the_branch() {
        let ic = Interconnection::Western;
        let err = Network::new(
            "t",
            100.0,
            vec![bus(1, 1, "AA", ic, 1.0)],
            vec![line(42, 1, 99, 10.0, 1.0)],
            vec![],
            vec![],
            vec![zone(1, "AA", ic)],
        )
        .unwrap_err();
        let text = err.to_string();
        assert!(text.contains("row 42") && text.contains("99"), "{text}");
    }

    #[test]
    fn ac_branch_across_interconnections_is_rejected() {
        let err = Network::new(
            "t",
            100.0,
            vec![bus(1, 1, "AA", Interconnection::Eastern, 1.0), bus(2, 2, "BB", Interconnection::Western, 1.0)],
            vec![line(1, 1, 2, 10.0, 1.0)],
            vec![],
            vec![],
            vec![zone(1, "AA", Interconnection::Eastern), zone(2, "BB", Interconnection::Western)],
        )
        .unwrap_err();
        assert!(kinds(err).iter().any(|k| matches!(k, ViolationKind::InterconnectionMismatch { .. })));
    }

    #[test]
    fn duplicate_ids_and_bad_shares() {
        let ic = Interconnection::Western;
        let err = Network::new(
            "t",
            100.0,
            vec![bus(1, 1, "AA", ic, 0.7), bus(1, 1, "AA", ic, 0.7)],
            vec![],
            vec![],
            vec![gen(1, 1, Fuel::Wind, 10.0, 0.0), gen(1, 1, Fuel::Ng, 10.0, 1.0)],
            vec![zone(1, "AA", ic)],
        )
        .unwrap_err();
        let k = kinds(err);
        assert!(k.iter().filter(|k| **k == ViolationKind::DuplicateId).count() >= 2);
        assert!(k.iter().any(|k| matches!(k, ViolationKind::DemandShareSum { .. })));
    }

    #[test]
    fn b2b_must_have_zero_length_and_profiled_flag_must_match_fuel() {
        let ic = Interconnection::Western;
        let mut g = gen(1, 1, Fuel::Solar, 10.0, 0.0);
        g.profiled = false;
        let err = Network::new(
            "t",
            100.0,
            vec![bus(1, 1, "AA", ic, 0.5), bus(2, 1, "AA", ic, 0.5)],
            vec![line(1, 1, 2, 10.0, 1.0)],
            vec![dc(1, 1, 2, 10.0, DcKind::B2b, 5.0)],
            vec![g],
            vec![zone(1, "AA", ic)],
        )
        .unwrap_err();
        let text = err.to_string();
        assert!(text.contains("must be 0 for b2b"), "{text}");
        assert!(text.contains("profiled"), "{text}");
    }

    #[test]
    fn profile_checks() {
        let net = two_bus_congested();
        let mut p = constant_profiles(&net, 4, &[(1, 50.0)], 0.5);
        assert!(p.validate(&net).is_empty());
        p.demand.get_mut(&ZoneId(1)).unwrap().push(1.0);
        let v = p.validate(&net);
        assert!(matches!(v[0].kind, ViolationKind::LengthMismatch { expected: 4, actual: 5 }));
    }
}

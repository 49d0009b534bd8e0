//! CSV dataset directories.
//!
//! Layout: `manifest.json`, `buses.csv`, `branches.csv`, `dclines.csv`,
//! `generators.csv`, `zones.csv`, plus the wide hourly tables `demand.csv`
//! (one column per zone id) and `availability.csv` (one column per profiled
//! generator id). Both wide tables start with an `hour` column.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::validate::{Violation, ViolationKind};
use super::{
    AcBranch, BranchId, BranchKind, Bus, BusId, DcElement, DcId, DcKind, Fuel, GenId, Generator, Interconnection,
    Network, ProfileSet, Seam, Zone, ZoneId,
};
use crate::error::GridError;
use crate::util::write_atomic;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub horizon_hours: usize,
    pub base_mva: f64,
}

#[derive(Serialize, Deserialize)]
struct BusRow {
    id: u32,
    zone_id: u32,
    state: String,
    interconnection: Interconnection,
    demand_share: f64,
}

#[derive(Serialize, Deserialize)]
struct BranchRow {
    id: u32,
    from: u32,
    to: u32,
    susceptance: f64,
    capacity_mw: f64,
    length_mi: f64,
    kind: BranchKind,
}

#[derive(Serialize, Deserialize)]
struct DcRow {
    id: u32,
    from: u32,
    to: u32,
    capacity_mw: f64,
    kind: DcKind,
    length_mi: f64,
    #[serde(default)]
    name: String,
}

#[derive(Serialize, Deserialize)]
struct GeneratorRow {
    id: u32,
    bus: u32,
    fuel: Fuel,
    capacity_mw: f64,
    marginal_cost: f64,
    ramp_mw_h: f64,
    co2_t_mwh: f64,
    nox_t_mwh: f64,
    so2_t_mwh: f64,
    profiled: bool,
}

#[derive(Serialize, Deserialize)]
struct ZoneRow {
    id: u32,
    name: String,
    state: String,
    interconnection: Interconnection,
    demand_growth: f64,
}

fn require(dir: &Path, name: &str) -> Result<PathBuf, GridError> {
    let path = dir.join(name);
    if path.is_file() {
        Ok(path)
    } else {
        Err(GridError::MissingFile(path))
    }
}

fn csv_error(file: &Path, err: csv::Error) -> GridError {
    let line = err.position().map(|p| p.line());
    GridError::Csv { file: file.to_path_buf(), line, message: err.to_string() }
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, GridError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| csv_error(path, e))?;
    rdr.deserialize().map(|r| r.map_err(|e| csv_error(path, e))).collect()
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), GridError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in rows {
        wtr.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    let bytes = wtr.into_inner().map_err(|e| GridError::io(path, e.into_error()))?;
    write_atomic(path, &bytes).map_err(|e| GridError::io(path, e))
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, GridError> {
    let path = require(dir, "manifest.json")?;
    let text = fs::read_to_string(&path).map_err(|e| GridError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| GridError::Json { file: path, message: e.to_string() })
}

/// Reads and cross-checks the static tables of a dataset directory.
pub fn load_network(dir: impl AsRef<Path>) -> Result<Network, GridError> {
    let dir = dir.as_ref();
    let manifest = read_manifest(dir)?;
    let buses: Vec<BusRow> = read_rows(&require(dir, "buses.csv")?)?;
    let branches: Vec<BranchRow> = read_rows(&require(dir, "branches.csv")?)?;
    let dcs: Vec<DcRow> = read_rows(&require(dir, "dclines.csv")?)?;
    let gens: Vec<GeneratorRow> = read_rows(&require(dir, "generators.csv")?)?;
    let zones: Vec<ZoneRow> = read_rows(&require(dir, "zones.csv")?)?;

    Network::new(
        manifest.name,
        manifest.base_mva,
        buses
            .into_iter()
            .map(|r| Bus {
                id: BusId(r.id),
                zone_id: ZoneId(r.zone_id),
                state: r.state,
                interconnection: r.interconnection,
                demand_share: r.demand_share,
            })
            .collect(),
        branches
            .into_iter()
            .map(|r| AcBranch {
                id: BranchId(r.id),
                from_bus: BusId(r.from),
                to_bus: BusId(r.to),
                susceptance: r.susceptance,
                capacity: r.capacity_mw,
                length: r.length_mi,
                kind: r.kind,
            })
            .collect(),
        dcs.into_iter()
            .map(|r| DcElement {
                id: DcId(r.id),
                from_bus: BusId(r.from),
                to_bus: BusId(r.to),
                capacity: r.capacity_mw,
                kind: r.kind,
                length: r.length_mi,
                seam: Seam::Intra,
                name: r.name,
            })
            .collect(),
        gens.into_iter()
            .map(|r| Generator {
                id: GenId(r.id),
                bus: BusId(r.bus),
                fuel: r.fuel,
                capacity: r.capacity_mw,
                marginal_cost: r.marginal_cost,
                ramp_limit: r.ramp_mw_h,
                co2_rate: r.co2_t_mwh,
                nox_rate: r.nox_t_mwh,
                so2_rate: r.so2_t_mwh,
                profiled: r.profiled,
            })
            .collect(),
        zones
            .into_iter()
            .map(|r| Zone {
                id: ZoneId(r.id),
                name: r.name,
                state: r.state,
                interconnection: r.interconnection,
                demand_growth: r.demand_growth,
            })
            .collect(),
    )
}

/// Reads a wide hour-by-column table. Returns column ids and their series.
fn read_wide(path: &Path) -> Result<Vec<(u32, Vec<f64>)>, GridError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(|e| csv_error(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let bad_header = |message: String| GridError::Csv { file: path.to_path_buf(), line: Some(1), message };
    if headers.get(0) != Some("hour") {
        return Err(bad_header("first column must be 'hour'".into()));
    }
    let mut columns = Vec::new();
    for h in headers.iter().skip(1) {
        let id = h.parse::<u32>().map_err(|_| bad_header(format!("column '{h}' is not an integer id")))?;
        columns.push((id, Vec::new()));
    }
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line());
        let cell_error = |message: String| GridError::Csv { file: path.to_path_buf(), line, message };
        let hour: usize = record[0].parse().map_err(|_| cell_error(format!("bad hour '{}'", &record[0])))?;
        if hour != row {
            return Err(cell_error(format!("hour {hour} out of sequence, expected {row}")));
        }
        for (k, (_, series)) in columns.iter_mut().enumerate() {
            let cell = &record[k + 1];
            let v: f64 = cell.parse().map_err(|_| cell_error(format!("bad number '{cell}'")))?;
            series.push(v);
        }
    }
    Ok(columns)
}

fn write_wide(path: &Path, columns: &[(u32, &Vec<f64>)], hours: usize) -> Result<(), GridError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let csv_err = |e| csv_error(path, e);
    let mut header = vec!["hour".to_string()];
    header.extend(columns.iter().map(|(id, _)| id.to_string()));
    wtr.write_record(&header).map_err(csv_err)?;
    for h in 0..hours {
        let mut rec = vec![h.to_string()];
        rec.extend(columns.iter().map(|(_, s)| s[h].to_string()));
        wtr.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = wtr.into_inner().map_err(|e| GridError::io(path, e.into_error()))?;
    write_atomic(path, &bytes).map_err(|e| GridError::io(path, e))
}

/// Reads `demand.csv` and `availability.csv` and checks them against the
/// network and the manifest horizon.
pub fn load_profiles(dir: impl AsRef<Path>, net: &Network) -> Result<ProfileSet, GridError> {
    let dir = dir.as_ref();
    let manifest = read_manifest(dir)?;
    let demand = read_wide(&require(dir, "demand.csv")?)?;
    let avail = read_wide(&require(dir, "availability.csv")?)?;

    let mut violations = Vec::new();
    let mut demand_map = BTreeMap::new();
    for (id, s) in demand {
        if net.zone_index(ZoneId(id)).is_none() {
            violations.push(Violation::new(
                "demand.csv",
                id,
                ViolationKind::DanglingReference { field: "column".into(), target: format!("zone {id}") },
            ));
        }
        demand_map.insert(ZoneId(id), s);
    }
    let mut avail_map = BTreeMap::new();
    for (id, s) in avail {
        match net.generator_index(GenId(id)) {
            Some(g) if net.generators[g].profiled => {}
            _ => violations.push(Violation::new(
                "availability.csv",
                id,
                ViolationKind::DanglingReference { field: "column".into(), target: format!("profiled generator {id}") },
            )),
        }
        avail_map.insert(GenId(id), s);
    }
    let profiles = ProfileSet { horizon_hours: manifest.horizon_hours, demand: demand_map, availability: avail_map };
    violations.extend(profiles.validate(net));
    if violations.is_empty() {
        Ok(profiles)
    } else {
        Err(GridError::Invalid(violations))
    }
}

pub fn load_dataset(dir: impl AsRef<Path>) -> Result<(Network, ProfileSet), GridError> {
    let net = load_network(dir.as_ref())?;
    let profiles = load_profiles(dir.as_ref(), &net)?;
    Ok((net, profiles))
}

/// Writes the static tables and a manifest. `horizon_hours` goes into the
/// manifest so that profiles written alongside stay consistent.
pub fn save_network(dir: impl AsRef<Path>, net: &Network, horizon_hours: usize) -> Result<(), GridError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| GridError::io(dir, e))?;
    let manifest = Manifest { name: net.name.clone(), horizon_hours, base_mva: net.base_mva };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = dir.join("manifest.json");
    write_atomic(&path, json.as_bytes()).map_err(|e| GridError::io(&path, e))?;

    write_rows(
        &dir.join("buses.csv"),
        net.buses.iter().map(|b| BusRow {
            id: b.id.0,
            zone_id: b.zone_id.0,
            state: b.state.clone(),
            interconnection: b.interconnection,
            demand_share: b.demand_share,
        }),
    )?;
    write_rows(
        &dir.join("branches.csv"),
        net.branches.iter().map(|b| BranchRow {
            id: b.id.0,
            from: b.from_bus.0,
            to: b.to_bus.0,
            susceptance: b.susceptance,
            capacity_mw: b.capacity,
            length_mi: b.length,
            kind: b.kind,
        }),
    )?;
    write_rows(
        &dir.join("dclines.csv"),
        net.dc_elements.iter().map(|d| DcRow {
            id: d.id.0,
            from: d.from_bus.0,
            to: d.to_bus.0,
            capacity_mw: d.capacity,
            kind: d.kind,
            length_mi: d.length,
            name: d.name.clone(),
        }),
    )?;
    write_rows(
        &dir.join("generators.csv"),
        net.generators.iter().map(|g| GeneratorRow {
            id: g.id.0,
            bus: g.bus.0,
            fuel: g.fuel,
            capacity_mw: g.capacity,
            marginal_cost: g.marginal_cost,
            ramp_mw_h: g.ramp_limit,
            co2_t_mwh: g.co2_rate,
            nox_t_mwh: g.nox_rate,
            so2_t_mwh: g.so2_rate,
            profiled: g.profiled,
        }),
    )?;
    write_rows(
        &dir.join("zones.csv"),
        net.zones.iter().map(|z| ZoneRow {
            id: z.id.0,
            name: z.name.clone(),
            state: z.state.clone(),
            interconnection: z.interconnection,
            demand_growth: z.demand_growth,
        }),
    )
}

pub fn save_profiles(dir: impl AsRef<Path>, profiles: &ProfileSet) -> Result<(), GridError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| GridError::io(dir, e))?;
    let h = profiles.horizon_hours;
    let demand: Vec<_> = profiles.demand.iter().map(|(z, s)| (z.0, s)).collect();
    write_wide(&dir.join("demand.csv"), &demand, h)?;
    let avail: Vec<_> = profiles.availability.iter().map(|(g, s)| (g.0, s)).collect();
    write_wide(&dir.join("availability.csv"), &avail, h)
}

pub fn save_dataset(dir: impl AsRef<Path>, net: &Network, profiles: &ProfileSet) -> Result<(), GridError> {
    save_network(dir.as_ref(), net, profiles.horizon_hours)?;
    save_profiles(dir.as_ref(), profiles)
}

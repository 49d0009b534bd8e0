//! Deterministic synthetic datasets: a 3-bus system, a bottleneck corridor
//! and a ~40-bus "mini-US" with three interconnections, plus the designs and
//! scenarios that go with them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GridError;
use crate::grid::{
    save_dataset, AcBranch, BranchId, BranchKind, Bus, BusId, DcElement, DcId, DcKind, Fuel, GenId, Generator,
    Interconnection, Network, ProfileSet, Seam, Zone, ZoneId,
};
use crate::scenario::{
    B2bUpgrade, DcRef, DesignName, GoalKind, GoalSpec, MacroGridDesign, NewDcLine, RenewableBudget, ScenarioSpec,
    StateTarget,
};
use crate::util::write_atomic;

pub const DEFAULT_SEED: u64 = 7;
pub const MINI_US_HOURS: usize = 672;

fn bus(id: u32, state: &str, ic: Interconnection) -> Bus {
    Bus { id: BusId(id), zone_id: ZoneId(id), state: state.into(), interconnection: ic, demand_share: 1.0 }
}

fn zone(id: u32, name: &str, state: &str, ic: Interconnection, growth: f64) -> Zone {
    Zone { id: ZoneId(id), name: name.into(), state: state.into(), interconnection: ic, demand_growth: growth }
}

fn line(id: u32, from: u32, to: u32, cap: f64, len: f64, kind: BranchKind) -> AcBranch {
    AcBranch {
        id: BranchId(id),
        from_bus: BusId(from),
        to_bus: BusId(to),
        susceptance: 500.0 / len.max(5.0),
        capacity: cap,
        length: len,
        kind,
    }
}

/// Cost and emission defaults by fuel: ($/MWh, t CO2, t NOx, t SO2 per MWh,
/// ramp as a fraction of capacity per hour).
fn fuel_defaults(fuel: Fuel) -> (f64, f64, f64, f64, f64) {
    match fuel {
        Fuel::Coal => (24.0, 0.95, 0.0009, 0.0011, 0.35),
        Fuel::Ng => (32.0, 0.42, 0.0002, 0.000005, f64::INFINITY),
        Fuel::Oil => (95.0, 0.78, 0.0011, 0.0015, f64::INFINITY),
        Fuel::Nuclear => (9.0, 0.0, 0.0, 0.0, 0.15),
        Fuel::Hydro => (3.0, 0.0, 0.0, 0.0, f64::INFINITY),
        Fuel::Geothermal => (5.0, 0.0, 0.0, 0.0, 0.2),
        Fuel::Solar | Fuel::Wind | Fuel::Other => (0.0, 0.0, 0.0, 0.0, f64::INFINITY),
    }
}

fn generator(id: u32, bus: u32, fuel: Fuel, cap: f64, cost_offset: f64) -> Generator {
    let (cost, co2, nox, so2, ramp) = fuel_defaults(fuel);
    Generator {
        id: GenId(id),
        bus: BusId(bus),
        fuel,
        capacity: cap,
        marginal_cost: cost + cost_offset,
        ramp_limit: if ramp.is_finite() { ramp * cap } else { f64::INFINITY },
        co2_rate: co2,
        nox_rate: nox,
        so2_rate: so2,
        profiled: fuel.is_profiled(),
    }
}

fn profile_set(hours: usize, demand: BTreeMap<ZoneId, Vec<f64>>, availability: BTreeMap<GenId, Vec<f64>>) -> ProfileSet {
    ProfileSet { horizon_hours: hours, demand, availability }
}

/// 1 + amplitude * (peak at 15:00 local), lower on weekends.
fn load_shape(local_hour: f64, day: usize) -> f64 {
    let weekend = if day % 7 >= 5 { 0.92 } else { 1.0 };
    weekend * (1.0 + 0.17 * (2.0 * PI * (local_hour - 9.0) / 24.0).sin())
}

fn solar_shape(local_hour: f64) -> f64 {
    (PI * (local_hour - 6.0) / 13.0).sin().max(0.0)
}

/// Night peaking, strongest near 02:00 local.
fn wind_diurnal(local_hour: f64) -> f64 {
    0.22 * (2.0 * PI * (local_hour - 2.0) / 24.0).cos()
}

/// Three Eastern buses in a triangle, 48 hours. Coal at bus 1, gas at bus 2
/// and wind at bus 3 that is oversupplied at night.
pub fn three_bus() -> (Network, ProfileSet) {
    let ic = Interconnection::Eastern;
    let buses = vec![bus(1, "AA", ic), bus(2, "BB", ic), bus(3, "CC", ic)];
    let zones = vec![zone(1, "north", "AA", ic, 0.01), zone(2, "city", "BB", ic, 0.01), zone(3, "plains", "CC", ic, 0.01)];
    let branches = vec![
        line(1, 1, 2, 100.0, 60.0, BranchKind::Line),
        line(2, 2, 3, 70.0, 80.0, BranchKind::Line),
        line(3, 1, 3, 60.0, 50.0, BranchKind::Transformer),
    ];
    let generators =
        vec![generator(1, 1, Fuel::Coal, 200.0, 0.0), generator(2, 2, Fuel::Ng, 150.0, 13.0), generator(3, 3, Fuel::Wind, 120.0, 0.0)];
    let net = Network::new("3bus", 100.0, buses, branches, vec![], generators, zones).expect("valid fixture");
    let hours = 48;
    let mut demand = BTreeMap::new();
    demand.insert(ZoneId(1), (0..hours).map(|t| 20.0 * load_shape((t % 24) as f64, t / 24)).collect());
    demand.insert(ZoneId(2), (0..hours).map(|t| 90.0 * load_shape((t % 24) as f64, t / 24)).collect());
    demand.insert(ZoneId(3), (0..hours).map(|t| 15.0 * load_shape((t % 24) as f64, t / 24)).collect());
    let wind: Vec<f64> = (0..hours).map(|t| (0.6 + 2.0 * wind_diurnal((t % 24) as f64)).clamp(0.0, 1.0)).collect();
    let availability = BTreeMap::from([(GenId(3), wind)]);
    (net, profile_set(hours, demand, availability))
}

/// Remote wind (bus 1, state WW) reaches the load pocket (buses 3 and 4,
/// state LL) only through the two-branch corridor 1-2-3, each branch 10 MW.
pub fn bottleneck() -> (Network, ProfileSet) {
    let ic = Interconnection::Western;
    let buses = vec![bus(1, "WW", ic), bus(2, "WW", ic), bus(3, "LL", ic), bus(4, "LL", ic)];
    let zones = vec![
        zone(1, "wind", "WW", ic, 0.0),
        zone(2, "midway", "WW", ic, 0.0),
        zone(3, "metro", "LL", ic, 0.0),
        zone(4, "suburb", "LL", ic, 0.0),
    ];
    let branches = vec![
        line(1, 1, 2, 10.0, 100.0, BranchKind::Line),
        line(2, 2, 3, 10.0, 80.0, BranchKind::Line),
        line(3, 3, 4, 200.0, 30.0, BranchKind::Line),
    ];
    let generators = vec![
        generator(1, 1, Fuel::Wind, 60.0, 0.0),
        generator(2, 3, Fuel::Ng, 100.0, 8.0),
        generator(3, 4, Fuel::Coal, 30.0, 0.0),
    ];
    let net = Network::new("bottleneck", 100.0, buses, branches, vec![], generators, zones).expect("valid fixture");
    let hours = 48;
    let mut demand = BTreeMap::new();
    demand.insert(ZoneId(1), vec![0.0; hours]);
    demand.insert(ZoneId(2), vec![0.0; hours]);
    demand.insert(ZoneId(3), (0..hours).map(|t| 30.0 * load_shape((t % 24) as f64, t / 24)).collect());
    demand.insert(ZoneId(4), (0..hours).map(|t| 20.0 * load_shape((t % 24) as f64, t / 24)).collect());
    let wind: Vec<f64> = (0..hours).map(|t| (0.8 + 1.0 * wind_diurnal((t % 24) as f64)).clamp(0.0, 1.0)).collect();
    (net, profile_set(hours, demand, BTreeMap::from([(GenId(1), wind)])))
}

/// Both states must source 60% of their demand from renewables, pooled.
pub fn bottleneck_scenario() -> ScenarioSpec {
    let mut spec = ScenarioSpec::baseline("bottleneck-goal");
    spec.renewables = RenewableBudget::Deferred(crate::scenario::SolveByExpansion::SolveByExpansion);
    spec.goals = GoalSpec {
        kind: GoalKind::Renewable,
        states: BTreeMap::from([("LL".to_string(), 0.6), ("WW".to_string(), 0.6)]),
        pools: vec![vec!["LL".into(), "WW".into()]],
        cross_seam_pooling: false,
    };
    spec
}

use Interconnection::{Eastern as E, Ercot as T, Western as W};

/// id, city, state, interconnection, latitude, longitude, mean load MW.
const MINI_US_BUSES: [(u32, &str, &str, Interconnection, f64, f64, f64); 42] = [
    (1, "Seattle", "WA", W, 47.61, -122.33, 6000.0),
    (2, "Portland", "OR", W, 45.52, -122.68, 4000.0),
    (3, "Colstrip", "MT", W, 45.88, -106.62, 300.0),
    (4, "Boise", "ID", W, 43.62, -116.20, 2500.0),
    (5, "Reno", "NV", W, 39.53, -119.81, 1500.0),
    (6, "Sacramento", "CA", W, 38.58, -121.49, 5000.0),
    (7, "Los Angeles", "CA", W, 34.05, -118.24, 18000.0),
    (8, "Victorville", "CA", W, 34.54, -117.29, 1000.0),
    (9, "Las Vegas", "NV", W, 36.17, -115.14, 4000.0),
    (10, "Palo Verde", "AZ", W, 33.39, -112.86, 200.0),
    (11, "Phoenix", "AZ", W, 33.45, -112.07, 8000.0),
    (12, "Salt Lake City", "UT", W, 40.76, -111.89, 4000.0),
    (13, "Cheyenne", "WY", W, 41.14, -104.82, 800.0),
    (14, "Brush", "CO", W, 40.26, -103.62, 300.0),
    (15, "Denver", "CO", W, 39.74, -104.99, 6000.0),
    (16, "Albuquerque", "NM", W, 35.08, -106.65, 2500.0),
    (21, "Bismarck", "ND", E, 46.81, -100.78, 800.0),
    (22, "Pierre", "SD", E, 44.37, -100.35, 500.0),
    (23, "North Platte", "NE", E, 41.12, -100.77, 600.0),
    (24, "Garden City", "KS", E, 37.97, -100.87, 500.0),
    (25, "Hobbs", "NM", E, 32.70, -103.14, 400.0),
    (26, "Amarillo", "TX", E, 35.22, -101.83, 1500.0),
    (27, "Oklahoma City", "OK", E, 35.47, -97.52, 6000.0),
    (28, "Minneapolis", "MN", E, 44.98, -93.27, 9000.0),
    (29, "Davenport", "IA", E, 41.52, -90.58, 3000.0),
    (30, "Kansas City", "MO", E, 39.10, -94.58, 6000.0),
    (31, "St. Louis", "MO", E, 38.63, -90.20, 8000.0),
    (32, "Chicago", "IL", E, 41.88, -87.63, 20000.0),
    (33, "Detroit", "MI", E, 42.33, -83.05, 12000.0),
    (34, "Memphis", "TN", E, 35.15, -90.05, 7000.0),
    (35, "Panola", "TX", E, 32.16, -94.34, 3000.0),
    (36, "New Orleans", "LA", E, 29.95, -90.07, 8000.0),
    (37, "Atlanta", "GA", E, 33.75, -84.39, 15000.0),
    (38, "Orlando", "FL", E, 28.54, -81.38, 12000.0),
    (39, "Charlotte", "NC", E, 35.23, -80.84, 12000.0),
    (40, "Pittsburgh", "PA", E, 40.44, -79.99, 14000.0),
    (41, "New York", "NY", E, 40.71, -74.01, 30000.0),
    (51, "Sweetwater", "TX", T, 32.47, -100.41, 500.0),
    (52, "Wichita Falls", "TX", T, 33.91, -98.49, 800.0),
    (53, "Dallas", "TX", T, 32.78, -96.80, 16000.0),
    (54, "Houston", "TX", T, 29.76, -95.37, 16000.0),
    (55, "San Antonio", "TX", T, 29.42, -98.49, 9000.0),
];

/// AC branches: from, to, MW.
const MINI_US_BRANCHES: [(u32, u32, f64); 60] = [
    (1, 2, 6000.0),
    (2, 6, 5000.0),
    (1, 4, 3000.0),
    (2, 4, 3000.0),
    (3, 4, 2500.0),
    (3, 13, 2000.0),
    (4, 12, 3000.0),
    (4, 5, 2000.0),
    (5, 6, 3000.0),
    (6, 7, 6000.0),
    (7, 8, 9000.0),
    (8, 9, 5000.0),
    (9, 12, 3000.0),
    (9, 11, 4000.0),
    (10, 11, 9000.0),
    (10, 7, 6000.0),
    (11, 16, 2500.0),
    (12, 13, 2500.0),
    (13, 15, 3500.0),
    (14, 15, 3500.0),
    (15, 16, 2500.0),
    (21, 22, 3000.0),
    (21, 28, 3500.0),
    (22, 23, 3000.0),
    (22, 28, 3500.0),
    (23, 24, 3000.0),
    (23, 30, 4000.0),
    (24, 26, 3000.0),
    (24, 30, 4000.0),
    (25, 26, 2000.0),
    (26, 27, 4000.0),
    (27, 30, 5000.0),
    (27, 35, 4000.0),
    (28, 29, 5000.0),
    (29, 32, 6000.0),
    (29, 30, 4000.0),
    (30, 31, 6000.0),
    (31, 32, 6000.0),
    (31, 34, 5000.0),
    (32, 33, 8000.0),
    (33, 40, 6000.0),
    (34, 35, 4000.0),
    (34, 36, 5000.0),
    (35, 36, 4000.0),
    (34, 37, 6000.0),
    (36, 37, 5000.0),
    (37, 38, 7000.0),
    (37, 39, 7000.0),
    (39, 40, 6000.0),
    (40, 41, 12000.0),
    (32, 40, 8000.0),
    (39, 41, 8000.0),
    (28, 32, 4000.0),
    (51, 52, 3000.0),
    (51, 53, 4000.0),
    (51, 55, 4000.0),
    (52, 53, 4000.0),
    (53, 54, 8000.0),
    (53, 55, 6000.0),
    (54, 55, 6000.0),
];

/// Converter stations: name, from, to, MW.
const MINI_US_B2B: [(&str, u32, u32, f64); 9] = [
    ("Blackwater", 16, 26, 200.0),
    ("Eddy", 16, 25, 200.0),
    ("Lamar", 15, 24, 210.0),
    ("Miles City", 3, 21, 200.0),
    ("Oklaunion", 27, 52, 200.0),
    ("Rapid City", 13, 22, 200.0),
    ("Sidney", 14, 23, 200.0),
    ("Stegall", 13, 23, 100.0),
    ("Welsh", 35, 53, 600.0),
];

/// Generation fleet: bus, fuel, MW.
const MINI_US_FLEET: &[(u32, Fuel, f64)] = &[
    (1, Fuel::Hydro, 6000.0),
    (1, Fuel::Ng, 5000.0),
    (1, Fuel::Wind, 1500.0),
    (2, Fuel::Hydro, 6000.0),
    (2, Fuel::Ng, 5000.0),
    (3, Fuel::Coal, 2500.0),
    (3, Fuel::Wind, 3000.0),
    (4, Fuel::Ng, 2500.0),
    (4, Fuel::Wind, 1500.0),
    (5, Fuel::Geothermal, 800.0),
    (5, Fuel::Ng, 1500.0),
    (5, Fuel::Solar, 1000.0),
    (6, Fuel::Ng, 6000.0),
    (6, Fuel::Solar, 3000.0),
    (6, Fuel::Hydro, 2000.0),
    (7, Fuel::Ng, 20000.0),
    (7, Fuel::Oil, 3000.0),
    (7, Fuel::Solar, 3000.0),
    (8, Fuel::Solar, 6000.0),
    (9, Fuel::Ng, 5000.0),
    (9, Fuel::Solar, 4000.0),
    (10, Fuel::Nuclear, 3900.0),
    (10, Fuel::Solar, 6000.0),
    (11, Fuel::Ng, 8000.0),
    (11, Fuel::Coal, 2500.0),
    (11, Fuel::Solar, 3000.0),
    (12, Fuel::Coal, 4000.0),
    (12, Fuel::Ng, 2000.0),
    (13, Fuel::Coal, 3500.0),
    (13, Fuel::Wind, 3000.0),
    (14, Fuel::Coal, 1500.0),
    (14, Fuel::Wind, 2000.0),
    (15, Fuel::Ng, 6000.0),
    (15, Fuel::Solar, 1500.0),
    (15, Fuel::Coal, 2000.0),
    (16, Fuel::Coal, 2000.0),
    (16, Fuel::Ng, 1500.0),
    (16, Fuel::Solar, 2000.0),
    (21, Fuel::Coal, 3000.0),
    (21, Fuel::Wind, 4000.0),
    (22, Fuel::Wind, 3000.0),
    (23, Fuel::Coal, 1500.0),
    (23, Fuel::Wind, 3500.0),
    (24, Fuel::Wind, 4000.0),
    (24, Fuel::Ng, 500.0),
    (25, Fuel::Ng, 800.0),
    (25, Fuel::Wind, 1500.0),
    (26, Fuel::Coal, 2000.0),
    (26, Fuel::Wind, 5000.0),
    (27, Fuel::Ng, 7000.0),
    (27, Fuel::Wind, 5000.0),
    (28, Fuel::Coal, 4000.0),
    (28, Fuel::Ng, 5000.0),
    (28, Fuel::Nuclear, 1700.0),
    (28, Fuel::Wind, 3000.0),
    (29, Fuel::Coal, 2000.0),
    (29, Fuel::Wind, 6000.0),
    (30, Fuel::Coal, 4000.0),
    (30, Fuel::Ng, 4000.0),
    (31, Fuel::Coal, 6000.0),
    (31, Fuel::Ng, 4000.0),
    (32, Fuel::Nuclear, 8000.0),
    (32, Fuel::Coal, 6000.0),
    (32, Fuel::Ng, 12000.0),
    (33, Fuel::Coal, 5000.0),
    (33, Fuel::Ng, 9000.0),
    (34, Fuel::Coal, 4000.0),
    (34, Fuel::Ng, 5000.0),
    (34, Fuel::Solar, 1000.0),
    (35, Fuel::Coal, 3000.0),
    (35, Fuel::Ng, 2000.0),
    (36, Fuel::Ng, 9000.0),
    (36, Fuel::Solar, 1000.0),
    (37, Fuel::Nuclear, 4000.0),
    (37, Fuel::Ng, 10000.0),
    (37, Fuel::Coal, 4000.0),
    (37, Fuel::Solar, 2000.0),
    (38, Fuel::Ng, 13000.0),
    (38, Fuel::Solar, 3000.0),
    (39, Fuel::Nuclear, 5000.0),
    (39, Fuel::Ng, 8000.0),
    (39, Fuel::Solar, 3000.0),
    (40, Fuel::Coal, 6000.0),
    (40, Fuel::Ng, 10000.0),
    (40, Fuel::Nuclear, 6000.0),
    (41, Fuel::Ng, 30000.0),
    (41, Fuel::Nuclear, 3000.0),
    (41, Fuel::Oil, 4000.0),
    (51, Fuel::Wind, 8000.0),
    (51, Fuel::Solar, 2000.0),
    (52, Fuel::Wind, 3000.0),
    (52, Fuel::Ng, 1000.0),
    (53, Fuel::Ng, 19000.0),
    (53, Fuel::Nuclear, 2400.0),
    (53, Fuel::Coal, 3000.0),
    (54, Fuel::Ng, 16000.0),
    (54, Fuel::Coal, 2000.0),
    (55, Fuel::Ng, 13000.0),
    (55, Fuel::Solar, 2000.0),
];

/// Hours ahead of the central-time clock the profiles are indexed by.
fn clock_offset(ic: Interconnection) -> f64 {
    match ic {
        Interconnection::Western => -2.0,
        Interconnection::Eastern => 1.0,
        Interconnection::Ercot => 0.0,
    }
}

/// Great-circle distance in miles.
pub fn haversine_miles(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (la1, lo1, la2, lo2) = (a.0.to_radians(), a.1.to_radians(), b.0.to_radians(), b.1.to_radians());
    let h = ((la2 - la1) / 2.0).sin().powi(2) + la1.cos() * la2.cos() * ((lo2 - lo1) / 2.0).sin().powi(2);
    2.0 * 3958.8 * h.sqrt().asin()
}

fn mini_us_coords(id: u32) -> (f64, f64) {
    let b = MINI_US_BUSES.iter().find(|b| b.0 == id).expect("fixture bus");
    (b.4, b.5)
}

/// Bus id of a mini-US city.
pub fn mini_us_bus(city: &str) -> Option<BusId> {
    MINI_US_BUSES.iter().find(|b| b.1 == city).map(|b| BusId(b.0))
}

fn route_miles(a: u32, b: u32) -> f64 {
    // Rights of way run longer than the crow flies.
    (1.15 * haversine_miles(mini_us_coords(a), mini_us_coords(b))).round()
}

/// Standard normal by Box-Muller.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Wind regions with independent weather: West interior, West coast,
/// the Plains, the upper Midwest, ERCOT.
fn wind_region(bus: u32) -> usize {
    match bus {
        3 | 13 | 14 => 0,
        1..=12 | 15 | 16 => 1,
        21..=27 => 2,
        28..=41 => 3,
        _ => 4,
    }
}

/// Four weeks of hourly data on 42 buses spanning the three
/// interconnections. The hour index is central time.
pub fn mini_us(seed: u64) -> (Network, ProfileSet) {
    let hours = MINI_US_HOURS;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let buses: Vec<Bus> = MINI_US_BUSES.iter().map(|b| bus(b.0, b.2, b.3)).collect();
    let zones: Vec<Zone> = MINI_US_BUSES.iter().map(|b| zone(b.0, b.1, b.2, b.3, 0.01)).collect();
    let branches: Vec<AcBranch> = MINI_US_BRANCHES
        .iter()
        .enumerate()
        .map(|(i, &(a, b, cap))| line(i as u32 + 1, a, b, cap, route_miles(a, b), BranchKind::Line))
        .collect();
    let dc: Vec<DcElement> = MINI_US_B2B
        .iter()
        .enumerate()
        .map(|(i, &(name, a, b, cap))| DcElement {
            id: DcId(i as u32 + 1),
            from_bus: BusId(a),
            to_bus: BusId(b),
            capacity: cap,
            kind: DcKind::B2b,
            length: 0.0,
            seam: Seam::Intra,
            name: name.into(),
        })
        .collect();
    let generators: Vec<Generator> = MINI_US_FLEET
        .iter()
        .enumerate()
        .map(|(i, &(b, fuel, cap))| {
            // Small site-specific spreads keep the merit order strict.
            let offset = match fuel {
                Fuel::Solar | Fuel::Wind => 0.01 * (b % 7) as f64,
                _ => 0.25 * (b % 11) as f64,
            };
            generator(i as u32 + 1, b, fuel, cap, offset)
        })
        .collect();
    let net = Network::new("mini-us", 100.0, buses, branches, dc, generators, zones).expect("valid fixture");

    let mut demand = BTreeMap::new();
    for b in MINI_US_BUSES.iter() {
        let off = clock_offset(b.3);
        let series = (0..hours)
            .map(|t| {
                let local = (t % 24) as f64 + off;
                let day = (t as f64 + off).max(0.0) as usize / 24;
                let noise = 1.0 + 0.02 * normal(&mut rng);
                (b.6 * load_shape(local, day) * noise).max(0.0)
            })
            .collect::<Vec<f64>>();
        demand.insert(ZoneId(b.0), series);
    }

    // Shared weather: per-region wind anomaly (AR(1)) and daily cloud cover.
    let mut wind_anomaly = vec![vec![0.0; hours]; 5];
    for series in wind_anomaly.iter_mut() {
        let mut x = 0.0;
        for v in series.iter_mut() {
            x = 0.95 * x + 0.06 * normal(&mut rng);
            *v = x;
        }
    }
    let days = hours.div_ceil(24) + 1;
    let clouds: Vec<Vec<f64>> =
        (0..3).map(|_| (0..days).map(|_| rng.gen_range(0.6..1.0)).collect()).collect();

    let mut availability = BTreeMap::new();
    for (gi, g) in net.generators.iter().enumerate() {
        let b = g.bus.0;
        let ic = net.generator_interconnection(gi);
        let off = clock_offset(ic);
        let series: Vec<f64> = match g.fuel {
            Fuel::Wind => {
                let r = wind_region(b);
                let base = if r == 2 { 0.45 } else { 0.36 };
                (0..hours)
                    .map(|t| (base + wind_diurnal((t % 24) as f64 + off) + wind_anomaly[r][t]).clamp(0.02, 0.98))
                    .collect()
            }
            Fuel::Solar => {
                let cloud = &clouds[ic as usize];
                (0..hours)
                    .map(|t| {
                        let local = (t % 24) as f64 + off;
                        (solar_shape(local) * cloud[t / 24]).clamp(0.0, 1.0)
                    })
                    .collect()
            }
            Fuel::Hydro => (0..hours).map(|t| 0.5 + 0.1 * (2.0 * PI * t as f64 / hours as f64).sin()).collect(),
            _ => continue,
        };
        availability.insert(g.id, series);
    }
    (net, profile_set(hours, demand, availability))
}

/// Converter capacities for the B2B-upgrade designs, in station order.
const B2B_UPGRADES_2A: [f64; 9] = [399.0, 2895.0, 9541.0, 2957.0, 3871.0, 4166.0, 1108.0, 5943.0, 4271.0];
const B2B_UPGRADES_2B: [f64; 9] = [234.0, 338.0, 2285.0, 1319.0, 3871.0, 1589.0, 1255.0, 1782.0, 4271.0];

const DESIGN_2B_LINES: [(&str, &str, &str); 3] = [
    ("Washington-Iowa", "Seattle", "Davenport"),
    ("Utah-Missouri", "Salt Lake City", "St. Louis"),
    ("Arizona-Oklahoma", "Palo Verde", "Oklahoma City"),
];

const DESIGN_3_LINES: [(&str, &str); 16] = [
    ("Orlando", "Atlanta"),
    ("Atlanta", "Panola"),
    ("Panola", "St. Louis"),
    ("Panola", "Sweetwater"),
    ("St. Louis", "Brush"),
    ("St. Louis", "Davenport"),
    ("Davenport", "Minneapolis"),
    ("Minneapolis", "Colstrip"),
    ("Colstrip", "Seattle"),
    ("Seattle", "Reno"),
    ("Reno", "Victorville"),
    ("Victorville", "Las Vegas"),
    ("Las Vegas", "Brush"),
    ("Brush", "Amarillo"),
    ("Victorville", "Palo Verde"),
    ("Palo Verde", "Sweetwater"),
];

fn new_line(name: &str, from: &str, to: &str, mw: f64) -> NewDcLine {
    let a = mini_us_bus(from).expect("fixture city");
    let b = mini_us_bus(to).expect("fixture city");
    NewDcLine { from_bus: a, to_bus: b, capacity_mw: mw, length_mi: route_miles(a.0, b.0), name: Some(name.into()) }
}

fn upgrades(caps: &[f64; 9]) -> Vec<B2bUpgrade> {
    MINI_US_B2B
        .iter()
        .zip(caps)
        .map(|(s, &mw)| B2bUpgrade { element: DcRef::Name(s.0.into()), capacity_mw: mw })
        .collect()
}

/// The four Macro Grid designs laid onto the mini-US buses. Design 1 adds
/// nothing; 2a and 2b raise the converter stations (2b also adds three long
/// lines); 3 is a 16-line 8 GW overlay.
pub fn mini_us_design(name: DesignName) -> MacroGridDesign {
    let (b2b_upgrades, new_dc_lines) = match name {
        DesignName::Design1 | DesignName::Custom => (vec![], vec![]),
        DesignName::Design2a => (upgrades(&B2B_UPGRADES_2A), vec![]),
        DesignName::Design2b => (
            upgrades(&B2B_UPGRADES_2B),
            DESIGN_2B_LINES.iter().map(|(n, a, b)| new_line(n, a, b, 9500.0)).collect(),
        ),
        DesignName::Design3 => (
            vec![],
            DESIGN_3_LINES.iter().map(|(a, b)| new_line(&format!("{a}-{b}"), a, b, 8000.0)).collect(),
        ),
    };
    MacroGridDesign { name, b2b_upgrades, new_dc_lines }
}

pub const MINI_US_DESIGNS: [(DesignName, &str); 4] = [
    (DesignName::Design1, "design1"),
    (DesignName::Design2a, "design2a"),
    (DesignName::Design2b, "design2b"),
    (DesignName::Design3, "design3"),
];

/// Share of demand every state must source from renewables. All states
/// pool nationally, so the goal tracks total renewable delivery.
pub const MINI_US_GOAL: f64 = 0.29;

/// Renewable build-out to the target year, MW by state.
const MINI_US_BUILD: [(&str, f64, f64); 15] = [
    ("AZ", 10000.0, 0.0),
    ("CA", 12000.0, 0.0),
    ("NV", 5000.0, 0.0),
    ("CO", 6000.0, 0.0),
    ("NM", 4000.0, 0.0),
    ("WY", 0.0, 6000.0),
    ("MT", 0.0, 4000.0),
    ("ND", 0.0, 8000.0),
    ("SD", 0.0, 8000.0),
    ("NE", 0.0, 8000.0),
    ("KS", 0.0, 10000.0),
    ("OK", 0.0, 8000.0),
    ("IA", 0.0, 18000.0),
    ("MN", 0.0, 16000.0),
    ("TX", 4000.0, 14000.0),
];

/// The goal scenario for one design; the design itself is read from
/// `designs/<name>.json` next to the scenario directory.
pub fn mini_us_scenario(design: &str) -> ScenarioSpec {
    let mut spec = ScenarioSpec::baseline(design);
    spec.target_year = 2030;
    spec.renewables = RenewableBudget::Targets(
        MINI_US_BUILD
            .iter()
            .map(|&(s, solar, wind)| (s.to_string(), StateTarget { solar_mw: solar, wind_mw: wind }))
            .collect(),
    );
    let states: BTreeMap<String, f64> =
        MINI_US_BUSES.iter().map(|b| (b.2.to_string(), MINI_US_GOAL)).collect();
    spec.goals = GoalSpec {
        kind: GoalKind::Renewable,
        pools: vec![states.keys().cloned().collect()],
        states,
        cross_seam_pooling: true,
    };
    spec.design_file = Some(format!("../designs/{design}.json").into());
    spec
}

/// Fixture names accepted by [`write_fixture`].
pub const FIXTURE_NAMES: [&str; 3] = ["3bus", "bottleneck", "mini-us"];

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), GridError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| GridError::Json { file: path.to_path_buf(), message: e.to_string() })?;
    text.push('\n');
    write_atomic(path, text.as_bytes()).map_err(|e| GridError::io(path, e))
}

/// Writes a fixture's dataset into `dir`, and its designs and scenarios into
/// `dir/designs` and `dir/scenarios` where it has them.
pub fn write_fixture(name: &str, dir: &Path, seed: u64) -> Result<(), GridError> {
    match name {
        "3bus" => {
            let (net, prof) = three_bus();
            save_dataset(dir, &net, &prof)
        }
        "bottleneck" => {
            let (net, prof) = bottleneck();
            save_dataset(dir, &net, &prof)?;
            fs::create_dir_all(dir.join("scenarios")).map_err(|e| GridError::io(dir, e))?;
            write_json(&dir.join("scenarios/goal.json"), &bottleneck_scenario())
        }
        "mini-us" => {
            let (net, prof) = mini_us(seed);
            save_dataset(dir, &net, &prof)?;
            for sub in ["designs", "scenarios"] {
                fs::create_dir_all(dir.join(sub)).map_err(|e| GridError::io(dir, e))?;
            }
            for (design, file) in MINI_US_DESIGNS {
                write_json(&dir.join(format!("designs/{file}.json")), &mini_us_design(design))?;
                write_json(&dir.join(format!("scenarios/{file}.json")), &mini_us_scenario(file))?;
            }
            let mut current = ScenarioSpec::baseline("current");
            current.target_year = 2030;
            write_json(&dir.join("scenarios/current.json"), &current)
        }
        other => Err(GridError::Invalid(vec![crate::grid::Violation::new(
            "fixture",
            other,
            crate::grid::ViolationKind::InvalidValue {
                field: "name".into(),
                message: format!("unknown fixture (expected one of {})", FIXTURE_NAMES.join(", ")),
            },
        )])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{load_dataset, Seam};
    use crate::scenario::apply_macrogrid_design;

    #[test]
    fn three_bus_shape() {
        let (net, prof) = three_bus();
        assert_eq!((net.buses.len(), net.branches.len(), net.generators.len()), (3, 3, 3));
        assert_eq!(prof.horizon_hours, 48);
        assert!(prof.validate(&net).is_empty());
    }

    #[test]
    fn distances() {
        // Seattle to Davenport, roughly 1,560 miles.
        let d = haversine_miles(mini_us_coords(1), mini_us_coords(29));
        assert!((1500.0..1650.0).contains(&d), "{d}");
        assert_eq!(haversine_miles((10.0, 20.0), (10.0, 20.0)), 0.0);
    }

    #[test]
    fn mini_us_is_valid_and_deterministic() {
        let (net, prof) = mini_us(DEFAULT_SEED);
        assert_eq!(net.buses.len(), 42);
        assert!(prof.validate(&net).is_empty());
        let (net2, prof2) = mini_us(DEFAULT_SEED);
        assert_eq!(net, net2);
        assert_eq!(prof, prof2);
        assert_ne!(mini_us(DEFAULT_SEED + 1).1, prof);
    }

    #[test]
    fn design_seams() {
        let (net, _) = mini_us(DEFAULT_SEED);
        let d3 = apply_macrogrid_design(&net, &mini_us_design(DesignName::Design3)).unwrap();
        let count = |s: Seam| d3.dc_elements.iter().filter(|d| d.kind == DcKind::Line && d.seam == s).count();
        assert_eq!(count(Seam::EastWest), 3);
        assert_eq!(count(Seam::EastErcot), 1);
        assert_eq!(count(Seam::WestErcot), 1);
        assert_eq!(count(Seam::Intra), 11);
        let d2b = mini_us_design(DesignName::Design2b);
        let add = d2b.additions(&net).unwrap();
        assert_eq!(add.b2b_upgrade_mw, 14_834.0);
        assert_eq!(mini_us_design(DesignName::Design2a).additions(&net).unwrap().b2b_upgrade_mw, 33_041.0);
        let eddy = apply_macrogrid_design(&net, &mini_us_design(DesignName::Design2a)).unwrap();
        assert_eq!(eddy.dc_elements.iter().find(|d| d.name == "Eddy").unwrap().capacity, 2895.0);
    }

    #[test]
    fn written_fixture_loads() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture("bottleneck", dir.path(), DEFAULT_SEED).unwrap();
        let (net, prof) = load_dataset(dir.path()).unwrap();
        assert_eq!((net, prof), bottleneck());
        assert!(dir.path().join("scenarios/goal.json").exists());
        assert!(write_fixture("nope", dir.path(), 0).is_err());
    }
}

//! Random small networks shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use macrogrid::{
    AcBranch, BranchId, BranchKind, Bus, BusId, DcElement, DcId, DcKind, Fuel, GenId, Generator, Interconnection,
    Network, ProfileSet, Seam, Zone, ZoneId,
};

pub struct Case {
    pub net: Network,
    pub profiles: ProfileSet,
    pub window: usize,
}

/// Up to 6 buses, 8 branches and 24 hours; networks of 4 or more buses may
/// split into two interconnections joined by one DC link.
pub fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let nb = rng.gen_range(2..=6usize);
    let two_ic = nb >= 4 && rng.gen_bool(0.5);
    let ic_of = |i: usize| if two_ic && i >= nb / 2 { Interconnection::Western } else { Interconnection::Eastern };
    let buses: Vec<Bus> = (0..nb)
        .map(|i| Bus {
            id: BusId(i as u32 + 1),
            zone_id: ZoneId(i as u32 + 1),
            state: "AA".into(),
            interconnection: ic_of(i),
            demand_share: 1.0,
        })
        .collect();
    let zones: Vec<Zone> = buses
        .iter()
        .map(|b| Zone {
            id: b.zone_id,
            name: format!("z{}", b.zone_id),
            state: "AA".into(),
            interconnection: b.interconnection,
            demand_growth: 0.0,
        })
        .collect();
    let mut pairs = Vec::new();
    for i in 1..nb {
        let same: Vec<usize> = (0..i).filter(|&j| ic_of(j) == ic_of(i)).collect();
        if let Some(&j) = same.get(rng.gen_range(0..same.len().max(1))) {
            pairs.push((j, i));
        }
    }
    let extra = rng.gen_range(0..=8 - pairs.len());
    for _ in 0..extra {
        let (a, b) = (rng.gen_range(0..nb), rng.gen_range(0..nb));
        if a != b && ic_of(a) == ic_of(b) {
            pairs.push((a, b));
        }
    }
    let branches: Vec<AcBranch> = pairs
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| AcBranch {
            id: BranchId(k as u32 + 1),
            from_bus: BusId(a as u32 + 1),
            to_bus: BusId(b as u32 + 1),
            susceptance: rng.gen_range(2.0..20.0),
            capacity: rng.gen_range(15.0..120.0),
            length: 10.0,
            kind: BranchKind::Line,
        })
        .collect();
    let dc_elements = if two_ic {
        vec![DcElement {
            id: DcId(1),
            from_bus: BusId(rng.gen_range(1..=(nb / 2) as u32)),
            to_bus: BusId(rng.gen_range((nb / 2) as u32 + 1..=nb as u32)),
            capacity: rng.gen_range(10.0..80.0),
            kind: DcKind::B2b,
            length: 0.0,
            seam: Seam::Intra,
            name: "link".into(),
        }]
    } else {
        vec![]
    };
    let mut generators = Vec::new();
    for b in 0..nb {
        for _ in 0..rng.gen_range(0..=2) {
            let fuel = [Fuel::Coal, Fuel::Ng, Fuel::Wind][rng.gen_range(0..3)];
            let capacity = rng.gen_range(20.0..150.0);
            let ramp_limit = if fuel != Fuel::Wind && rng.gen_bool(0.5) { rng.gen_range(5.0..40.0) } else { f64::INFINITY };
            generators.push(Generator {
                id: GenId(generators.len() as u32 + 1),
                bus: BusId(b as u32 + 1),
                fuel,
                capacity,
                marginal_cost: if fuel == Fuel::Wind { rng.gen_range(0.0..2.0) } else { rng.gen_range(10.0..70.0) },
                ramp_limit,
                co2_rate: 0.0,
                nox_rate: 0.0,
                so2_rate: 0.0,
                profiled: fuel.is_profiled(),
            });
        }
    }
    let hours = rng.gen_range(2..=24usize);
    let window = rng.gen_range(1..=hours);
    let profiles = ProfileSet {
        horizon_hours: hours,
        demand: zones.iter().map(|z| (z.id, (0..hours).map(|_| rng.gen_range(0.0..60.0)).collect())).collect(),
        availability: generators
            .iter()
            .filter(|g| g.profiled)
            .map(|g| (g.id, (0..hours).map(|_| rng.gen_range(0.0..1.0)).collect()))
            .collect(),
    };
    let net = Network::new("random", 100.0, buses, branches, dc_elements, generators, zones).expect("random network");
    Case { net, profiles, window }
}

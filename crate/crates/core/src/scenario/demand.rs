use crate::grid::{Network, ProfileSet};

/// Compounds each zone's demand series by its annual growth rate. Shapes
/// are kept; zones without a series are left absent.
pub fn scale_demand(profiles: &ProfileSet, net: &Network, years: u32) -> ProfileSet {
    let mut out = profiles.clone();
    for z in &net.zones {
        if let Some(series) = out.demand.get_mut(&z.id) {
            let factor = (1.0 + z.demand_growth).powi(years as i32);
            for v in series.iter_mut() {
                *v *= factor;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::testnet::*;
    use crate::grid::{Interconnection, ZoneId};

    fn two_zone(g1: f64, g2: f64) -> Network {
        let ic = Interconnection::Western;
        let mut z1 = zone(1, "AA", ic);
        z1.demand_growth = g1;
        let mut z2 = zone(2, "BB", ic);
        z2.demand_growth = g2;
        Network::new(
            "z",
            100.0,
            vec![bus(1, 1, "AA", ic, 1.0), bus(2, 2, "BB", ic, 1.0)],
            vec![line(1, 1, 2, 10.0, 1.0)],
            vec![],
            vec![],
            vec![z1, z2],
        )
        .unwrap()
    }

    #[test]
    fn compounding() {
        let net = two_zone(0.01, 0.0);
        let mut prof = constant_profiles(&net, 4, &[(1, 100.0), (2, 50.0)], 1.0);
        prof.demand.insert(ZoneId(1), vec![100.0, 80.0, 60.0, 120.0]);
        let out = scale_demand(&prof, &net, 10);
        let f = 1.01f64.powi(10);
        assert!((f - 1.104622).abs() < 1e-6);
        for (a, b) in out.demand[&ZoneId(1)].iter().zip(&prof.demand[&ZoneId(1)]) {
            assert!((a / b - f).abs() < 1e-12);
        }
        assert_eq!(out.demand[&ZoneId(2)], prof.demand[&ZoneId(2)]);
        assert_eq!(scale_demand(&prof, &net, 0), prof);
    }

    #[test]
    fn aggregate_of_two_rates() {
        let net = two_zone(0.009, 0.017);
        let prof = constant_profiles(&net, 2, &[(1, 100.0), (2, 100.0)], 1.0);
        let out = scale_demand(&prof, &net, 10);
        let z1 = out.demand[&ZoneId(1)][0] / 100.0 - 1.0;
        let z2 = out.demand[&ZoneId(2)][0] / 100.0 - 1.0;
        assert!((z1 - 0.0937).abs() < 5e-4 && (z2 - 0.1836).abs() < 5e-4);
        let total = (out.demand[&ZoneId(1)][0] + out.demand[&ZoneId(2)][0]) / 200.0 - 1.0;
        assert!((total - 0.139).abs() < 5e-4);
    }
}

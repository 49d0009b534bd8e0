use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::USD_PER_BUSD;
use crate::grid::Network;
use crate::opf::SimulationResult;

/// $B.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PaymentSplit {
    pub consumer: f64,
    pub generator: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Payments {
    pub consumer: f64,
    pub generator: f64,
    pub surplus: f64,
    pub with_goals: PaymentSplit,
    pub without_goals: PaymentSplit,
}

/// LMP-based payments. Consumers pay for served demand at their bus;
/// generators are paid at theirs. `goal_states` splits by location.
pub fn payments(result: &SimulationResult, net: &Network, goal_states: &BTreeSet<String>) -> Payments {
    let mut out = Payments::default();
    for t in 0..result.horizon_hours {
        for (bi, b) in net.buses.iter().enumerate() {
            let pay = result.lmp[t][bi] * (result.demand[t][bi] - result.shed[t][bi]) / USD_PER_BUSD;
            let split = if goal_states.contains(&b.state) { &mut out.with_goals } else { &mut out.without_goals };
            split.consumer += pay;
        }
        for (gi, g) in net.generators.iter().enumerate() {
            let bi = net.bus_index(g.bus).expect("validated");
            let pay = result.lmp[t][bi] * result.dispatch[t][gi] / USD_PER_BUSD;
            let split =
                if goal_states.contains(net.generator_state(gi)) { &mut out.with_goals } else { &mut out.without_goals };
            split.generator += pay;
        }
    }
    out.consumer = out.with_goals.consumer + out.without_goals.consumer;
    out.generator = out.with_goals.generator + out.without_goals.generator;
    out.surplus = out.consumer - out.generator;
    out
}

/// Sum over hours of flow-limit duals times capacity on AC branches and DC
/// elements, $B.
pub fn congestion_rent(result: &SimulationResult, net: &Network) -> f64 {
    let mut rent = 0.0;
    for t in 0..result.horizon_hours {
        rent += net.branches.iter().enumerate().map(|(l, b)| result.branch_dual[t][l] * b.capacity).sum::<f64>();
        rent += net.dc_elements.iter().enumerate().map(|(d, e)| result.dc_dual[t][d] * e.capacity).sum::<f64>();
    }
    rent / USD_PER_BUSD
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::testnet::*;
    use crate::grid::{Fuel, Interconnection};
    use crate::opf::{simulate_horizon, WindowOptions};

    #[test]
    fn single_price() {
        let ic = Interconnection::Eastern;
        let net = Network::new(
            "p",
            100.0,
            vec![bus(1, 1, "AA", ic, 1.0)],
            vec![],
            vec![],
            vec![gen(1, 1, Fuel::Ng, 500.0, 20.0)],
            vec![zone(1, "AA", ic)],
        )
        .unwrap();
        let r = simulate_horizon(&net, &constant_profiles(&net, 1, &[(1, 100.0)], 1.0), &WindowOptions::default()).unwrap();
        let p = payments(&r, &net, &BTreeSet::new());
        assert!((p.consumer * 1e9 - 2000.0).abs() < 1e-6);
        assert!((p.generator * 1e9 - 2000.0).abs() < 1e-6);
        assert!(p.surplus.abs() < 1e-15);
        assert_eq!(p.with_goals, PaymentSplit::default());
    }

    #[test]
    fn congested_surplus_is_rent() {
        let net = two_bus_congested();
        let prof = constant_profiles(&net, 4, &[(1, 50.0)], 1.0);
        let r = simulate_horizon(&net, &prof, &WindowOptions::default()).unwrap();
        let states: BTreeSet<String> = [net.buses[0].state.clone()].into();
        let p = payments(&r, &net, &states);
        // 2-bus case: mu = 40 $/MWh on a 30 MW line, 4 hours.
        let hand = 40.0 * net.branches[0].capacity * 4.0 / 1e9;
        assert!((p.surplus - hand).abs() <= 1e-9 * hand, "{} vs {}", p.surplus, hand);
        assert!((congestion_rent(&r, &net) - hand).abs() <= 1e-9 * hand);
        assert!((p.with_goals.consumer + p.without_goals.consumer - p.consumer).abs() < 1e-18);
        assert!((p.with_goals.generator + p.without_goals.generator - p.generator).abs() < 1e-18);
    }
}

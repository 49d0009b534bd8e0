use serde::{Deserialize, Serialize};

use super::{AnalyticsError, MWH_PER_TWH};
use crate::grid::{BusId, DcId, Interconnection, Network, Seam};
use crate::opf::SimulationResult;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeamFlow {
    pub seam: Seam,
    pub elements: usize,
    pub capacity_mw: f64,
    /// In the seam's canonical direction (East to West, East to ERCOT, West to ERCOT).
    pub forward_twh: f64,
    pub reverse_twh: f64,
    pub capacity_factor: f64,
}

impl SeamFlow {
    pub fn ratio(&self) -> f64 {
        transfer_ratio(self.forward_twh, self.reverse_twh)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeamLedger {
    pub seams: Vec<SeamFlow>,
    /// Mean |f| over capacity across every cross-seam element.
    pub overall_capacity_factor: f64,
}

pub fn transfer_ratio(forward: f64, reverse: f64) -> f64 {
    forward / reverse
}

/// `a:1` when forward dominates, `1:b` otherwise, two decimals.
pub fn format_ratio(forward: f64, reverse: f64) -> String {
    if forward == 0.0 && reverse == 0.0 {
        return "-".into();
    }
    if forward >= reverse {
        format!("{:.2}:1", forward / reverse)
    } else {
        format!("1:{:.2}", reverse / forward)
    }
}

/// +1 when an element's from-to direction is its seam's forward direction.
fn orientation(net: &Network, di: usize) -> f64 {
    let d = &net.dc_elements[di];
    let from = net.bus(d.from_bus).expect("validated").interconnection;
    if d.seam.forward_source() == Some(from) {
        1.0
    } else {
        -1.0
    }
}

fn crossing(net: &Network, seam: Seam) -> Vec<usize> {
    (0..net.dc_elements.len()).filter(|&d| net.dc_elements[d].seam == seam).collect()
}

/// Hourly flow summed over a seam's elements, forward positive, MW.
pub fn seam_hourly_flow(result: &SimulationResult, net: &Network, seam: Seam) -> Vec<f64> {
    let members = crossing(net, seam);
    (0..result.horizon_hours)
        .map(|t| members.iter().map(|&d| orientation(net, d) * result.dc_flow[t][d]).sum())
        .collect()
}

/// Directional energy and capacity factor per crossed seam; seams without
/// elements are omitted.
pub fn seam_transfers(result: &SimulationResult, net: &Network) -> SeamLedger {
    let hours = result.horizon_hours as f64;
    let mut ledger = SeamLedger::default();
    let (mut all_abs, mut all_cap) = (0.0, 0.0);
    for seam in Seam::CROSSING {
        let members = crossing(net, seam);
        if members.is_empty() {
            continue;
        }
        let (mut fwd, mut rev, mut abs) = (0.0, 0.0, 0.0);
        for t in 0..result.horizon_hours {
            for &d in &members {
                let f = orientation(net, d) * result.dc_flow[t][d];
                fwd += f.max(0.0);
                rev += (-f).max(0.0);
                abs += f.abs();
            }
        }
        let cap: f64 = members.iter().map(|&d| net.dc_elements[d].capacity).sum();
        all_abs += abs;
        all_cap += cap;
        ledger.seams.push(SeamFlow {
            seam,
            elements: members.len(),
            capacity_mw: cap,
            forward_twh: fwd / MWH_PER_TWH,
            reverse_twh: rev / MWH_PER_TWH,
            capacity_factor: if cap * hours > 0.0 { abs / (cap * hours) } else { 0.0 },
        });
    }
    ledger.overall_capacity_factor = if all_cap * hours > 0.0 { all_abs / (all_cap * hours) } else { 0.0 };
    ledger
}

/// A set of buses and the two cross-seam DC elements power may traverse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hub {
    pub buses: Vec<BusId>,
    pub elements: Vec<DcId>,
}

/// Hourly MW entering the hub on one element and leaving on the other.
/// Positive when the through-direction is the forward direction of the
/// seam between the two far ends (East to West for an ERCOT hub).
pub fn passthrough(result: &SimulationResult, net: &Network, hub: &Hub) -> Result<Vec<f64>, AnalyticsError> {
    if hub.elements.len() != 2 {
        return Err(AnalyticsError::HubElements(hub.elements.len()));
    }
    let mut idx = [0usize; 2];
    let mut into_hub = [0.0; 2];
    let mut far = [Interconnection::Eastern; 2];
    for k in 0..2 {
        let di = net.dc_index(hub.elements[k]).ok_or(AnalyticsError::UnknownDcElement(hub.elements[k]))?;
        let d = &net.dc_elements[di];
        idx[k] = di;
        let (sign, far_bus) = if hub.buses.contains(&d.to_bus) { (1.0, d.from_bus) } else { (-1.0, d.to_bus) };
        into_hub[k] = sign;
        far[k] = net.bus(far_bus).expect("validated").interconnection;
    }
    Ok((0..result.horizon_hours)
        .map(|t| {
            let imp = [into_hub[0] * result.dc_flow[t][idx[0]], into_hub[1] * result.dc_flow[t][idx[1]]];
            let (src, dst, mw) = if imp[0] > 0.0 && imp[1] < 0.0 {
                (far[0], far[1], imp[0].min(-imp[1]))
            } else if imp[1] > 0.0 && imp[0] < 0.0 {
                (far[1], far[0], imp[1].min(-imp[0]))
            } else {
                return 0.0;
            };
            let seam = Seam::between(src, dst);
            if seam.forward_source() == Some(src) || seam == Seam::Intra {
                mw
            } else {
                -mw
            }
        })
        .collect())
}

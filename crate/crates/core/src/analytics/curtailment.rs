use serde::{Deserialize, Serialize};

use crate::grid::Network;
use crate::opf::SimulationResult;

pub const HOURS_PER_WEEK: usize = 168;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurtailmentStats {
    pub median_mw: f64,
    /// Median over hours with positive availability of curtailed/available.
    pub median_share: f64,
    /// Mean curtailment, `[hour_of_day][week]`; NaN where a bin holds no hours.
    pub heatmap: Vec<Vec<f64>>,
    /// Hourly curtailment sorted descending.
    pub exceedance: Vec<f64>,
}

/// Median with the mean of the middle pair for even counts; NaN when empty.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Hour 0 of the series is hour 0 of day 0 of week 0.
pub fn curtailment_stats(curtailed: &[f64], available: &[f64]) -> CurtailmentStats {
    assert_eq!(curtailed.len(), available.len(), "aligned series");
    let n = curtailed.len();
    let shares: Vec<f64> = curtailed
        .iter()
        .zip(available)
        .filter(|(_, &a)| a > 0.0)
        .map(|(&c, &a)| c / a)
        .collect();
    let weeks = n.div_ceil(HOURS_PER_WEEK);
    let mut sum = vec![vec![0.0; weeks]; 24];
    let mut count = vec![vec![0usize; weeks]; 24];
    for (t, &c) in curtailed.iter().enumerate() {
        sum[t % 24][t / HOURS_PER_WEEK] += c;
        count[t % 24][t / HOURS_PER_WEEK] += 1;
    }
    let heatmap = sum
        .iter()
        .zip(&count)
        .map(|(s, k)| s.iter().zip(k).map(|(s, &k)| if k == 0 { f64::NAN } else { s / k as f64 }).collect())
        .collect();
    let mut exceedance = curtailed.to_vec();
    exceedance.sort_by(|a, b| b.total_cmp(a));
    CurtailmentStats { median_mw: median(curtailed), median_share: median(&shares), heatmap, exceedance }
}

/// Total solar and wind curtailment and availability per hour, MW.
pub fn hourly_curtailment(result: &SimulationResult, net: &Network) -> (Vec<f64>, Vec<f64>) {
    let vre: Vec<usize> = (0..net.generators.len()).filter(|&g| net.generators[g].fuel.is_variable_renewable()).collect();
    (0..result.horizon_hours)
        .map(|t| {
            let avail: f64 = vre.iter().map(|&g| result.available[t][g]).sum();
            let used: f64 = vre.iter().map(|&g| result.dispatch[t][g]).sum();
            ((avail - used).max(0.0), avail)
        })
        .unzip()
}

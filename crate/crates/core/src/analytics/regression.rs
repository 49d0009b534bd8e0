use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::grid::{Interconnection, Network};
use crate::opf::SimulationResult;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    /// Constant first, then one per regressor.
    pub beta: Vec<f64>,
    pub r2: f64,
    pub residuals: Vec<f64>,
}

/// Least squares with a constant term, solved by Householder QR.
pub fn ols(y: &[f64], regressors: &[&[f64]]) -> Result<OlsFit, AnalyticsError> {
    let n = y.len();
    let p = regressors.len() + 1;
    for x in regressors {
        if x.len() != n {
            return Err(AnalyticsError::LengthMismatch(n, x.len()));
        }
    }
    if n < p.max(3) {
        return Err(AnalyticsError::TooFewPoints { needed: p.max(3), got: n });
    }
    // Column-major design matrix.
    let mut a: Vec<Vec<f64>> = std::iter::once(vec![1.0; n]).chain(regressors.iter().map(|x| x.to_vec())).collect();
    let mut b = y.to_vec();
    let scale = a.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);
    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale {
            return Err(AnalyticsError::Singular);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        for col in a.iter_mut().skip(k).chain(std::iter::once(&mut b)) {
            let dot: f64 = v.iter().zip(&col[k..]).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vv;
            for (c, x) in col[k..].iter_mut().zip(&v) {
                *c -= f * x;
            }
        }
    }
    let mut beta = vec![0.0; p];
    for k in (0..p).rev() {
        let s: f64 = (k + 1..p).map(|j| a[j][k] * beta[j]).sum();
        beta[k] = (b[k] - s) / a[k][k];
    }
    let residuals: Vec<f64> = (0..n)
        .map(|i| y[i] - beta[0] - regressors.iter().enumerate().map(|(j, x)| beta[j + 1] * x[i]).sum::<f64>())
        .collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    // A constant response carries no variance to explain.
    let r2 = if sst <= 1e-24 * (1.0 + mean * mean) * n as f64 { 0.0 } else { (1.0 - sse / sst).clamp(0.0, 1.0) };
    Ok(OlsFit { beta, r2, residuals })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub beta0: f64,
    pub beta_east: f64,
    pub beta_west: f64,
    pub r2: f64,
}

/// flow ~ b0 + b_east share_east + b_west share_west.
pub fn flow_share_regression(flow: &[f64], share_east: &[f64], share_west: &[f64]) -> Result<RegressionFit, AnalyticsError> {
    let fit = ols(flow, &[share_east, share_west])?;
    Ok(RegressionFit { beta0: fit.beta[0], beta_east: fit.beta[1], beta_west: fit.beta[2], r2: fit.r2 })
}

/// Hourly renewable dispatch in an interconnection over its own demand.
/// Hours without demand give 0.
pub fn renewable_share_series(result: &SimulationResult, net: &Network, ic: Interconnection) -> Vec<f64> {
    let gens: Vec<usize> = (0..net.generators.len())
        .filter(|&g| net.generators[g].fuel.is_renewable() && net.generator_interconnection(g) == ic)
        .collect();
    let buses: Vec<usize> = (0..net.buses.len()).filter(|&b| net.buses[b].interconnection == ic).collect();
    (0..result.horizon_hours)
        .map(|t| {
            let d: f64 = buses.iter().map(|&b| result.demand[t][b]).sum();
            let r: f64 = gens.iter().map(|&g| result.dispatch[t][g]).sum();
            if d > 0.0 {
                r / d
            } else {
                0.0
            }
        })
        .collect()
}

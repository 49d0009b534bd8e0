use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AnalyticsError, USD_PER_BUSD};
use crate::expansion::ExpansionPlan;
use crate::grid::{BranchKind, Fuel, Network};
use crate::scenario::DesignAdditions;

/// Unit costs in $ per MW or $ per MW-mile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostBook {
    pub solar_capex: f64,
    pub wind_capex: f64,
    pub ac_line_cost: f64,
    pub transformer_cost: f64,
    pub dc_line_cost: f64,
    pub dc_terminal_cost: f64,
    pub terminals_per_b2b: u32,
    /// State -> factor on generation, AC line and transformer costs.
    pub regional_multipliers: BTreeMap<String, f64>,
}

impl Default for CostBook {
    fn default() -> Self {
        CostBook {
            solar_capex: 1.085e6,
            wind_capex: 1.377e6,
            ac_line_cost: 1_900.0,
            transformer_cost: 20_000.0,
            dc_line_cost: 513.0,
            dc_terminal_cost: 135_000.0,
            terminals_per_b2b: 2,
            regional_multipliers: BTreeMap::new(),
        }
    }
}

impl CostBook {
    pub fn multiplier(&self, state: &str) -> f64 {
        self.regional_multipliers.get(state).copied().unwrap_or(1.0)
    }
}

/// Physical additions to be costed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InvestmentQuantities {
    pub wind_mw: BTreeMap<String, f64>,
    pub solar_mw: BTreeMap<String, f64>,
    pub ac_line_mw_miles: BTreeMap<String, f64>,
    pub transformer_mw: BTreeMap<String, f64>,
    pub design: DesignAdditions,
}

impl InvestmentQuantities {
    /// Solar and wind MW added between `base` and `built` per state, AC
    /// upgrades from `plan` located at each branch's from-bus, and the
    /// design's DC additions.
    pub fn from_run(base: &Network, built: &Network, plan: &ExpansionPlan, design: DesignAdditions) -> Self {
        let mut q = InvestmentQuantities { design, ..Default::default() };
        for (fuel, map) in [(Fuel::Wind, &mut q.wind_mw), (Fuel::Solar, &mut q.solar_mw)] {
            for (net, sign) in [(built, 1.0), (base, -1.0)] {
                for (gi, g) in net.generators.iter().enumerate().filter(|(_, g)| g.fuel == fuel) {
                    *map.entry(net.generator_state(gi).to_string()).or_default() += sign * g.capacity;
                }
            }
            map.retain(|_, v| {
                // Round-off from scaling must not read as a negative addition.
                if v.abs() < 1e-6 {
                    *v = 0.0;
                }
                *v != 0.0
            });
        }
        for u in &plan.upgrades {
            let Some(li) = built.branch_index(u.branch) else { continue };
            let b = &built.branches[li];
            let state = built.bus(b.from_bus).map(|x| x.state.clone()).unwrap_or_default();
            match b.kind {
                BranchKind::Line => *q.ac_line_mw_miles.entry(state).or_default() += u.added_mw_miles,
                BranchKind::Transformer => {
                    *q.transformer_mw.entry(state).or_default() += u.new_capacity_mw - u.old_capacity_mw
                }
            }
        }
        q
    }
}

/// $B per category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub wind: f64,
    pub solar: f64,
    pub ac_lines: f64,
    pub transformers: f64,
    pub dc_lines: f64,
    pub b2b: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.wind + self.solar + self.ac_lines + self.transformers + self.dc_lines + self.b2b
    }

    pub fn rows(&self) -> [(&'static str, f64); 7] {
        [
            ("wind", self.wind),
            ("solar", self.solar),
            ("ac_lines", self.ac_lines),
            ("transformers", self.transformers),
            ("dc_lines", self.dc_lines),
            ("b2b", self.b2b),
            ("total", self.total()),
        ]
    }
}

pub fn investment_cost(q: &InvestmentQuantities, book: &CostBook) -> Result<CostBreakdown, AnalyticsError> {
    let by_state = |what: &str, m: &BTreeMap<String, f64>, unit: f64| -> Result<f64, AnalyticsError> {
        let mut sum = 0.0;
        for (s, &v) in m {
            if !(v >= 0.0) {
                return Err(AnalyticsError::NegativeAddition { what: format!("{what} in {s}"), value: v });
            }
            sum += v * unit * book.multiplier(s);
        }
        Ok(sum / USD_PER_BUSD)
    };
    let d = &q.design;
    for (what, v) in [("B2B MW", d.b2b_upgrade_mw), ("DC line MW", d.dc_line_mw), ("DC line MW-miles", d.dc_line_mw_miles)] {
        if !(v >= 0.0) {
            return Err(AnalyticsError::NegativeAddition { what: what.into(), value: v });
        }
    }
    Ok(CostBreakdown {
        wind: by_state("wind MW", &q.wind_mw, book.wind_capex)?,
        solar: by_state("solar MW", &q.solar_mw, book.solar_capex)?,
        ac_lines: by_state("AC MW-miles", &q.ac_line_mw_miles, book.ac_line_cost)?,
        transformers: by_state("transformer MW", &q.transformer_mw, book.transformer_cost)?,
        dc_lines: (d.dc_line_mw_miles * book.dc_line_cost + d.dc_line_mw * book.dc_terminal_cost * 2.0) / USD_PER_BUSD,
        b2b: d.b2b_upgrade_mw * book.dc_terminal_cost * book.terminals_per_b2b as f64 / USD_PER_BUSD,
    })
}

/// Annual operating figures and investment of one scenario.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PaybackInputs {
    pub investment_busd: f64,
    pub fuel_busd_per_year: f64,
    pub co2_mmt_per_year: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payback {
    Years(f64),
    /// Savings are zero or negative.
    Never,
}

impl Payback {
    pub fn years(self) -> Option<f64> {
        match self {
            Payback::Years(y) => Some(y),
            Payback::Never => None,
        }
    }
}

/// Simple payback of the extra investment from fuel savings plus CO2 priced
/// at `carbon_price` $/t.
pub fn payback(baseline: &PaybackInputs, scenario: &PaybackInputs, carbon_price: f64) -> Result<Payback, AnalyticsError> {
    let di = scenario.investment_busd - baseline.investment_busd;
    if di < 0.0 {
        return Err(AnalyticsError::InvestmentBelowBaseline {
            baseline: baseline.investment_busd,
            scenario: scenario.investment_busd,
        });
    }
    if di == 0.0 {
        return Ok(Payback::Years(0.0));
    }
    let fuel = baseline.fuel_busd_per_year - scenario.fuel_busd_per_year;
    // MMmt x $/t = $M.
    let carbon = carbon_price * (baseline.co2_mmt_per_year - scenario.co2_mmt_per_year) * 1e-3;
    let savings = fuel + carbon;
    Ok(if savings > 0.0 { Payback::Years(di / savings) } else { Payback::Never })
}

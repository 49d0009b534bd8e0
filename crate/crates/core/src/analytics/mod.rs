//! Metrics over simulation results: generation mix, curtailment,
//! emissions, investment and payback, seam transfers, regression and
//! balance of payments.

mod costs;
mod curtailment;
mod emissions;
mod mix;
mod payments;
mod regression;
pub mod report;
mod seams;

use thiserror::Error;

use crate::grid::DcId;

pub use costs::{investment_cost, payback, CostBook, CostBreakdown, InvestmentQuantities, Payback, PaybackInputs};
pub use curtailment::{curtailment_stats, hourly_curtailment, median, CurtailmentStats, HOURS_PER_WEEK};
pub use emissions::{emissions, emissions_delta_map, EmissionTotals, Pollutants};
pub use mix::{generation_mix, GroupBy, MixRow};
pub use payments::{congestion_rent, payments, PaymentSplit, Payments};
pub use regression::{flow_share_regression, ols, renewable_share_series, OlsFit, RegressionFit};
pub use seams::{
    format_ratio, passthrough, seam_hourly_flow, seam_transfers, transfer_ratio, Hub, SeamFlow, SeamLedger,
};

pub(crate) const MWH_PER_TWH: f64 = 1e6;
pub(crate) const USD_PER_BUSD: f64 = 1e9;
pub(crate) const TONS_PER_MMT: f64 = 1e6;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("negative {what}: {value}")]
    NegativeAddition { what: String, value: f64 },
    #[error("scenario investment {scenario} $B is below baseline {baseline} $B")]
    InvestmentBelowBaseline { baseline: f64, scenario: f64 },
    #[error("state sets differ: {0}")]
    MismatchedStates(String),
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("regression needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("regressors are collinear")]
    Singular,
    #[error("hub needs exactly two designated DC elements, got {0}")]
    HubElements(usize),
    #[error("unknown DC element {0}")]
    UnknownDcElement(DcId),
}

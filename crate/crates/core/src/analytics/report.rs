//! Run directories and the analytics CSV bundle.
//!
//! A run directory holds `summary.json`, the full `result.json`, the
//! simulated network under `network/` and hourly `dispatch.csv`,
//! `flows.csv` and `lmp.csv`. A directory with only `summary.json` is
//! accepted for cost and payback reporting.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::*;
use crate::error::GridError;
use crate::grid::{load_network, save_network, DcKind, Interconnection, Network, Seam};
use crate::opf::SimulationResult;
use crate::scenario::PoolOutcome;
use crate::util::{sig6, write_atomic};

pub const HOURS_PER_YEAR: f64 = 8760.0;

pub const REPORT_FILES: [&str; 8] =
    ["mix.csv", "curtailment.csv", "emissions.csv", "costs.csv", "payback.csv", "seams.csv", "regression.csv", "payments.csv"];

pub const DEFAULT_CARBON_PRICES: [f64; 5] = [0.0, 25.0, 50.0, 75.0, 100.0];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Json { path: PathBuf, message: String },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error("horizons differ: {0}")]
    MismatchedHorizons(String),
    #[error("carbon prices given without a baseline run")]
    MissingBaseline,
    #[error("{0} has result.json but no network/ directory")]
    MissingNetwork(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io { path: path.to_path_buf(), source }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSummary {
    pub name: String,
    pub horizon_hours: usize,
    pub fuel_cost_usd: f64,
    pub objective_usd: f64,
    pub demand_twh: f64,
    pub shed_twh: f64,
    pub emissions: Pollutants,
    /// Annualized to 8,760 h, with the run's investment.
    pub annual: PaybackInputs,
    pub investment: CostBreakdown,
    pub goal_states: Vec<String>,
    pub pools: Vec<PoolOutcome>,
}

impl RunSummary {
    pub fn new(
        name: &str,
        net: &Network,
        result: &SimulationResult,
        investment: CostBreakdown,
        goal_states: Vec<String>,
        pools: Vec<PoolOutcome>,
    ) -> Self {
        let h = result.horizon_hours;
        let per_year = if h == 0 { 0.0 } else { HOURS_PER_YEAR / h as f64 };
        let e = emissions(result, net);
        RunSummary {
            name: name.to_string(),
            horizon_hours: h,
            fuel_cost_usd: result.fuel_cost,
            objective_usd: result.objective,
            demand_twh: (0..h).map(|t| result.total_demand(t)).sum::<f64>() / MWH_PER_TWH,
            shed_twh: result.total_shed_energy() / MWH_PER_TWH,
            emissions: e.total,
            annual: PaybackInputs {
                investment_busd: investment.total(),
                fuel_busd_per_year: result.fuel_cost / USD_PER_BUSD * per_year,
                co2_mmt_per_year: e.total.co2 * per_year,
            },
            investment,
            goal_states,
            pools,
        }
    }
}

pub struct RunData {
    pub dir: PathBuf,
    pub summary: RunSummary,
    pub detail: Option<(Network, SimulationResult)>,
}

struct Table {
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { rows: vec![header.iter().map(|s| s.to_string()).collect()] }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.write_record(r).expect("in-memory");
        }
        w.into_inner().expect("in-memory")
    }

    fn write(&self, path: &Path) -> Result<(), ReportError> {
        write_atomic(path, &self.bytes()).map_err(io_err(path))
    }
}

fn wide_table(first: &str, ids: Vec<String>, rows: &[Vec<f64>]) -> Table {
    let mut header = vec![first.to_string()];
    header.extend(ids);
    let mut t = Table { rows: vec![header] };
    for (h, r) in rows.iter().enumerate() {
        let mut row = vec![h.to_string()];
        row.extend(r.iter().map(|v| sig6(*v)));
        t.push(row);
    }
    t
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ReportError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    write_atomic(path, text.as_bytes()).map_err(io_err(path))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ReportError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| ReportError::Json { path: path.to_path_buf(), message: e.to_string() })
}

/// Writes every artifact of one simulated run into `dir`.
pub fn write_run(dir: &Path, summary: &RunSummary, net: &Network, result: &SimulationResult) -> Result<(), ReportError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    save_network(dir.join("network"), net, result.horizon_hours)?;
    write_json(&dir.join("result.json"), result)?;
    let ids = |p: &str, v: Vec<String>| v.into_iter().map(|s| format!("{p}{s}")).collect::<Vec<_>>();
    wide_table("hour", ids("g", result.generator_ids.iter().map(|i| i.to_string()).collect()), &result.dispatch)
        .write(&dir.join("dispatch.csv"))?;
    let flows: Vec<Vec<f64>> =
        result.flow.iter().zip(&result.dc_flow).map(|(a, d)| a.iter().chain(d).copied().collect()).collect();
    let mut flow_ids = ids("l", result.branch_ids.iter().map(|i| i.to_string()).collect());
    flow_ids.extend(ids("dc", result.dc_ids.iter().map(|i| i.to_string()).collect()));
    wide_table("hour", flow_ids, &flows).write(&dir.join("flows.csv"))?;
    wide_table("hour", ids("b", result.bus_ids.iter().map(|i| i.to_string()).collect()), &result.lmp)
        .write(&dir.join("lmp.csv"))?;
    write_json(&dir.join("summary.json"), summary)
}

pub fn load_run(dir: &Path) -> Result<RunData, ReportError> {
    let summary: RunSummary = read_json(&dir.join("summary.json"))?;
    let result_path = dir.join("result.json");
    let detail = if result_path.is_file() {
        let net_dir = dir.join("network");
        if !net_dir.is_dir() {
            return Err(ReportError::MissingNetwork(dir.to_path_buf()));
        }
        let net = load_network(&net_dir)?;
        let result: SimulationResult = read_json(&result_path)?;
        if !result.matches(&net) {
            return Err(ReportError::Json {
                path: result_path,
                message: "result does not match network/ tables".into(),
            });
        }
        Some((net, result))
    } else {
        None
    };
    Ok(RunData { dir: dir.to_path_buf(), summary, detail })
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub horizon_hours: usize,
    pub mix: Vec<MixRow>,
    pub curtailment_median_mw: Option<f64>,
    pub curtailment_median_share: Option<f64>,
    pub emissions: Option<EmissionTotals>,
    pub emissions_delta: Option<BTreeMap<String, Pollutants>>,
    pub investment: CostBreakdown,
    pub payback: Vec<(f64, Payback)>,
    pub seams: Option<SeamLedger>,
    pub passthrough_capacity_factor: Option<f64>,
    pub regression: Option<RegressionFit>,
    pub payments: Option<Payments>,
    pub congestion_rent_busd: Option<f64>,
    pub pools: Vec<PoolOutcome>,
}

/// The two cross-seam DC lines touching ERCOT, when there are exactly two.
pub fn ercot_hub(net: &Network) -> Option<Hub> {
    let buses: Vec<_> = net.buses.iter().filter(|b| b.interconnection == Interconnection::Ercot).map(|b| b.id).collect();
    let elements: Vec<_> = net
        .dc_elements
        .iter()
        .filter(|d| d.kind == DcKind::Line && matches!(d.seam, Seam::EastErcot | Seam::WestErcot))
        .map(|d| d.id)
        .collect();
    (elements.len() == 2 && !buses.is_empty()).then_some(Hub { buses, elements })
}

fn check_horizons(runs: &[&RunData]) -> Result<(), ReportError> {
    let hs: BTreeSet<usize> = runs.iter().map(|r| r.summary.horizon_hours).collect();
    if hs.len() > 1 {
        let list = runs.iter().map(|r| format!("{}={}", r.summary.name, r.summary.horizon_hours)).collect::<Vec<_>>();
        return Err(ReportError::MismatchedHorizons(list.join(", ")));
    }
    for r in runs {
        if let Some((_, res)) = &r.detail {
            if res.horizon_hours != r.summary.horizon_hours {
                return Err(ReportError::MismatchedHorizons(format!(
                    "{}: summary {} vs result {}",
                    r.dir.display(),
                    r.summary.horizon_hours,
                    res.horizon_hours
                )));
            }
        }
    }
    Ok(())
}

/// Writes the eight analytics tables and one `<name>.summary.json` per run.
/// Payback and emission deltas need `baseline`.
pub fn write_report(
    out: &Path,
    runs: &[RunData],
    baseline: Option<&RunData>,
    carbon_prices: &[f64],
) -> Result<Vec<ScenarioReport>, ReportError> {
    let mut all: Vec<&RunData> = runs.iter().collect();
    all.extend(baseline);
    check_horizons(&all)?;
    std::fs::create_dir_all(out).map_err(io_err(out))?;

    let mut mix = Table::new(&["scenario", "grouping", "group", "generation_twh", "available_twh", "curtailment_twh"]);
    let mut curt = Table::new(&["scenario", "statistic", "hour_of_day", "week", "rank", "value"]);
    let mut emis = Table::new(&["scenario", "scope", "key", "co2_mmt", "nox_mmt", "so2_mmt"]);
    let mut costs = Table::new(&["scenario", "category", "cost_busd"]);
    let mut pay = Table::new(&["scenario", "baseline", "carbon_price_usd_per_t", "payback_years"]);
    let mut seams = Table::new(&[
        "scenario",
        "seam",
        "elements",
        "capacity_mw",
        "forward_twh",
        "reverse_twh",
        "ratio",
        "ratio_label",
        "capacity_factor",
    ]);
    let mut reg = Table::new(&["scenario", "seam", "points", "beta0_gw", "beta_east_gw", "beta_west_gw", "r2", "note"]);
    let mut pmt =
        Table::new(&["scenario", "group", "consumer_busd", "generator_busd", "surplus_busd", "congestion_rent_busd"]);

    let base_emissions = baseline.and_then(|b| b.detail.as_ref()).map(|(n, r)| emissions(r, n));
    let mut reports = Vec::new();
    for run in runs {
        let s = &run.summary;
        let name = s.name.clone();
        let mut rep = ScenarioReport {
            name: name.clone(),
            horizon_hours: s.horizon_hours,
            investment: s.investment,
            pools: s.pools.clone(),
            ..Default::default()
        };
        for (cat, v) in s.investment.rows() {
            costs.push(vec![name.clone(), cat.into(), sig6(v)]);
        }
        if let Some(b) = baseline {
            for &p in carbon_prices {
                let pb = payback(&b.summary.annual, &s.annual, p)?;
                pay.push(vec![name.clone(), b.summary.name.clone(), sig6(p), pb.years().map(sig6).unwrap_or_else(|| "never".into())]);
                rep.payback.push((p, pb));
            }
        }
        if let Some((net, res)) = &run.detail {
            for g in GroupBy::ALL {
                for m in generation_mix(res, net, g) {
                    mix.push(vec![
                        name.clone(),
                        g.as_str().into(),
                        m.group.clone(),
                        sig6(m.generation_twh),
                        sig6(m.available_twh),
                        sig6(m.curtailment_twh),
                    ]);
                }
            }
            rep.mix = generation_mix(res, net, GroupBy::Fuel);

            let (c, a) = hourly_curtailment(res, net);
            let cs = curtailment_stats(&c, &a);
            let e = String::new;
            curt.push(vec![name.clone(), "median_mw".into(), e(), e(), e(), sig6(cs.median_mw)]);
            curt.push(vec![name.clone(), "median_share".into(), e(), e(), e(), sig6(cs.median_share)]);
            for (hod, row) in cs.heatmap.iter().enumerate() {
                for (w, v) in row.iter().enumerate() {
                    curt.push(vec![name.clone(), "heatmap_mean_mw".into(), hod.to_string(), w.to_string(), e(), sig6(*v)]);
                }
            }
            for (rank, v) in cs.exceedance.iter().enumerate() {
                curt.push(vec![name.clone(), "exceedance_mw".into(), e(), e(), rank.to_string(), sig6(*v)]);
            }
            rep.curtailment_median_mw = Some(cs.median_mw);
            rep.curtailment_median_share = Some(cs.median_share);

            let em = emissions(res, net);
            let prow = |scope: &str, key: String, p: &Pollutants| {
                vec![name.clone(), scope.into(), key, sig6(p.co2), sig6(p.nox), sig6(p.so2)]
            };
            emis.push(prow("total", "all".into(), &em.total));
            for (k, p) in &em.by_state {
                emis.push(prow("state", k.clone(), p));
            }
            for (k, p) in &em.by_fuel {
                emis.push(prow("fuel", k.to_string(), p));
            }
            if let Some(be) = &base_emissions {
                let delta = emissions_delta_map(be, &em)?;
                for (k, p) in &delta {
                    emis.push(prow("delta_state", k.clone(), p));
                }
                emis.push(prow("delta_total", "all".into(), &em.total.minus(be.total)));
                rep.emissions_delta = Some(delta);
            }
            rep.emissions = Some(em);

            let ledger = seam_transfers(res, net);
            for f in &ledger.seams {
                seams.push(vec![
                    name.clone(),
                    f.seam.to_string(),
                    f.elements.to_string(),
                    sig6(f.capacity_mw),
                    sig6(f.forward_twh),
                    sig6(f.reverse_twh),
                    sig6(f.ratio()),
                    format_ratio(f.forward_twh, f.reverse_twh),
                    sig6(f.capacity_factor),
                ]);
            }
            if !ledger.seams.is_empty() {
                let cap: f64 = ledger.seams.iter().map(|f| f.capacity_mw).sum();
                let (fw, rv): (f64, f64) = ledger.seams.iter().map(|f| (f.forward_twh, f.reverse_twh)).fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
                let n: usize = ledger.seams.iter().map(|f| f.elements).sum();
                seams.push(vec![
                    name.clone(),
                    "all".into(),
                    n.to_string(),
                    sig6(cap),
                    sig6(fw),
                    sig6(rv),
                    String::new(),
                    String::new(),
                    sig6(ledger.overall_capacity_factor),
                ]);
            }
            if let Some(hub) = ercot_hub(net) {
                let pt = passthrough(res, net, &hub)?;
                let cap = hub
                    .elements
                    .iter()
                    .map(|id| net.dc_elements[net.dc_index(*id).expect("hub element")].capacity)
                    .fold(f64::INFINITY, f64::min);
                let moved: f64 = pt.iter().map(|v| v.abs()).sum();
                let cf = if cap > 0.0 && res.horizon_hours > 0 { moved / (cap * res.horizon_hours as f64) } else { 0.0 };
                let fw: f64 = pt.iter().map(|v| v.max(0.0)).sum::<f64>() / MWH_PER_TWH;
                let rv: f64 = pt.iter().map(|v| (-v).max(0.0)).sum::<f64>() / MWH_PER_TWH;
                seams.push(vec![
                    name.clone(),
                    "ERCOT pass-through".into(),
                    "2".into(),
                    sig6(cap),
                    sig6(fw),
                    sig6(rv),
                    sig6(transfer_ratio(fw, rv)),
                    format_ratio(fw, rv),
                    sig6(cf),
                ]);
                rep.passthrough_capacity_factor = Some(cf);
            }
            if ledger.seams.iter().any(|f| f.seam == Seam::EastWest) {
                let flow: Vec<f64> = seam_hourly_flow(res, net, Seam::EastWest).iter().map(|v| v / 1e3).collect();
                let east = renewable_share_series(res, net, Interconnection::Eastern);
                let west = renewable_share_series(res, net, Interconnection::Western);
                let mut row = vec![name.clone(), Seam::EastWest.to_string(), flow.len().to_string()];
                match flow_share_regression(&flow, &east, &west) {
                    Ok(f) => {
                        row.extend([sig6(f.beta0), sig6(f.beta_east), sig6(f.beta_west), sig6(f.r2), String::new()]);
                        rep.regression = Some(f);
                    }
                    Err(err) => row.extend([String::new(), String::new(), String::new(), String::new(), err.to_string()]),
                }
                reg.push(row);
            }
            rep.seams = Some(ledger);

            let goal_states: BTreeSet<String> = s.goal_states.iter().cloned().collect();
            let p = payments(res, net, &goal_states);
            let rent = congestion_rent(res, net);
            let e = String::new;
            for (group, split) in [("with_goals", p.with_goals), ("without_goals", p.without_goals)] {
                pmt.push(vec![name.clone(), group.into(), sig6(split.consumer), sig6(split.generator), sig6(split.consumer - split.generator), e()]);
            }
            pmt.push(vec![name.clone(), "total".into(), sig6(p.consumer), sig6(p.generator), sig6(p.surplus), sig6(rent)]);
            rep.payments = Some(p);
            rep.congestion_rent_busd = Some(rent);
        } else {
            log::warn!("{}: no result.json; only costs and payback are reported", run.dir.display());
        }
        write_json(&out.join(format!("{}.summary.json", file_stem(&name))), &rep)?;
        reports.push(rep);
    }

    for (file, t) in REPORT_FILES.iter().zip([&mix, &curt, &emis, &costs, &pay, &seams, &reg, &pmt]) {
        t.write(&out.join(file))?;
    }
    Ok(reports)
}

fn file_stem(name: &str) -> String {
    let s: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
    if s.is_empty() {
        "scenario".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::testnet::*;
    use crate::opf::{simulate_horizon, WindowOptions};

    fn run(dir: &Path, name: &str, hours: usize) -> RunData {
        let net = two_bus_congested();
        let res = simulate_horizon(&net, &constant_profiles(&net, hours, &[(1, 50.0)], 1.0), &WindowOptions::default()).unwrap();
        let s = RunSummary::new(name, &net, &res, CostBreakdown::default(), vec!["AA".into()], vec![]);
        write_run(dir, &s, &net, &res).unwrap();
        load_run(dir).unwrap()
    }

    #[test]
    fn round_trip_and_bundle() {
        let tmp = tempfile::tempdir().unwrap();
        let r = run(&tmp.path().join("a"), "a", 6);
        let (net, res) = r.detail.as_ref().unwrap();
        assert_eq!(net, &two_bus_congested());
        assert_eq!(res.dispatch[0], vec![30.0, 20.0]);
        let out = tmp.path().join("report");
        let reps = write_report(&out, std::slice::from_ref(&r), None, &[]).unwrap();
        for f in REPORT_FILES {
            assert!(out.join(f).is_file(), "{f}");
        }
        assert!(out.join("a.summary.json").is_file());
        let p = reps[0].payments.unwrap();
        assert!((p.surplus - reps[0].congestion_rent_busd.unwrap()).abs() < 1e-15);
        let mix = std::fs::read_to_string(out.join("mix.csv")).unwrap();
        assert!(mix.starts_with("scenario,grouping,group,generation_twh"));
        assert!(mix.contains("a,fuel,coal,0.00018,0,0"), "{mix}");
    }

    #[test]
    fn summary_only_payback_and_horizon_mismatch() {
        let tmp = tempfile::tempdir().unwrap();
        let mk = |name: &str, inv: f64, fuel: f64, co2: f64| RunData {
            dir: tmp.path().join(name),
            summary: RunSummary {
                name: name.into(),
                horizon_hours: 8784,
                annual: PaybackInputs { investment_busd: inv, fuel_busd_per_year: fuel, co2_mmt_per_year: co2 },
                ..Default::default()
            },
            detail: None,
        };
        let base = mk("current", 359.0, 102.91, 1729.5);
        let d1 = mk("design1", 1539.0, 54.74, 997.5);
        let reps = write_report(&tmp.path().join("out"), &[d1], Some(&base), &[0.0, 100.0]).unwrap();
        assert!((reps[0].payback[0].1.years().unwrap() - 24.5).abs() < 0.05);
        assert!((reps[0].payback[1].1.years().unwrap() - 9.7).abs() < 0.05);
        let text = std::fs::read_to_string(tmp.path().join("out/payback.csv")).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "design1,current,0,24.4966");

        let a = run(&tmp.path().join("a"), "a", 6);
        let b = run(&tmp.path().join("b"), "b", 8);
        assert!(matches!(write_report(&tmp.path().join("x"), &[a, b], None, &[]), Err(ReportError::MismatchedHorizons(_))));
    }
}

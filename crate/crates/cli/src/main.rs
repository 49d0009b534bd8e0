//! `macrogrid`: validate datasets, simulate scenarios, expand transmission
//! toward state goals and write the analytics bundle.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;

use macrogrid::analytics::report::{load_run, write_report, write_run, RunSummary, DEFAULT_CARBON_PRICES};
use macrogrid::analytics::{investment_cost, CostBook, InvestmentQuantities};
use macrogrid::expansion::{expand_until_goal, ExpansionError, ExpansionParams, ExpansionPlan};
use macrogrid::grid::{load_network, load_profiles, save_dataset, Network, Violation};
use macrogrid::opf::{SimulationResult, Simulator, WindowOptions};
use macrogrid::scenario::{build_scenario, goal_accounting, load_scenario, Scenario, ScenarioSpec};
use macrogrid::util::write_atomic;
use macrogrid::GridError;

/// Exit status when the goals are still unmet after `--max-iterations`.
const EXIT_UNMET: u8 = 2;
/// Exit status when no branch qualifies for an upgrade while goals are unmet.
const EXIT_STALLED: u8 = 3;

#[derive(Parser)]
#[command(name = "macrogrid", version, about = "Production-cost and transmission-expansion runs on CSV grid datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a dataset; exit 1 and list every violation if it is not clean.
    Validate {
        #[arg(long)]
        dataset: PathBuf,
        /// Also write validation.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the rolling-horizon OPF for a scenario and write hourly results.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Write each window's LP in CPLEX LP format under <out>/lp.
        #[arg(long)]
        export_lp: bool,
    },
    /// Upgrade congested AC branches until every goal pool is met.
    Expand {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = ExpansionParams::default().max_iterations)]
        max_iterations: usize,
        #[arg(long, default_value_t = ExpansionParams::default().alpha)]
        alpha: f64,
        #[arg(long, default_value_t = ExpansionParams::default().top_k)]
        top_k: usize,
    },
    /// Build the analytics tables from one or more run directories.
    Report {
        /// Run directories written by `simulate` or `expand`.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Run to compare against for payback and emission deltas.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// $/ton; repeatable. Defaults to 0, 25, 50, 75 and 100 with a baseline.
        #[arg(long = "carbon-price")]
        carbon_prices: Vec<f64>,
    },
    /// Write a bundled synthetic dataset (3bus, bottleneck or mini-us).
    Fixture {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = macrogrid::fixtures::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Scenario JSON; without one the dataset runs as is.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Window length in hours.
    #[arg(long, default_value_t = WindowOptions::default().window_hours)]
    windows: usize,
    #[arg(long, default_value_t = WindowOptions::default().shed_penalty)]
    shed_penalty: f64,
}

impl RunArgs {
    fn options(&self) -> WindowOptions {
        WindowOptions { window_hours: self.windows, shed_penalty: self.shed_penalty, ..WindowOptions::default() }
    }
}

#[derive(Serialize)]
struct ValidationReport<'a> {
    dataset: &'a Path,
    clean: bool,
    violations: Vec<Violation>,
}

fn validate(dataset: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let mut violations = Vec::new();
    match load_network(dataset) {
        Ok(net) => match load_profiles(dataset, &net) {
            Ok(_) => {}
            Err(GridError::Invalid(v)) => violations.extend(v),
            Err(e) => return Err(e.into()),
        },
        Err(GridError::Invalid(v)) => violations.extend(v),
        Err(e) => return Err(e.into()),
    }
    let report = ValidationReport { dataset, clean: violations.is_empty(), violations };
    if report.clean {
        println!("{}: ok", dataset.display());
    } else {
        println!("{}: {} violation(s)", dataset.display(), report.violations.len());
        for v in &report.violations {
            println!("  - {v}");
        }
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join("validation.json");
        write_atomic(&path, serde_json::to_string_pretty(&report)?.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if report.clean { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn load_inputs(run: &RunArgs) -> Result<(Network, Scenario)> {
    let net = load_network(&run.dataset).with_context(|| format!("loading {}", run.dataset.display()))?;
    let profiles = load_profiles(&run.dataset, &net).with_context(|| format!("loading {}", run.dataset.display()))?;
    let spec = match &run.scenario {
        Some(path) => load_scenario(path).with_context(|| format!("reading scenario {}", path.display()))?,
        None => ScenarioSpec::baseline(&net.name),
    };
    let scenario = build_scenario(&net, &profiles, &spec).context("building scenario")?;
    Ok((net, scenario))
}

fn write_outputs(
    out: &Path,
    base: &Network,
    scenario: &Scenario,
    built: &Network,
    plan: &ExpansionPlan,
    result: &SimulationResult,
) -> Result<()> {
    let quantities = InvestmentQuantities::from_run(base, built, plan, scenario.additions);
    let investment = investment_cost(&quantities, &CostBook::default())?;
    let pools = goal_accounting(result, built, &scenario.goals);
    let goal_states: Vec<String> = scenario.goals.states.keys().cloned().collect();
    let summary = RunSummary::new(&scenario.name, built, result, investment, goal_states, pools);
    write_run(out, &summary, built, result)?;
    Ok(())
}

fn simulate(run: &RunArgs, export_lp: bool) -> Result<ExitCode> {
    let (base, scenario) = load_inputs(run)?;
    let mut sim = Simulator::new(run.options());
    if export_lp {
        sim = sim.with_export_dir(run.out.join("lp"));
    }
    let result = sim.simulate(&scenario.network, &scenario.profiles)?;
    info!("simulated {} hours, fuel cost {:.6e}", result.horizon_hours, result.fuel_cost);
    write_outputs(&run.out, &base, &scenario, &scenario.network, &ExpansionPlan::default(), &result)?;
    println!("wrote {}", run.out.display());
    Ok(ExitCode::SUCCESS)
}

fn print_pools(plan: &ExpansionPlan) {
    if let Some(last) = plan.iterations.last() {
        for p in &last.pools {
            println!(
                "  pool [{}]: delivered {:.6} TWh of {:.6} TWh target ({})",
                p.states.join(","),
                p.delivered_twh,
                p.target_twh,
                if p.met { "met" } else { "unmet" }
            );
        }
    }
}

fn expand(run: &RunArgs, params: &ExpansionParams) -> Result<ExitCode> {
    let (base, scenario) = load_inputs(run)?;
    if scenario.goals.states.is_empty() {
        bail!("scenario has no goals to expand toward");
    }
    std::fs::create_dir_all(&run.out).with_context(|| format!("creating {}", run.out.display()))?;
    match expand_until_goal(&scenario.network, &scenario.profiles, &scenario.goals, params, &run.options()) {
        Ok(outcome) => {
            let plan = &outcome.plan;
            plan.write(&run.out).with_context(|| format!("writing plan to {}", run.out.display()))?;
            save_dataset(run.out.join("dataset"), &outcome.network, &scenario.profiles)?;
            write_outputs(&run.out, &base, &scenario, &outcome.network, plan, &outcome.result)?;
            println!(
                "{} upgrade(s), {:.6} TW-miles added over {} simulation(s)",
                plan.upgrades.len(),
                plan.total_mw_miles() / 1e6,
                plan.iterations.len()
            );
            print_pools(plan);
            if plan.met() {
                println!("goals met");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("goals unmet after {} iteration(s) (max-iterations {})", plan.iterations.len(), params.max_iterations);
                Ok(ExitCode::from(EXIT_UNMET))
            }
        }
        Err(ExpansionError::Stalled { iteration, plan }) => {
            plan.write(&run.out).with_context(|| format!("writing plan to {}", run.out.display()))?;
            print_pools(&plan);
            eprintln!("stalled at iteration {iteration}: goals unmet and no congested branch qualifies for an upgrade");
            Ok(ExitCode::from(EXIT_STALLED))
        }
        Err(e) => Err(e.into()),
    }
}

fn report(runs: &[PathBuf], out: &Path, baseline: Option<&Path>, carbon_prices: &[f64]) -> Result<ExitCode> {
    if baseline.is_none() && !carbon_prices.is_empty() {
        bail!("--carbon-price needs --baseline: payback compares a run against a baseline");
    }
    let data = runs
        .iter()
        .map(|d| load_run(d).with_context(|| format!("loading run {}", d.display())))
        .collect::<Result<Vec<_>>>()?;
    let base = baseline.map(|d| load_run(d).with_context(|| format!("loading baseline {}", d.display()))).transpose()?;
    let mut horizons = data.iter().chain(&base).map(|r| (r.summary.horizon_hours, r.dir.display().to_string()));
    if let Some((h0, d0)) = horizons.next() {
        if let Some((h, d)) = horizons.find(|(h, _)| *h != h0) {
            bail!("horizons differ: {d0} has {h0} h, {d} has {h} h");
        }
    }
    let prices: Vec<f64> = if carbon_prices.is_empty() { DEFAULT_CARBON_PRICES.to_vec() } else { carbon_prices.to_vec() };
    let names: BTreeSet<&str> = data.iter().map(|r| r.summary.name.as_str()).collect();
    if names.len() != data.len() {
        bail!("run names must be distinct");
    }
    write_report(out, &data, base.as_ref(), &prices)?;
    println!("wrote {} run(s) to {}", data.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { dataset, out } => validate(&dataset, out.as_deref()),
        Command::Simulate { run, export_lp } => simulate(&run, export_lp),
        Command::Expand { run, max_iterations, alpha, top_k } => {
            let params = ExpansionParams { max_iterations, alpha, top_k, ..ExpansionParams::default() };
            expand(&run, &params)
        }
        Command::Report { runs, out, baseline, carbon_prices } => {
            report(&runs, &out, baseline.as_deref(), &carbon_prices)
        }
        Command::Fixture { name, out, seed } => {
            macrogrid::fixtures::write_fixture(&name, &out, seed)?;
            println!("wrote {name} to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MACROGRID_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

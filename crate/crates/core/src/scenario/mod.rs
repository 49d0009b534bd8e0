//! Target-year scenario construction: fleet changes, demand growth,
//! proportional renewable buildout, goals and Macro Grid designs.

mod demand;
mod design;
mod fleet;
mod goals;
mod renewables;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::GridError;
use crate::grid::{BusId, Fuel, GenId, Network, ProfileSet, ZoneId};

pub use demand::scale_demand;
pub use design::{apply_macrogrid_design, B2bUpgrade, DcRef, DesignAdditions, DesignName, MacroGridDesign, NewDcLine};
pub use fleet::{apply_fleet_changes, fleet_profiles, CapacityScale, FleetChangeSet, GeneratorAddition};
pub use goals::{goal_accounting, GoalKind, GoalSpec, PoolOutcome};
pub use renewables::{add_renewables_proportional, StateTarget};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown generator {0}")]
    UnknownGenerator(GenId),
    #[error("unknown bus {0}")]
    UnknownBus(BusId),
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("unknown zone {0}")]
    UnknownZone(ZoneId),
    #[error("scale factor {factor} for {state}/{fuel} must be finite and >= 0")]
    InvalidScale { state: String, fuel: Fuel, factor: f64 },
    #[error("{fuel} target {mw} MW for {state} must be finite and >= 0")]
    InvalidTarget { state: String, fuel: Fuel, mw: f64 },
    #[error("{state} has no existing {fuel} capacity to scale; site new plants explicitly as fleet additions")]
    NoExistingCapacity { state: String, fuel: Fuel },
    #[error("design would lower {element} from {old} MW to {new} MW")]
    Downgrade { element: String, old: f64, new: f64 },
    #[error("unknown DC element {0}")]
    UnknownDcElement(String),
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("profiled addition {0} needs a profile_source with an availability series")]
    MissingProfileSource(GenId),
    #[error("invalid goals: {0}")]
    InvalidGoals(String),
    #[error("target year {target} precedes base year {base}")]
    InvalidYears { base: u32, target: u32 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Marker for budgets left to the expansion loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveByExpansion {
    #[serde(rename = "solve-by-expansion")]
    SolveByExpansion,
}

/// Either explicit per-state MW additions or `"solve-by-expansion"`, which
/// adds no renewables and leaves goal attainment to transmission upgrades.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RenewableBudget {
    Deferred(SolveByExpansion),
    Targets(BTreeMap<String, StateTarget>),
}

impl Default for RenewableBudget {
    fn default() -> Self {
        RenewableBudget::Targets(BTreeMap::new())
    }
}

fn default_base_year() -> u32 {
    2020
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default = "default_base_year")]
    pub base_year: u32,
    pub target_year: u32,
    #[serde(default)]
    pub fleet_changes: FleetChangeSet,
    /// Zone id -> annual growth rate replacing the dataset value.
    #[serde(default)]
    pub demand_growth: BTreeMap<ZoneId, f64>,
    #[serde(default)]
    pub renewables: RenewableBudget,
    #[serde(default)]
    pub goals: GoalSpec,
    #[serde(default)]
    pub design: Option<MacroGridDesign>,
    /// Design document path, relative to the scenario file. Ignored when
    /// `design` is given inline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_file: Option<PathBuf>,
}

impl ScenarioSpec {
    /// The base-year system unchanged.
    pub fn baseline(name: &str) -> Self {
        ScenarioSpec {
            name: name.to_string(),
            base_year: default_base_year(),
            target_year: default_base_year(),
            fleet_changes: FleetChangeSet::default(),
            demand_growth: BTreeMap::new(),
            renewables: RenewableBudget::default(),
            goals: GoalSpec::default(),
            design: None,
            design_file: None,
        }
    }
}

/// A built scenario ready to simulate.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub network: Network,
    pub profiles: ProfileSet,
    pub goals: GoalSpec,
    pub additions: DesignAdditions,
}

/// Reads a scenario document and resolves `design_file`.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioSpec, ScenarioError> {
    let path = path.as_ref();
    let mut spec: ScenarioSpec = read_json(path)?;
    if spec.design.is_none() {
        if let Some(rel) = spec.design_file.take() {
            let full = path.parent().unwrap_or(Path::new(".")).join(rel);
            spec.design = Some(read_json(&full)?);
        }
    }
    Ok(spec)
}

pub fn load_design(path: impl AsRef<Path>) -> Result<MacroGridDesign, ScenarioError> {
    read_json(path.as_ref())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| GridError::Io { path: path.to_path_buf(), source: e })?;
    serde_json::from_str(&text).map_err(|e| {
        ScenarioError::Grid(GridError::Json {
            file: path.to_path_buf(),
            message: format!("line {} column {}: {e}", e.line(), e.column()),
        })
    })
}

/// Growth overrides, fleet changes, demand scaling, renewable buildout and
/// the design, in that order. Goals are checked against the result.
pub fn build_scenario(net: &Network, profiles: &ProfileSet, spec: &ScenarioSpec) -> Result<Scenario, ScenarioError> {
    if spec.target_year < spec.base_year {
        return Err(ScenarioError::InvalidYears { base: spec.base_year, target: spec.target_year });
    }
    let mut zones = net.zones.clone();
    for (id, g) in &spec.demand_growth {
        let z = zones.iter_mut().find(|z| z.id == *id).ok_or(ScenarioError::UnknownZone(*id))?;
        z.demand_growth = *g;
    }
    let grown = net.with_zones(zones)?;
    let fleet = apply_fleet_changes(&grown, &spec.fleet_changes)?;
    let prof = fleet_profiles(profiles, &fleet, &spec.fleet_changes)?;
    let prof = scale_demand(&prof, &fleet, spec.target_year - spec.base_year);
    let built = match &spec.renewables {
        RenewableBudget::Targets(t) => add_renewables_proportional(&fleet, t)?,
        RenewableBudget::Deferred(_) => fleet,
    };
    let (network, additions) = match &spec.design {
        Some(d) => (apply_macrogrid_design(&built, d)?, d.additions(&built)?),
        None => (built, DesignAdditions::default()),
    };
    spec.goals.validate(&network)?;
    let bad = prof.validate(&network);
    if !bad.is_empty() {
        return Err(GridError::Invalid(bad).into());
    }
    Ok(Scenario { name: spec.name.clone(), network, profiles: prof, goals: spec.goals.clone(), additions })
}

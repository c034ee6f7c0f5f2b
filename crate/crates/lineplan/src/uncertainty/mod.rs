//! Demand uncertainty: scenario sets over OD demand, robust model building,
//! worst-case and expected-value evaluation, and multi-period (seasonal)
//! planning with similarity coupling.

mod eval;
mod multiperiod;
mod robust;

pub use eval::{
    expected_eval, worst_case_eval, EvalConfig, ExpectedReport, ScenarioEval, WorstCaseReport,
};
pub use multiperiod::{build_multiperiod_model, decode_multiperiod, Season};
pub use robust::robust_cost_model_box;

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::network::{Instance, StationId};

/// Worst-case enumeration refuses more uncertain pairs than this.
pub const MAX_UNCERTAIN_PAIRS: usize = 20;

/// One demand outcome: values for the OD pairs it mentions. Pairs that are
/// not listed keep their nominal demand from the instance.
pub type DemandScenario = BTreeMap<(StationId, StationId), f64>;

/// An uncertainty set over OD demand.
#[derive(Debug, Clone, PartialEq)]
pub enum DemandUncertainty {
    /// Finitely many explicit scenarios, optionally with probabilities.
    Discrete {
        scenarios: Vec<DemandScenario>,
        probabilities: Option<Vec<f64>>,
    },
    /// An independent demand interval per uncertain OD pair.
    Box {
        bounds: BTreeMap<(StationId, StationId), (f64, f64)>,
    },
    /// Box intervals plus a budget capping the total demand the uncertain
    /// pairs may realize simultaneously.
    Gamma {
        bounds: BTreeMap<(StationId, StationId), (f64, f64)>,
        budget: f64,
    },
}

impl DemandUncertainty {
    /// Checks the structural invariants of the set.
    pub fn validate(&self) -> Result<()> {
        match self {
            DemandUncertainty::Discrete {
                scenarios,
                probabilities,
            } => {
                if scenarios.is_empty() {
                    return Err(Error::Validation(
                        "discrete uncertainty set has no scenarios".into(),
                    ));
                }
                for scenario in scenarios {
                    for (&(s, t), &v) in scenario {
                        if !(v.is_finite() && v >= 0.0) {
                            return Err(Error::Validation(format!(
                                "scenario demand for pair ({}, {}) must be non-negative, got {v}",
                                s.0, t.0
                            )));
                        }
                    }
                }
                if let Some(p) = probabilities {
                    if p.len() != scenarios.len() {
                        return Err(Error::Validation(format!(
                            "{} probabilities for {} scenarios",
                            p.len(),
                            scenarios.len()
                        )));
                    }
                    if p.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
                        return Err(Error::Validation(
                            "scenario probabilities must be non-negative".into(),
                        ));
                    }
                    let sum: f64 = p.iter().sum();
                    if (sum - 1.0).abs() > 1e-9 {
                        return Err(Error::Validation(format!(
                            "scenario probabilities sum to {sum}, expected 1"
                        )));
                    }
                }
                Ok(())
            }
            DemandUncertainty::Box { bounds } => validate_bounds(bounds),
            DemandUncertainty::Gamma { bounds, budget } => {
                validate_bounds(bounds)?;
                if !budget.is_finite() {
                    return Err(Error::Validation(format!(
                        "demand budget must be finite, got {budget}"
                    )));
                }
                let floor: f64 = bounds.values().map(|&(lo, _)| lo).sum();
                if *budget < floor {
                    return Err(Error::Validation(format!(
                        "demand budget {budget} is below the sum of lower bounds {floor}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Membership test: does `scenario` belong to this set?
    ///
    /// Box and budget inequalities are checked with exact comparisons; a
    /// bounded pair missing from the scenario counts as outside. Discrete
    /// sets accept exactly their listed scenarios.
    pub fn contains(&self, scenario: &DemandScenario) -> bool {
        match self {
            DemandUncertainty::Discrete { scenarios, .. } => {
                scenarios.iter().any(|s| s == scenario)
            }
            DemandUncertainty::Box { bounds } => in_box(bounds, scenario),
            DemandUncertainty::Gamma { bounds, budget } => {
                in_box(bounds, scenario)
                    && bounds
                        .keys()
                        .map(|pair| scenario[pair])
                        .sum::<f64>()
                        <= *budget
            }
        }
    }

    /// Number of OD pairs whose demand can vary.
    pub fn uncertain_pairs(&self) -> usize {
        match self {
            DemandUncertainty::Discrete { scenarios, .. } => {
                let mut pairs = std::collections::BTreeSet::new();
                for s in scenarios {
                    pairs.extend(s.keys().copied());
                }
                pairs.len()
            }
            DemandUncertainty::Box { bounds } | DemandUncertainty::Gamma { bounds, .. } => {
                bounds.len()
            }
        }
    }
}

fn validate_bounds(bounds: &BTreeMap<(StationId, StationId), (f64, f64)>) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::Validation(
            "uncertainty set bounds no OD pair".into(),
        ));
    }
    for (&(s, t), &(lo, hi)) in bounds {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
            return Err(Error::Validation(format!(
                "demand bounds for pair ({}, {}) must satisfy 0 <= lower <= upper, got [{lo}, {hi}]",
                s.0, t.0
            )));
        }
    }
    Ok(())
}

fn in_box(
    bounds: &BTreeMap<(StationId, StationId), (f64, f64)>,
    scenario: &DemandScenario,
) -> bool {
    bounds.iter().all(|(pair, &(lo, hi))| {
        scenario
            .get(pair)
            .is_some_and(|&v| lo <= v && v <= hi)
    })
}

/// On-disk scenario file. Station references are names; OD entries are
/// arrays so ids may contain any character.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UncertaintyFile {
    kind: String,
    /// Box/gamma: `[origin, destination, lower, upper]` per uncertain pair.
    #[serde(default)]
    bounds: Vec<(String, String, f64, f64)>,
    /// Gamma only: cap on the total demand of the uncertain pairs.
    #[serde(default)]
    budget: Option<f64>,
    /// Discrete: each scenario is a list of `[origin, destination, value]`.
    #[serde(default)]
    scenarios: Vec<Vec<(String, String, f64)>>,
    #[serde(default)]
    probabilities: Option<Vec<f64>>,
}

/// Reads an uncertainty set from a JSON scenario file.
///
/// ```json
/// {"kind": "box", "bounds": [["s1", "s3", 100.0, 140.0]]}
/// {"kind": "gamma", "bounds": [["s1", "s2", 8, 10], ["s2", "s3", 15, 20]], "budget": 25.0}
/// {"kind": "discrete", "scenarios": [[["s1", "s3", 120.0]]], "probabilities": [1.0]}
/// ```
pub fn load_uncertainty(path: &Path, instance: &Instance) -> Result<DemandUncertainty> {
    let text = std::fs::read_to_string(path)?;
    let file: UncertaintyFile = serde_json::from_str(&text)?;
    let station = |name: &str| -> Result<StationId> {
        instance.station(name).ok_or_else(|| {
            Error::Validation(format!(
                "{}: unknown station '{name}'",
                path.display()
            ))
        })
    };
    let parse_bounds = |entries: &[(String, String, f64, f64)]| -> Result<BTreeMap<_, _>> {
        let mut bounds = BTreeMap::new();
        for (from, to, lo, hi) in entries {
            let pair = (station(from)?, station(to)?);
            if bounds.insert(pair, (*lo, *hi)).is_some() {
                return Err(Error::Validation(format!(
                    "{}: duplicate bounds for pair {from} -> {to}",
                    path.display()
                )));
            }
        }
        Ok(bounds)
    };

    let set = match file.kind.as_str() {
        "box" | "gamma" => {
            if !file.scenarios.is_empty() || file.probabilities.is_some() {
                return Err(Error::Validation(format!(
                    "{}: '{}' sets take bounds, not scenarios",
                    path.display(),
                    file.kind
                )));
            }
            let bounds = parse_bounds(&file.bounds)?;
            if file.kind == "box" {
                if file.budget.is_some() {
                    return Err(Error::Validation(format!(
                        "{}: a box set takes no budget",
                        path.display()
                    )));
                }
                DemandUncertainty::Box { bounds }
            } else {
                let budget = file.budget.ok_or_else(|| {
                    Error::Validation(format!("{}: a gamma set needs a budget", path.display()))
                })?;
                DemandUncertainty::Gamma { bounds, budget }
            }
        }
        "discrete" => {
            if !file.bounds.is_empty() || file.budget.is_some() {
                return Err(Error::Validation(format!(
                    "{}: a discrete set takes scenarios, not bounds",
                    path.display()
                )));
            }
            let mut scenarios = Vec::new();
            for entries in &file.scenarios {
                let mut scenario = DemandScenario::new();
                for (from, to, v) in entries {
                    let pair = (station(from)?, station(to)?);
                    if scenario.insert(pair, *v).is_some() {
                        return Err(Error::Validation(format!(
                            "{}: duplicate demand for pair {from} -> {to}",
                            path.display()
                        )));
                    }
                }
                scenarios.push(scenario);
            }
            DemandUncertainty::Discrete {
                scenarios,
                probabilities: file.probabilities,
            }
        }
        other => {
            return Err(Error::Validation(format!(
                "{}: unknown uncertainty kind '{other}' (expected box, gamma, or discrete)",
                path.display()
            )))
        }
    };
    set.validate()?;
    Ok(set)
}

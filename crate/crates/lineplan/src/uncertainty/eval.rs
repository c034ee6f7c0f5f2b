//! One-stage evaluation of a fixed line concept against demand scenarios:
//! passengers re-route per scenario, capacities stay fixed.

use std::collections::BTreeMap;

use super::{DemandScenario, DemandUncertainty, MAX_UNCERTAIN_PAIRS};
use crate::error::{Error, Result};
use crate::evaluate::{check_capacity, CapacityReport};
use crate::network::{Instance, LineConcept, LinePool, StationId};
use crate::routing::{
    network_diameter, shortest_paths_ptn, ArcLoads, Level, PtnPath, RoutingResult, TimeComponents,
};

/// Demand granularity of the fractional-pair grid in gamma enumeration.
const GAMMA_GRID_STEP: f64 = 0.25;

/// Evaluation parameters shared by worst-case and expected-value analysis.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalConfig {
    /// Minutes charged per unit of capacity deficit. Defaults to three
    /// times the network diameter.
    pub deficit_weight: Option<f64>,
}

/// Evaluation of one demand scenario under the fixed concept.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioEval {
    /// The demand overrides that were applied.
    pub scenario: DemandScenario,
    /// Passenger-minutes of in-vehicle travel on shortest paths.
    pub travel_time: f64,
    /// Total link-level capacity deficit under the concept.
    pub total_deficit: f64,
    /// `travel_time + deficit_weight * total_deficit`.
    pub objective: f64,
}

/// The maximizing scenario over an uncertainty set.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseReport {
    pub worst: ScenarioEval,
    /// Deficit weight that was applied (minutes per deficit unit).
    pub deficit_weight: f64,
    /// Number of candidate scenarios evaluated.
    pub candidates: usize,
    /// True when the candidate set only bounds the worst case from below
    /// (gamma sets: extreme points plus a fractional-pair grid).
    pub heuristic: bool,
}

/// Probability-weighted evaluation over a discrete scenario set.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedReport {
    /// `(probability, evaluation)` per scenario, in listed order.
    pub per_scenario: Vec<(f64, ScenarioEval)>,
    pub expected_objective: f64,
    pub deficit_weight: f64,
}

/// Shortest paths are demand-independent, so they are computed once and each
/// scenario evaluation only re-weights them.
struct ScenarioEvaluator<'a> {
    pool: &'a LinePool,
    concept: &'a LineConcept,
    nominal: BTreeMap<(StationId, StationId), f64>,
    paths: BTreeMap<(StationId, StationId), PtnPath>,
    weight: f64,
}

impl<'a> ScenarioEvaluator<'a> {
    fn new(
        instance: &'a Instance,
        pool: &'a LinePool,
        concept: &'a LineConcept,
        uncertainty: &DemandUncertainty,
        config: &EvalConfig,
    ) -> Result<Self> {
        concept.validate_against(pool)?;
        let weight = match config.deficit_weight {
            Some(w) => {
                if !(w.is_finite() && w >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "deficit weight must be non-negative, got {w}"
                    )));
                }
                w
            }
            None => 3.0 * network_diameter(instance),
        };

        // Route every pair that can carry demand in any scenario.
        let nominal: BTreeMap<_, _> = instance
            .od_pairs()
            .map(|(s, t, v)| ((s, t), v))
            .collect();
        let mut universe: BTreeMap<(StationId, StationId), f64> = nominal.clone();
        let extra: Vec<(StationId, StationId)> = match uncertainty {
            DemandUncertainty::Discrete { scenarios, .. } => {
                scenarios.iter().flat_map(|s| s.keys().copied()).collect()
            }
            DemandUncertainty::Box { bounds } | DemandUncertainty::Gamma { bounds, .. } => {
                bounds.keys().copied().collect()
            }
        };
        for pair in extra {
            universe.entry(pair).or_insert(1.0);
        }
        let routable = instance.with_od(&universe)?;
        let sp = shortest_paths_ptn(&routable);
        if let Some(&(s, t)) = sp.unreachable.first() {
            return Err(Error::Validation(format!(
                "OD pair {} -> {} has no path in the network",
                instance.station_name(s),
                instance.station_name(t)
            )));
        }
        Ok(ScenarioEvaluator {
            pool,
            concept,
            nominal,
            paths: sp.paths,
            weight,
        })
    }

    /// Total demand of a pair under `overrides`.
    fn demand(&self, pair: (StationId, StationId), overrides: &DemandScenario) -> f64 {
        overrides
            .get(&pair)
            .or_else(|| self.nominal.get(&pair))
            .copied()
            .unwrap_or(0.0)
    }

    fn eval(&self, overrides: &DemandScenario) -> ScenarioEval {
        let mut travel_time = 0.0;
        let mut loads = BTreeMap::new();
        for (&pair, path) in &self.paths {
            let d = self.demand(pair, overrides);
            if d <= 0.0 {
                continue;
            }
            travel_time += d * path.length;
            for &a in &path.links {
                *loads.entry(a).or_insert(0.0) += d;
            }
        }
        let report = self.capacity_report(loads);
        let total_deficit = report.total_deficit();
        ScenarioEval {
            scenario: overrides.clone(),
            travel_time,
            total_deficit,
            objective: travel_time + self.weight * total_deficit,
        }
    }

    fn capacity_report(&self, loads: BTreeMap<crate::network::LinkId, f64>) -> CapacityReport {
        let shell = RoutingResult {
            level: Level::Link,
            routes: BTreeMap::new(),
            arc_loads: ArcLoads::Link(loads),
            time_components: TimeComponents::default(),
            unrouted: Vec::new(),
        };
        check_capacity(self.pool, self.concept, &shell, Level::Link)
            .expect("link-level loads always support a link-level check")
    }
}

/// Finds the demand scenario in `uncertainty` that hurts the concept most.
///
/// Passengers re-route per scenario ("wait-and-see" routing); the objective
/// is travel time plus weighted link-level capacity deficit. Box and gamma
/// sets are explored at their extreme points, which is exhaustive for this
/// convex objective; gamma additionally grids the budget-tight pair and is
/// flagged as a lower bound. Enumeration refuses more than
/// [`MAX_UNCERTAIN_PAIRS`] uncertain pairs — use a discrete sample instead.
pub fn worst_case_eval(
    instance: &Instance,
    pool: &LinePool,
    concept: &LineConcept,
    uncertainty: &DemandUncertainty,
    config: &EvalConfig,
) -> Result<WorstCaseReport> {
    uncertainty.validate()?;
    if matches!(
        uncertainty,
        DemandUncertainty::Box { .. } | DemandUncertainty::Gamma { .. }
    ) {
        let count = uncertainty.uncertain_pairs();
        if count > MAX_UNCERTAIN_PAIRS {
            return Err(Error::TooManyPairs {
                count,
                limit: MAX_UNCERTAIN_PAIRS,
            });
        }
    }
    let evaluator = ScenarioEvaluator::new(instance, pool, concept, uncertainty, config)?;

    let (candidates, heuristic) = match uncertainty {
        DemandUncertainty::Discrete { scenarios, .. } => (scenarios.clone(), false),
        DemandUncertainty::Box { bounds } => (box_vertices(bounds), false),
        DemandUncertainty::Gamma { bounds, budget } => (gamma_candidates(bounds, *budget), true),
    };

    let mut worst: Option<ScenarioEval> = None;
    let total = candidates.len();
    for candidate in candidates {
        let eval = evaluator.eval(&candidate);
        let better = match &worst {
            None => true,
            Some(w) => eval.objective > w.objective,
        };
        if better {
            worst = Some(eval);
        }
    }
    Ok(WorstCaseReport {
        worst: worst.expect("validated uncertainty sets are non-empty"),
        deficit_weight: evaluator.weight,
        candidates: total,
        heuristic,
    })
}

/// All corners of the demand box, in binary-counter order over the pairs.
fn box_vertices(bounds: &BTreeMap<(StationId, StationId), (f64, f64)>) -> Vec<DemandScenario> {
    let pairs: Vec<_> = bounds.iter().map(|(&p, &b)| (p, b)).collect();
    let mut out = Vec::with_capacity(1 << pairs.len());
    for mask in 0u64..(1u64 << pairs.len()) {
        let scenario: DemandScenario = pairs
            .iter()
            .enumerate()
            .map(|(i, &(p, (lo, hi)))| (p, if mask >> i & 1 == 1 { hi } else { lo }))
            .collect();
        out.push(scenario);
    }
    out
}

/// Extreme candidates of the budgeted box: every lower/upper corner that
/// respects the budget, plus — for each choice of one "fractional" pair —
/// the budget-tight value and a coarse grid below it.
fn gamma_candidates(
    bounds: &BTreeMap<(StationId, StationId), (f64, f64)>,
    budget: f64,
) -> Vec<DemandScenario> {
    let pairs: Vec<_> = bounds.iter().map(|(&p, &b)| (p, b)).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let scenario: DemandScenario = pairs
            .iter()
            .enumerate()
            .map(|(i, &(p, (lo, hi)))| (p, if mask >> i & 1 == 1 { hi } else { lo }))
            .collect();
        if scenario.values().sum::<f64>() <= budget {
            out.push(scenario);
        }
    }
    for (frac, &(p, (lo, hi))) in pairs.iter().enumerate() {
        let others: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != frac)
            .map(|(_, &x)| x)
            .collect();
        for mask in 0u64..(1u64 << others.len()) {
            let base: DemandScenario = others
                .iter()
                .enumerate()
                .map(|(i, &(q, (qlo, qhi)))| (q, if mask >> i & 1 == 1 { qhi } else { qlo }))
                .collect();
            let used: f64 = base.values().sum();
            let cap = (budget - used).min(hi);
            if cap < lo {
                continue;
            }
            let mut v = lo;
            loop {
                let mut scenario = base.clone();
                scenario.insert(p, v);
                out.push(scenario);
                if v >= cap {
                    break;
                }
                v = (v + GAMMA_GRID_STEP).min(cap);
            }
        }
    }
    out
}

/// Probability-weighted evaluation of a discrete scenario set.
///
/// Each scenario is routed independently (link level) and scored with the
/// same objective as [`worst_case_eval`].
pub fn expected_eval(
    instance: &Instance,
    pool: &LinePool,
    concept: &LineConcept,
    uncertainty: &DemandUncertainty,
    config: &EvalConfig,
) -> Result<ExpectedReport> {
    uncertainty.validate()?;
    let (scenarios, probabilities) = match uncertainty {
        DemandUncertainty::Discrete {
            scenarios,
            probabilities: Some(p),
        } => (scenarios, p),
        _ => return Err(Error::MissingProbabilities),
    };
    let evaluator = ScenarioEvaluator::new(instance, pool, concept, uncertainty, config)?;
    let mut per_scenario = Vec::with_capacity(scenarios.len());
    let mut expected_objective = 0.0;
    for (scenario, &p) in scenarios.iter().zip(probabilities) {
        let eval = evaluator.eval(scenario);
        expected_objective += p * eval.objective;
        per_scenario.push((p, eval));
    }
    Ok(ExpectedReport {
        per_scenario,
        expected_objective,
        deficit_weight: evaluator.weight,
    })
}

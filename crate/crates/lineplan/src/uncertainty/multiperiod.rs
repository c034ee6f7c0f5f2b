//! Multi-period (seasonal) line planning: one cost model per demand season,
//! coupled so that consecutive concepts stay recognisably similar.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::evaluate::DissimilarityMeasure;
use crate::formulations::{
    line_frequency_cap, traffic_lower_bounds, Context, FormulationArtifacts, FrequencyBounds,
    VarKey,
};
use crate::milp::{MilpModel, MilpSolution, Relation, Sense, SolveStatus};
use crate::network::{Instance, LineConcept, LinePool, StationId};
use crate::routing::{shortest_paths_ptn, traffic_loads};

/// One planning season: a full OD demand matrix and its weight in the
/// combined objective (typically the season's length).
#[derive(Debug, Clone, PartialEq)]
pub struct Season {
    pub demand: BTreeMap<(StationId, StationId), f64>,
    pub weight: f64,
}

/// Which pairwise couplings the model linearizes.
enum Coupling {
    None,
    FreqNorm(f64),
    LineSetDelta(f64),
}

/// Builds one cost model per season, all sharing the pool, with every pair
/// of seasons coupled by `diff(concept_j, concept_k) <= bound`.
///
/// Supported measures are the 1-norm of frequency differences (absolute
/// values split into auxiliary variables) and the line-set delta (per-line
/// selection indicators); the transport distance is evaluation-only and is
/// rejected with [`Error::UnsupportedMeasure`]. An infinite bound drops the
/// coupling, leaving independent per-season models in one solve.
///
/// Each season's link lower bounds come from routing its own demand matrix,
/// merged with the instance's static bounds. The objective is
/// `Σ_j weight_j · operating_cost_j`.
pub fn build_multiperiod_model(
    instance: &Instance,
    pool: &LinePool,
    seasons: &[Season],
    measure: &DissimilarityMeasure,
    bound: f64,
) -> Result<FormulationArtifacts> {
    if pool.len() == 0 {
        return Err(Error::InvalidParameter(
            "multi-period model needs a non-empty line pool".into(),
        ));
    }
    if seasons.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "multi-period planning needs at least two seasons, got {}",
            seasons.len()
        )));
    }
    for (j, season) in seasons.iter().enumerate() {
        if !(season.weight.is_finite() && season.weight > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "season {j} weight must be positive, got {}",
                season.weight
            )));
        }
    }
    if bound.is_nan() || bound < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "similarity bound must be non-negative, got {bound}"
        )));
    }
    let coupling = if bound.is_infinite() {
        Coupling::None
    } else {
        match measure {
            DissimilarityMeasure::FreqNorm(p) if *p == 1.0 => Coupling::FreqNorm(bound),
            DissimilarityMeasure::FreqNorm(p) => {
                return Err(Error::UnsupportedMeasure(format!(
                    "only the 1-norm of frequency differences is linear; got order {p}"
                )))
            }
            DissimilarityMeasure::LineSetDelta => Coupling::LineSetDelta(bound),
            DissimilarityMeasure::TransportDistance => {
                return Err(Error::UnsupportedMeasure(
                    "the transport distance is evaluation-only; couple with freq_norm(1) or line_set_delta".into(),
                ))
            }
        }
    };

    let mut model = MilpModel::new(Sense::Minimize);
    let mut index = BTreeMap::new();
    let mut caps: Vec<Vec<u32>> = Vec::with_capacity(seasons.len());

    for (j, season) in seasons.iter().enumerate() {
        let season_instance = instance.with_od(&season.demand)?;
        let sp = shortest_paths_ptn(&season_instance);
        if let Some(&(s, t)) = sp.unreachable.first() {
            return Err(Error::Validation(format!(
                "season {j}: OD pair {} -> {} has no path in the network",
                instance.station_name(s),
                instance.station_name(t)
            )));
        }
        let loads = traffic_loads(&season_instance, &sp);
        let mut bounds = FrequencyBounds::from_instance(instance);
        bounds.raise_lower(&traffic_lower_bounds(
            &loads,
            instance.default_capacity(),
        ));

        let mut season_caps = Vec::with_capacity(pool.len());
        for (l, line) in pool.lines() {
            let cap = line_frequency_cap(&season_instance, pool, l, &bounds);
            season_caps.push(cap);
            let v = model.add_var(format!("f{j}_{}", line.id()), 0.0, f64::from(cap), true);
            model.set_objective(v, season.weight * line.cost_per_trip());
            index.insert(VarKey::SeasonFreq { season: j, line: l }, v);
        }
        caps.push(season_caps);

        for (a, _) in instance.links() {
            let terms = || {
                pool.through_link(a)
                    .iter()
                    .map(|&l| (index[&VarKey::SeasonFreq { season: j, line: l }], 1.0))
                    .collect::<Vec<_>>()
            };
            let lo = bounds.lower(a);
            if lo > 0 {
                model.add_constraint(terms(), Relation::Ge, f64::from(lo));
            }
            if let Some(hi) = bounds.upper(a) {
                model.add_constraint(terms(), Relation::Le, f64::from(hi));
            }
        }
    }

    match coupling {
        Coupling::None => {}
        Coupling::FreqNorm(alpha) => {
            for j in 0..seasons.len() {
                for k in (j + 1)..seasons.len() {
                    let mut sum = Vec::with_capacity(pool.len());
                    for (l, line) in pool.lines() {
                        let fj = index[&VarKey::SeasonFreq { season: j, line: l }];
                        let fk = index[&VarKey::SeasonFreq { season: k, line: l }];
                        let g = model.add_var(
                            format!("gap{j}_{k}_{}", line.id()),
                            0.0,
                            f64::INFINITY,
                            false,
                        );
                        // g >= |f_j - f_k| via both one-sided differences.
                        model.add_constraint(
                            vec![(g, 1.0), (fj, -1.0), (fk, 1.0)],
                            Relation::Ge,
                            0.0,
                        );
                        model.add_constraint(
                            vec![(g, 1.0), (fk, -1.0), (fj, 1.0)],
                            Relation::Ge,
                            0.0,
                        );
                        sum.push((g, 1.0));
                    }
                    model.add_constraint(sum, Relation::Le, alpha);
                }
            }
        }
        Coupling::LineSetDelta(alpha) => {
            // Selection indicators: y = 1 exactly when f >= 1.
            for j in 0..seasons.len() {
                for (l, line) in pool.lines() {
                    let f = index[&VarKey::SeasonFreq { season: j, line: l }];
                    let y = model.add_var(format!("y{j}_{}", line.id()), 0.0, 1.0, true);
                    let cap = f64::from(caps[j][l.0].max(1));
                    model.add_constraint(vec![(f, 1.0), (y, -cap)], Relation::Le, 0.0);
                    model.add_constraint(vec![(f, 1.0), (y, -1.0)], Relation::Ge, 0.0);
                    index.insert(VarKey::SeasonSelect { season: j, line: l }, y);
                }
            }
            for j in 0..seasons.len() {
                for k in (j + 1)..seasons.len() {
                    let mut sum = Vec::with_capacity(pool.len());
                    for (l, line) in pool.lines() {
                        let yj = index[&VarKey::SeasonSelect { season: j, line: l }];
                        let yk = index[&VarKey::SeasonSelect { season: k, line: l }];
                        let d = model.add_var(
                            format!("set{j}_{k}_{}", line.id()),
                            0.0,
                            1.0,
                            false,
                        );
                        model.add_constraint(
                            vec![(d, 1.0), (yj, -1.0), (yk, 1.0)],
                            Relation::Ge,
                            0.0,
                        );
                        model.add_constraint(
                            vec![(d, 1.0), (yk, -1.0), (yj, 1.0)],
                            Relation::Ge,
                            0.0,
                        );
                        sum.push((d, 1.0));
                    }
                    model.add_constraint(sum, Relation::Le, alpha);
                }
            }
        }
    }

    Ok(FormulationArtifacts::new(model, index, Context::Plain))
}

/// Reads the per-season line concepts out of a solved multi-period model.
pub fn decode_multiperiod(
    artifacts: &FormulationArtifacts,
    solution: &MilpSolution,
) -> Result<Vec<LineConcept>> {
    if solution.status != SolveStatus::Optimal {
        return Err(Error::InvalidParameter(format!(
            "cannot decode season concepts from a {} solution",
            solution.status.as_str()
        )));
    }
    let mut concepts: Vec<LineConcept> = Vec::new();
    let mut found = false;
    for key in artifacts.keys() {
        if let VarKey::SeasonFreq { season, line } = *key {
            found = true;
            let raw = solution.value(artifacts.var(key).expect("indexed key"));
            let f = raw.round();
            if (raw - f).abs() > 1e-4 || f < 0.0 {
                return Err(Error::Numerical(format!(
                    "season {season} frequency for line index {} is not integral: {raw}",
                    line.0
                )));
            }
            while concepts.len() <= season {
                concepts.push(LineConcept::new());
            }
            concepts[season].set_frequency(line, f as u32);
        }
    }
    if !found {
        return Err(Error::InvalidParameter(
            "formulation has no per-season frequency variables".into(),
        ));
    }
    Ok(concepts)
}

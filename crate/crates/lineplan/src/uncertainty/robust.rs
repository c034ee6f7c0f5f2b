//! Robust counterpart of the cost model under box demand uncertainty.

use std::collections::BTreeMap;

use super::DemandUncertainty;
use crate::error::{Error, Result};
use crate::formulations::{build_cost_model, traffic_lower_bounds, FormulationArtifacts, FrequencyBounds};
use crate::network::{Instance, LinePool};
use crate::routing::{shortest_paths_ptn, traffic_loads};

/// Builds the cost model whose link lower bounds cover the worst box
/// scenario.
///
/// Under planner-assigned routing the worst case of a box is the all-upper
/// demand matrix: shortest paths do not depend on demand, so every link load
/// is maximal when every pair is. The returned model therefore uses lower
/// bounds `L_a = ceil(d_a / C)` computed from the upper-bound OD matrix
/// (merged with the instance's own link bounds); any solution covers every
/// scenario in the box. Solving may report `Infeasible` when the raised
/// bounds exceed a link's frequency cap.
pub fn robust_cost_model_box(
    instance: &Instance,
    pool: &LinePool,
    uncertainty: &DemandUncertainty,
) -> Result<FormulationArtifacts> {
    let bounds = match uncertainty {
        DemandUncertainty::Box { bounds } => bounds,
        _ => {
            return Err(Error::InvalidParameter(
                "robust cost model requires a box uncertainty set".into(),
            ))
        }
    };
    uncertainty.validate()?;

    let mut od: BTreeMap<_, _> = instance.od_pairs().map(|(s, t, v)| ((s, t), v)).collect();
    for (&pair, &(_, hi)) in bounds {
        od.insert(pair, hi);
    }
    let worst = instance.with_od(&od)?;
    let sp = shortest_paths_ptn(&worst);
    if let Some(&(s, t)) = sp.unreachable.first() {
        return Err(Error::Validation(format!(
            "OD pair {} -> {} has no path in the network",
            instance.station_name(s),
            instance.station_name(t)
        )));
    }
    let loads = traffic_loads(&worst, &sp);
    let mut freq_bounds = FrequencyBounds::from_instance(instance);
    freq_bounds.raise_lower(&traffic_lower_bounds(&loads, instance.default_capacity()));
    Ok(build_cost_model(instance, pool, &freq_bounds))
}
